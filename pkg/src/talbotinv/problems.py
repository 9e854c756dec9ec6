"""
Test transforms with known inverses: scalar F1, F2, F3 and the semi-discrete
heat equation u_t + A u = 0, together with independent reference values.
"""

import functools
import numpy as np

from scipy import sparse
from scipy.linalg import solve as dense_solve
from scipy.optimize import brentq
from scipy.sparse.linalg import spsolve

from ._check import check_node_count, check_positive, check_time
from .errors import (
    CertificationError, ConvergenceError, ContourDomainError,
    TransformEvaluationError
)
from .quadrature import ScalarTransform, VectorTransform, invert
from .roundoff import RoundoffModel, calibrate
from .utils import compensated_sum, logger


HEAT_KAPPA = 0.01
HEAT_SEED = 1234

# Dense solves are used for the heat problem up to this size
DENSE_LIMIT = 100

# Below this |z|, F2 is evaluated by its series expansion
F2_SERIES_RADIUS = 1e-4


def _on_negative_axis(z, include_zero=True):
    z = np.asarray(z, dtype=complex)
    on_axis = (z.imag == 0) & (z.real < 0)
    if include_zero:
        on_axis |= (z.imag == 0) & (z.real == 0)
    return np.any(on_axis)


def eval_F1(z, lam=1.0):
    """
    F1(z) = 1 / (z + lambda), the transform of exp(-lambda t).

    Raises
    ------
    ContourDomainError
        If z = -lambda.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == -lam):
        raise ContourDomainError(f"F1 has a pole at z = -{lam}")
    return (1 / (z + lam))[()]


def _f2_ratio(z):
    """sinh(w/2) / (z sinh(w) + w cosh(w)) with w = sqrt(z), rescaled by exp(-w)."""
    w = np.sqrt(z)
    E = np.exp(-w)
    E2 = E * E
    return np.exp(-w / 2) * (1 - E) / (z * (1 - E2) + w * (1 + E2))


def _f2_ratio_series(z):
    numerator = 1 + z / 24 + z ** 2 / 1920 + z ** 3 / 322560
    denominator = 1 + 3 * z / 2 + 5 * z ** 2 / 24 + 7 * z ** 3 / 720
    return 0.5 * numerator / denominator


def eval_F2(z):
    """
    F2(z) = (100 z - 1) sinh(sqrt(z) / 2) / (z (z sinh(sqrt(z)) + sqrt(z) cosh(sqrt(z)))).

    The value does not depend on the branch of the square root. Close to
    the origin, the ratio of the hyperbolic terms is evaluated by its
    series expansion in z.

    Raises
    ------
    ContourDomainError
        If z = 0 (simple pole with residue -1/2).
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ContourDomainError("F2 has a pole at z = 0")

    z1 = np.atleast_1d(z)
    small = np.abs(z1) < F2_SERIES_RADIUS
    ratio = np.empty_like(z1)
    ratio[small] = _f2_ratio_series(z1[small])
    ratio[~small] = _f2_ratio(z1[~small])

    return ((100 * z1 - 1) / z1 * ratio).reshape(z.shape)[()]


def eval_F3(z, c=0.4, r=0.5):
    """
    F3(z) = exp(-r sqrt(z (1 + z) / (1 + c z))) / z.

    The square root is evaluated as sqrt(z) sqrt(1 + z) / sqrt(1 + c z) with
    principal branches, which is analytic off the negative real axis.

    Raises
    ------
    ContourDomainError
        If z lies on the branch cut (-inf, 0].
    """
    z = np.asarray(z, dtype=complex)
    if _on_negative_axis(z):
        raise ContourDomainError("F3 is not defined on the branch cut (-inf, 0]")

    root = np.sqrt(z) * np.sqrt(1 + z) / np.sqrt(1 + c * z)
    return (np.exp(-r * root) / z)[()]


def f1_transform(lam=1.0):
    lam = check_positive(lam, 'lambda')
    return ScalarTransform(functools.partial(eval_F1, lam=lam), name=f'F1(lambda={lam:g})')


def f2_transform():
    return ScalarTransform(eval_F2, name='F2')


def f3_transform(c=0.4, r=0.5):
    c = check_positive(c, 'c')
    if r < 0:
        raise ValueError(f"Expected r to be non-negative, got {r}")
    return ScalarTransform(functools.partial(eval_F3, c=c, r=r),
                           name=f'F3(c={c:g}, r={r:g})')


def reference_F1(t, lam=1.0):
    """The inverse exp(-lambda t) of F1."""
    return float(np.exp(-lam * check_time(t)))


@functools.lru_cache(maxsize=None)
def _f2_pole(n):
    """The n-th pole of F2: 0 for n = 0, -x^2 with x tan(x) = 1 otherwise."""
    if n == 0:
        return 0.0

    k = n - 1
    x = brentq(lambda x: x * np.sin(x) - np.cos(x),
               k * np.pi, k * np.pi + np.pi / 2,
               xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return -x * x


@functools.lru_cache(maxsize=None)
def _f2_residue(n, n_points=64):
    """Residue of F2 at the n-th pole, by averaging over a small circle."""
    pole = _f2_pole(n)
    gaps = [pole - _f2_pole(n + 1)]
    if n > 0:
        gaps.append(_f2_pole(n - 1) - pole)
    radius = 0.25 * min(min(gaps), 1.0)

    phi = 2 * np.pi * np.arange(n_points) / n_points
    offsets = radius * np.exp(1j * phi)
    return float(np.mean(eval_F2(pole + offsets) * offsets).real)


def reference_F2(t, n_poles=None, tol=1e-16, max_poles=5000):
    """
    The inverse of F2 from the series of residues of exp(zt) F2(z).

    Parameters
    ----------
    t : float
        The time, t > 0.
    n_poles : int | None, optional
        If provided, exactly this many poles besides z = 0 are summed.
        Otherwise, the series is truncated once the terms drop below
        ``tol`` relative to the sum.
    tol : float, optional
        Truncation threshold.
    max_poles : int, optional
        The maximal number of poles to use.

    Returns
    -------
    value : float
        f2(t).

    Raises
    ------
    ConvergenceError
        If the series does not converge within ``max_poles`` terms.
    """
    t = check_time(t)

    if n_poles is not None:
        n_poles = check_node_count(n_poles, 'n_poles')
        terms = [np.exp(_f2_pole(n) * t) * _f2_residue(n) for n in range(n_poles + 1)]
        return compensated_sum(terms)

    terms = [_f2_residue(0)]
    for n in range(1, max_poles + 1):
        terms.append(np.exp(_f2_pole(n) * t) * _f2_residue(n))
        scale = max(abs(sum(terms)), 1e-300)
        if abs(terms[-1]) < tol * scale and abs(terms[-2]) < tol * scale:
            return compensated_sum(terms)

    # exp(-x^2 t) with x ~ n pi should be negligible at the last pole
    min_t = -np.log(tol) / (max_poles * np.pi) ** 2
    raise ConvergenceError(
        f"The residue series of F2 did not converge with {max_poles} poles "
        f"for t={t:g}, use t >= {min_t:.2g}"
    )


class HeatModel:
    """
    Semi-discrete heat equation u_t + A u = 0 on the unit square.

    A is kappa times the 5-point negative Laplacian on an m x m grid of
    interior points with homogeneous Dirichlet boundary conditions.

    Parameters
    ----------
    m : int, optional
        The number of interior grid points per dimension (J = m^2).
    kappa : float, optional
        Diffusivity.
    random_state : None | int, optional
        Seed for the initial condition u0 with uniform entries on [0, 1].

    Attributes
    ----------
    h : float
        Grid spacing 1 / (m + 1).
    A : scipy.sparse.csc_matrix, shape (J, J)
        The operator.
    u0 : array, shape (J,)
        The initial condition.
    """

    def __init__(self, m=20, kappa=HEAT_KAPPA, random_state=HEAT_SEED):
        self.m = check_node_count(m, 'm')
        self.kappa = check_positive(kappa, 'kappa')
        self.h = 1 / (self.m + 1)

        T = sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(self.m, self.m))
        eye = sparse.identity(self.m)
        self.A = (self.kappa / self.h ** 2 * (sparse.kron(eye, T) + sparse.kron(T, eye))).tocsc()

        rng = np.random.default_rng(seed=random_state)
        self.u0 = rng.random(self.J)

    def __repr__(self):
        return f'<HeatModel | m={self.m} | J={self.J} | kappa={self.kappa:g}>'

    @property
    def J(self):
        return self.m * self.m

    @property
    def eigenvalues(self):
        """
        Eigenvalues of A on the (m, m) grid of sine modes:
        kappa (4 / h^2) (sin^2(j pi h / 2) + sin^2(k pi h / 2)).
        """
        s2 = np.sin(np.arange(1, self.m + 1) * np.pi * self.h / 2) ** 2
        return self.kappa * 4 / self.h ** 2 * (s2[:, np.newaxis] + s2[np.newaxis, :])

    @property
    def modes(self):
        """Orthonormal sine modes S[p, j] = sqrt(2h) sin(p j pi h), S = S^T = S^-1."""
        idx = np.arange(1, self.m + 1)
        return np.sqrt(2 * self.h) * np.sin(np.pi * np.outer(idx, idx) * self.h)


def heat_transform(model, z):
    """
    The resolvent (z I + A)^{-1} u0 of the heat model.

    Raises
    ------
    TransformEvaluationError
        If the linear system could not be solved.
    """
    M = (z * sparse.identity(model.J, format='csc') + model.A).astype(complex)
    rhs = model.u0.astype(complex)
    try:
        if model.J <= DENSE_LIMIT:
            x = dense_solve(M.toarray(), rhs)
        else:
            x = spsolve(M.tocsc(), rhs)
    except (np.linalg.LinAlgError, RuntimeError) as err:
        raise TransformEvaluationError(
            f"Failed to solve the heat problem at z={z:.6g}: {err}", z=z
        ) from err

    if not np.all(np.isfinite(x)):
        raise TransformEvaluationError(
            f"The solution of the heat problem at z={z:.6g} is not finite", z=z
        )
    return x


def heat_vector_transform(model):
    return VectorTransform(functools.partial(heat_transform, model), model.J,
                           name=f'heat(m={model.m})')


def heat_reference(model, t):
    """
    exp(-A t) u0 from the spectral decomposition of A.

    Parameters
    ----------
    model : HeatModel
        The heat model.
    t : float
        The time, t >= 0.

    Returns
    -------
    u : array, shape (J,)
        The solution at time t.
    """
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"Expected t to be non-negative, got {t}")
    if t == 0:
        return model.u0.copy()

    S = model.modes
    U0 = model.u0.reshape(model.m, model.m)
    coefs = S @ U0 @ S
    coefs *= np.exp(-model.eigenvalues * t)
    return (S @ coefs @ S).ravel()


def reference_F3(t, c=0.4, r=0.5, n_nodes=36, k0=1.0, tol=1e-10):
    """
    The inverse of F3, certified by two different contours.

    The inversion with the rational contour is compared with the
    inversion with the cotangent contour at six nodes less. Both use
    stabilized parameters for large N.

    Parameters
    ----------
    t : float
        The time.
    c, r : float
        Parameters of F3.
    n_nodes : int, optional
        The number of nodes for the rational contour.
    k0 : float | 'auto', optional
        The roundoff factor. If ``'auto'``, it is estimated from the
        differences between consecutive approximations.
    tol : float, optional
        Maximal relative difference between the two values.

    Returns
    -------
    value : float
        The value obtained with the rational contour.

    Raises
    ------
    CertificationError
        If the two values differ by more than ``tol``.
    """
    t = check_time(t)
    if r == 0:
        return 1.0

    transform = f3_transform(c, r)
    if k0 == 'auto':
        k0 = calibrate(transform, t, list(range(10, 61))).k0

    cotangent = RoundoffModel(k0=k0, kind='cotangent')
    rational = RoundoffModel(k0=k0, kind='rational')
    N_ref = max(check_node_count(n_nodes, 'n_nodes'), cotangent.N_star + 8)
    N_check = N_ref - 6

    value = invert(transform, rational(N_ref), N_ref, t).value
    check = invert(transform, cotangent(N_check), N_check, t).value

    difference = abs(value - check) / abs(value)
    if difference > tol:
        raise CertificationError(
            f"The rational (N={N_ref}) and cotangent (N={N_check}) contours "
            f"disagree for {transform.name} at t={t:g}: relative difference "
            f"{difference:.2e} > {tol:.0e}"
        )

    logger.debug(f'Certified reference for {transform.name} at t={t:g}: '
                 f'difference {difference:.2e}')
    return float(value)


class SuiteEntry:
    """
    A problem of the test suite.

    Attributes
    ----------
    name : str
        The identifier of the problem.
    transform : ScalarTransform or VectorTransform
        The transform.
    reference : callable
        Function t -> exact value of the inverse.
    t_values : tuple
        Times at which the problem is usually inverted.
    """

    def __init__(self, name, transform, reference, t_values=(1.0,)):
        self.name = name
        self.transform = transform
        self.reference = reference
        self.t_values = t_values

    def __repr__(self):
        return f'<SuiteEntry | {self.name}>'


def get_problem(name, lam=1.0, c=0.4, r=0.5, m=20, random_state=HEAT_SEED, k0=1.0):
    """
    Create a problem of the test suite.

    Parameters
    ----------
    name : str
        One of ``'f1'``, ``'f2'``, ``'f3'`` or ``'heat'``.
    lam : float, optional
        lambda of F1.
    c, r : float, optional
        Parameters of F3.
    m : int, optional
        Grid size of the heat model.
    random_state : None | int, optional
        Seed of the initial condition of the heat model.
    k0 : float | 'auto', optional
        Roundoff factor used by the reference of F3.

    Returns
    -------
    entry : SuiteEntry
        The problem.
    """
    name = name.lower()
    if name == 'f1':
        return SuiteEntry(name, f1_transform(lam),
                          functools.partial(reference_F1, lam=lam), (1.0,))
    if name == 'f2':
        return SuiteEntry(name, f2_transform(), reference_F2, (1.0,))
    if name == 'f3':
        return SuiteEntry(name, f3_transform(c, r),
                          functools.partial(reference_F3, c=c, r=r, k0=k0),
                          (1.0, 4.0))
    if name == 'heat':
        model = HeatModel(m=m, random_state=random_state)
        return SuiteEntry(name, heat_vector_transform(model),
                          functools.partial(heat_reference, model), (1.0,))

    raise ValueError(
        f"Unknown problem '{name}', expected one of ['f1', 'f2', 'f3', 'heat']"
    )
