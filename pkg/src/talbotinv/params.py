"""
Derivation of the contour coefficients.

For a decay rate c, the coefficients of a contour family are fixed by three
conditions: the contour passes through zeta(ic) = 0 with zeta'(ic) = 0 and
Re zeta(pi) = -c. The largest attainable c is then found by requiring that
the mapped integrand has a saddle point at theta_s = x_s + i y_s with
zeta'(theta_s) = i and Re zeta(theta_s) = -y_s - c, and maximizing c over
the remaining shape parameter (alpha for the cotangent family, d for the
rational one).
"""

import functools
import numpy as np

from scipy.optimize import minimize_scalar

from .contour import CotangentContour, RationalContour
from .errors import (
    ConvergenceError, ContourDomainError, OutOfRangeError,
    SingularConfigurationError, TalbotError
)
from .utils import logger


OPTIMAL_ALPHA = 0.6407
OPTIMAL_C = 1.3580
RATIONAL_D = 3.0767
RATIONAL_C = 1.311

# Decay rates of earlier parameter choices, for comparison
LITERATURE_RATES = {
    'cotangent-classic': 0.676,
    'hyperbola': 0.949,
    'parabola': 1.047,
    'cotangent-fitted': 1.176,
    'rational': 1.311,
    'cotangent-optimal': 1.358,
}

ALPHA_RANGE = (0.45, 0.90)
D_RANGE = (2.0, 5.0)

# Starting points (x_s, y_s, c) of the Newton iterations at the published optima
COTANGENT_GUESS = (3.42, -2.34, 1.36)
RATIONAL_GUESS = (2.95, -2.24, 1.31)


def closed_form_smn(alpha, c):
    """
    Coefficients (sigma, mu, nu) of the cotangent contour with decay rate c.

    Parameters
    ----------
    alpha : float
        Shape parameter of the contour, 0 < alpha < 1.
    c : float
        Decay rate, c > 0.

    Returns
    -------
    sigma, mu, nu : float
        The coefficients of the contour.

    Raises
    ------
    SingularConfigurationError
        If the linear conditions on the coefficients are singular for
        the provided (alpha, c).
    """
    if not 0 < alpha < 1:
        raise OutOfRangeError(f"Expected alpha to be in (0, 1), got {alpha}")
    if not c > 0:
        raise OutOfRangeError(f"Expected c to be positive, got {c}")

    s2 = np.sin(alpha * np.pi) ** 2
    sh2 = np.sinh(alpha * c) ** 2
    denominator = 2 * alpha * c ** 2 * s2 - np.pi * np.sin(2 * alpha * np.pi) * sh2
    if abs(denominator) <= 1e-14 * (2 * alpha * c ** 2 * s2 + np.pi * sh2):
        raise SingularConfigurationError(
            f"The coefficients of the cotangent contour are not defined "
            f"for alpha={alpha}, c={c}"
        )

    B = c * s2 / denominator
    sigma = 2 * alpha * c ** 2 * B
    mu = 2 * sh2 * B
    nu = (np.sinh(2 * alpha * c) - 2 * alpha * c) * B
    return float(sigma), float(mu), float(nu)


def rational_coefficients(d, c):
    """
    Coefficients (a, b, e) of the rational contour with decay rate c.

    The three conditions are linear in (a, b, e) and are solved directly.

    Raises
    ------
    SingularConfigurationError
        If the linear system is singular for the provided (d, c).
    """
    if not d > 1:
        raise OutOfRangeError(f"Expected d to be larger than 1, got {d}")
    if not c > 0:
        raise OutOfRangeError(f"Expected c to be positive, got {c}")

    P = c ** 2 + d * np.pi ** 2
    system = np.array([
        # zeta(ic) = a + b c^2 / P - e c = 0
        [1.0, c ** 2 / P, -c],
        # zeta'(ic) = i (e - 2 b d pi^2 c / P^2) = 0
        [0.0, 2 * d * np.pi ** 2 * c / P ** 2, -1.0],
        # Re zeta(pi) = a + b / (1 - d) = -c
        [1.0, 1.0 / (1 - d), 0.0],
    ])
    rhs = np.array([0.0, 0.0, -c])
    try:
        a, b, e = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        raise SingularConfigurationError(
            f"The coefficients of the rational contour are not defined "
            f"for d={d}, c={c}"
        )
    return float(a), float(b), float(e)


def cotangent_from_decay(alpha, c):
    """Cotangent contour with decay rate c, see :func:`closed_form_smn`."""
    sigma, mu, nu = closed_form_smn(alpha, c)
    return CotangentContour(sigma, mu, nu, alpha, c=c)


def rational_from_decay(d, c):
    """Rational contour with decay rate c, see :func:`rational_coefficients`."""
    a, b, e = rational_coefficients(d, c)
    return RationalContour(a, b, d, e, c=c)


def from_decay(kind, shape, c):
    """
    Contour of the requested family with decay rate c.

    Parameters
    ----------
    kind : str
        ``'cotangent'`` or ``'rational'``.
    shape : float
        alpha for the cotangent family, d for the rational one.
    c : float
        Decay rate.
    """
    builders = {
        'cotangent': cotangent_from_decay,
        'rational': rational_from_decay,
    }
    if kind not in builders:
        raise ValueError(
            f"Unknown contour family '{kind}', expected one of "
            f"{list(builders)}"
        )
    return builders[kind](shape, c)


def decay_constraints(contour, c):
    """
    Residuals of the conditions that define a contour with decay rate c.

    Returns
    -------
    residuals : array of complex, shape (3,)
        zeta(ic), zeta'(ic) and Re zeta(pi) + c.
    """
    return np.array([
        contour.zeta(1j * c),
        contour.zeta_prime(1j * c),
        contour.zeta(np.pi).real + c,
    ])


TALBOT_CONTOUR = cotangent_from_decay(OPTIMAL_ALPHA, OPTIMAL_C)
RATIONAL_CONTOUR = rational_from_decay(RATIONAL_D, RATIONAL_C)


class SaddleSolution:
    """
    Solution of the saddle point system for a fixed shape parameter.

    Attributes
    ----------
    kind : str
        The contour family.
    shape : float
        alpha for the cotangent family, d for the rational one.
    c : float
        The decay rate.
    x_s, y_s : float
        Real and imaginary part of the saddle point theta_s, x_s > 0, y_s < 0.
    contour : CotangentContour or RationalContour
        The contour with decay rate c.
    residuals : array, shape (3,)
        Residuals of the saddle point system at the solution.
    n_iter : int
        The number of Newton iterations.
    """

    def __init__(self, kind, shape, c, x_s, y_s, contour, residuals, n_iter):
        self.kind = kind
        self.shape = shape
        self.c = c
        self.x_s = x_s
        self.y_s = y_s
        self.contour = contour
        self.residuals = residuals
        self.n_iter = n_iter

    def __repr__(self):
        return (f'<SaddleSolution | {self.kind} | shape={self.shape:.4f}, '
                f'c={self.c:.4f}, theta_s={self.theta_s:.4f}>')

    @property
    def alpha(self):
        """Shape parameter of the cotangent family (None for other families)."""
        return self.shape if self.kind == 'cotangent' else None

    @property
    def theta_s(self):
        return complex(self.x_s, self.y_s)


def _family_residual(kind, shape, c, x_s, y_s):
    contour = from_decay(kind, shape, c)
    theta_s = complex(x_s, y_s)
    dz = contour.zeta_prime(theta_s)
    z = contour.zeta(theta_s)
    return np.array([dz.real, dz.imag - 1, z.real + y_s + c])


def saddle_residual(alpha, c, x_s, y_s):
    """
    Residuals of the saddle point system of the cotangent contour.

    Parameters
    ----------
    alpha : float
        Shape parameter of the contour.
    c : float
        Decay rate.
    x_s, y_s : float
        Real and imaginary part of the candidate saddle point.

    Returns
    -------
    residuals : array, shape (3,)
        Re zeta'(theta_s), Im zeta'(theta_s) - 1 and Re zeta(theta_s) + y_s + c.
    """
    return _family_residual('cotangent', alpha, c, x_s, y_s)


def _damped_newton(fun, x0, admissible, tol=1e-12, maxiter=50, step=1e-7):
    """Damped Newton iteration with a central difference Jacobian."""
    x = np.array(x0, dtype=float)
    fx = fun(x)
    norm = np.max(np.abs(fx))
    n = x.size

    for n_iter in range(maxiter):
        if norm <= tol:
            return x, fx, n_iter

        jac = np.empty((n, n))
        for j in range(n):
            h = step * max(1.0, abs(x[j]))
            e = np.zeros(n)
            e[j] = h
            jac[:, j] = (fun(x + e) - fun(x - e)) / (2 * h)

        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            raise ConvergenceError(
                f"The Jacobian of the saddle point system is singular at {x}"
            )

        lam = 1.0
        accepted = False
        while lam >= 1 / 1024:
            x_new = x + lam * dx
            if admissible(x_new):
                try:
                    f_new = fun(x_new)
                except (ContourDomainError, SingularConfigurationError):
                    f_new = None
                if f_new is not None and np.max(np.abs(f_new)) < norm:
                    accepted = True
                    break
            lam /= 2

        if not accepted:
            # Stagnation at the level of rounding errors
            if norm <= 1e-10:
                logger.debug(f'Newton iteration stagnated at residual {norm:.2e}')
                return x, fx, n_iter
            raise ConvergenceError(
                f"The line search failed at {x} with residual {norm:.2e}"
            )

        x, fx = x_new, f_new
        norm = np.max(np.abs(fx))

    if norm <= 1e-10:
        return x, fx, maxiter
    raise ConvergenceError(
        f"The Newton iteration did not converge in {maxiter} iterations, "
        f"the residual is {norm:.2e}"
    )


def _solve_family(kind, shape, guess, tol, maxiter):
    def fun(v):
        x_s, y_s, c = v
        return _family_residual(kind, shape, c, x_s, y_s)

    def admissible(v):
        x_s, y_s, c = v
        return x_s > 0 and y_s < 0 and c > 0

    guess = np.asarray(guess, dtype=float)
    if not admissible(guess):
        raise ValueError(
            f"Expected the initial guess (x_s, y_s, c) to satisfy x_s > 0, "
            f"y_s < 0 and c > 0, got {tuple(guess)}"
        )

    (x_s, y_s, c), residuals, n_iter = _damped_newton(
        fun, guess, admissible, tol=tol, maxiter=maxiter
    )
    logger.debug(f'Saddle point system ({kind}, shape={shape:.6f}) solved '
                 f'in {n_iter} iterations: c={c:.6f}')
    return SaddleSolution(kind, float(shape), float(c), float(x_s), float(y_s),
                          from_decay(kind, shape, c), residuals, n_iter)


@functools.lru_cache(maxsize=None)
def _anchor(kind):
    if kind == 'cotangent':
        return _solve_family(kind, OPTIMAL_ALPHA, COTANGENT_GUESS, 1e-12, 50)
    return _solve_family(kind, RATIONAL_D, RATIONAL_GUESS, 1e-12, 50)


def _solve_with_continuation(kind, shape, guess, tol, maxiter, max_step):
    if guess is not None:
        return _solve_family(kind, shape, guess, tol, maxiter)

    anchor = _anchor(kind)
    n_steps = int(np.ceil(abs(shape - anchor.shape) / max_step))
    solution = anchor
    for value in np.linspace(anchor.shape, shape, n_steps + 1)[1:]:
        guess = (solution.x_s, solution.y_s, solution.c)
        solution = _solve_family(kind, value, guess, tol, maxiter)
    return solution


def solve_saddle(alpha, guess=None, tol=1e-12, maxiter=50):
    """
    Solve the saddle point system of the cotangent contour for fixed alpha.

    Parameters
    ----------
    alpha : float
        Shape parameter, should be within [0.45, 0.90].
    guess : tuple (x_s, y_s, c) | None, optional
        Initial guess for the Newton iteration. If None (default), the
        solution is continued from the optimal alpha in small steps.
    tol : float, optional
        Target maximum residual.
    maxiter : int, optional
        Maximum number of Newton iterations.

    Returns
    -------
    solution : SaddleSolution
        The decay rate c and the saddle point for this alpha.

    Raises
    ------
    OutOfRangeError
        If alpha is outside of the range where the system has an admissible
        solution.
    ConvergenceError
        If the Newton iteration does not converge.
    """
    if not ALPHA_RANGE[0] <= alpha <= ALPHA_RANGE[1]:
        raise OutOfRangeError(
            f"Expected alpha to be within {list(ALPHA_RANGE)}, got {alpha}"
        )
    return _solve_with_continuation('cotangent', alpha, guess, tol, maxiter,
                                    max_step=0.02)


def solve_rational_saddle(d, guess=None, tol=1e-12, maxiter=50):
    """
    Solve the saddle point system of the rational contour for fixed d.

    See :func:`solve_saddle` for the description of the parameters.
    """
    if not D_RANGE[0] <= d <= D_RANGE[1]:
        raise OutOfRangeError(
            f"Expected d to be within {list(D_RANGE)}, got {d}"
        )
    return _solve_with_continuation('rational', d, guess, tol, maxiter,
                                    max_step=0.05)


def _maximize_rate(kind, solver, bounds, xatol):
    last = {'guess': None}

    def objective(shape):
        try:
            solution = solver(shape, guess=last['guess'])
        except TalbotError:
            try:
                solution = solver(shape)
            except TalbotError as err:
                logger.warning(f'No saddle point found for shape={shape:.6f}: {err}')
                return 0.0
        last['guess'] = (solution.x_s, solution.y_s, solution.c)
        return -solution.c

    result = minimize_scalar(objective, bounds=bounds, method='bounded',
                             options={'xatol': xatol})
    best = float(result.x)

    # Parabolic refinement through three nearby samples
    h = 1e-3
    if bounds[0] <= best - h and best + h <= bounds[1]:
        c_lo, c_mid, c_hi = (-objective(v) for v in (best - h, best, best + h))
        curvature = c_lo - 2 * c_mid + c_hi
        if curvature < 0:
            shift = h * (c_lo - c_hi) / (2 * curvature)
            if abs(shift) <= h:
                best += shift

    solution = solver(best)
    logger.info(f'Optimal {kind} contour: shape={solution.shape:.6f}, '
                f'c={solution.c:.6f}')
    return solution


def optimize_alpha(bounds=(0.51, 0.82), xatol=1e-6):
    """
    Find alpha that maximizes the decay rate of the cotangent contour.

    Parameters
    ----------
    bounds : tuple, optional
        Search interval for alpha.
    xatol : float, optional
        Absolute tolerance for alpha.

    Returns
    -------
    solution : SaddleSolution
        The solution of the saddle point system at the optimal alpha.
        For the default bounds, alpha = 0.6407 and c = 1.3580 up to the
        printed digits.

    Notes
    -----
    Trial values of alpha where the saddle point system cannot be solved are treated as
    c = 0, which keeps the search inside the admissible region.
    """
    return _maximize_rate('cotangent', solve_saddle, bounds, xatol)


def derive_rational(bounds=(2.8, 3.4), xatol=1e-6):
    """
    Find d that maximizes the decay rate of the rational contour.

    Returns
    -------
    solution : SaddleSolution
        The solution at the optimal d (close to d = 3.0767, c = 1.311).
    """
    return _maximize_rate('rational', solve_rational_saddle, bounds, xatol)
