"""
Control of roundoff errors for large N.

The exponential factor exp(z t) at the apex of the contour amplifies rounding
errors by about exp(N zeta(0)), so the total error behaves like

    exp(-c N) + k0 eps exp(N zeta(0)).

The error therefore stops decreasing at the critical node count
N* = log(k0 / eps) / (c + zeta(0)). For N > N*, the decay rate c is lowered
until the two contributions balance at the level k0 eps, which keeps the
error at this level instead of letting it grow.
"""

import numpy as np

from scipy.ndimage import median_filter
from scipy.optimize import brentq

from ._check import check_errors_list, check_node_count, check_positive
from .errors import ConvergenceError, NoTurnDetectedError
from .params import RATIONAL_CONTOUR, TALBOT_CONTOUR, from_decay
from .quadrature import convergence_sweep, difference_sweep
from .utils import logger


UNIT_ROUNDOFF = 2.2e-16
DEFAULT_K0 = 1.0

# Smallest decay rate tried by the stabilization
MIN_DECAY = 1e-6

# Fewer nodes never reach the level of rounding errors
MIN_N_STAR = 4

BASE_CONTOURS = {
    'cotangent': TALBOT_CONTOUR,
    'rational': RATIONAL_CONTOUR,
}


def _base_contour(kind):
    if kind not in BASE_CONTOURS:
        raise ValueError(
            f"Unknown contour family '{kind}', expected one of "
            f"{list(BASE_CONTOURS)}"
        )
    return BASE_CONTOURS[kind]


def _shape(contour):
    return contour.alpha if contour.kind == 'cotangent' else contour.d


def critical_N(contour=TALBOT_CONTOUR, k0=DEFAULT_K0, epsilon=UNIT_ROUNDOFF):
    """
    Node count at which the error stops decreasing.

    Parameters
    ----------
    contour : CotangentContour or RationalContour, optional
        The contour, its decay rate ``contour.c`` should be known.
    k0 : float, optional
        Problem-dependent roundoff factor.
    epsilon : float, optional
        The target precision, unit roundoff by default.

    Returns
    -------
    N : float
        log(k0 / epsilon) / (c + zeta(0)), about 23.6 for the default
        cotangent contour and k0 = 1.
    """
    k0 = check_positive(k0, 'k0')
    epsilon = check_positive(epsilon, 'epsilon')
    if contour.c is None:
        raise ValueError("The decay rate of the contour is not known")

    return float(np.log(k0 / epsilon) / (contour.c + contour.zeta0))


def critical_N_for_precision(d, k0=DEFAULT_K0):
    """
    Node count that yields d correct digits, about 1.506 d for k0 = 1.
    """
    d = check_positive(d, 'd')
    if d < 4:
        raise ValueError(f"Expected at least 4 correct digits, got d={d}")
    return critical_N(TALBOT_CONTOUR, k0, 10.0 ** (-d))


def estimate_k0(N_star, contour=TALBOT_CONTOUR, epsilon=UNIT_ROUNDOFF):
    """
    The roundoff factor k0 implied by an observed critical node count.

    This is the inverse of :func:`critical_N`:
    k0 = epsilon exp(N* (c + zeta(0))).
    """
    N_star = check_node_count(N_star, 'N_star')
    if contour.c is None:
        raise ValueError("The decay rate of the contour is not known")

    return float(epsilon * np.exp(N_star * (contour.c + contour.zeta0)))


class RoundoffModel:
    """
    The roundoff model of a problem and the resulting choice of contours.

    For N <= N_star, the optimal contour of the family is used. For larger N,
    the decay rate is reduced such that c + zeta(0) = log(k0 / epsilon) / N
    (see :func:`stabilized_params`), while the shape parameter stays fixed.

    Parameters
    ----------
    k0 : float, optional
        Problem-dependent roundoff factor. Defaults to 1.
    epsilon : float, optional
        Unit roundoff.
    N_star : int | None, optional
        The last node count that uses the optimal contour, at least 4. If
        None, it is derived from k0 with :func:`critical_N`.
    kind : str, optional
        The contour family, ``'cotangent'`` (default) or ``'rational'``.

    Notes
    -----
    The model is callable: ``model(N)`` returns the contour to use for
    N nodes, so it can be passed wherever a contour or a function
    N -> contour is accepted.
    """

    def __init__(self, k0=DEFAULT_K0, epsilon=UNIT_ROUNDOFF, N_star=None,
                 kind='cotangent'):
        self.k0 = check_positive(k0, 'k0')
        self.epsilon = check_positive(epsilon, 'epsilon')
        self.kind = kind
        self.base = _base_contour(kind)

        if N_star is None:
            N_star = max(MIN_N_STAR,
                         int(np.floor(critical_N(self.base, self.k0, self.epsilon))))
        self.N_star = check_node_count(N_star, 'N_star')
        if self.N_star < MIN_N_STAR:
            raise ValueError(
                f"Expected N_star to be at least {MIN_N_STAR}, got {self.N_star}"
            )

        self._stabilized = dict()

    def __repr__(self):
        return (f'<RoundoffModel | {self.kind} | k0={self.k0:.3g}, '
                f'N_star={self.N_star}>')

    def __call__(self, N):
        return self.params_for(N)

    @property
    def shape(self):
        """The fixed shape parameter (alpha or d) of the contour family."""
        return _shape(self.base)

    def params_for(self, N):
        """The contour to use for N nodes."""
        N = check_node_count(N)
        if N <= self.N_star:
            return self.base
        if N not in self._stabilized:
            self._stabilized[N] = stabilized_params(N, self)
        return self._stabilized[N]


def roundoff_equation(c, N, model):
    """
    Residual c + zeta(0) + log(epsilon / k0) / N of the balance condition.
    """
    contour = from_decay(model.kind, model.shape, c)
    return contour.c + contour.zeta0 + np.log(model.epsilon / model.k0) / N


def stabilized_params(N, model):
    """
    Contour with the decay rate reduced to balance roundoff for N nodes.

    Parameters
    ----------
    N : int
        The number of nodes, N > model.N_star.
    model : RoundoffModel
        The roundoff model.

    Returns
    -------
    contour : CotangentContour or RationalContour
        A contour of the same family with the same shape parameter and the
        decay rate c that solves the balance condition. If the optimal decay
        rate already satisfies c + zeta(0) <= log(k0 / epsilon) / N, the
        optimal contour is returned.

    Raises
    ------
    ConvergenceError
        If the balance condition has no solution in (0, c_opt].
    """
    N = check_node_count(N)
    if N <= model.N_star:
        raise ValueError(
            f"Stabilized parameters are only used for N > N_star "
            f"({model.N_star}), got N={N}"
        )

    c_opt = model.base.c
    upper = roundoff_equation(c_opt, N, model)
    if upper <= 0:
        logger.debug(f'N={N} is below the critical node count, '
                     f'keeping the optimal contour')
        return model.base

    lower = roundoff_equation(MIN_DECAY, N, model)
    if lower >= 0:
        raise ConvergenceError(
            f"The roundoff balance condition has no solution for N={N}, "
            f"k0={model.k0:.3g}: the residual is {lower:.2e} at c={MIN_DECAY}"
        )

    c = brentq(roundoff_equation, MIN_DECAY, c_opt, args=(N, model),
               xtol=1e-15, rtol=4 * np.finfo(float).eps)
    contour = from_decay(model.kind, model.shape, c)
    logger.debug(f'Stabilized {model.kind} contour for N={N}: c={c:.6f}, '
                 f'zeta(0)={contour.zeta0:.3e}')
    return contour


def _fit_two_lines(x, y, min_points=3):
    """Least-squares lines before and after the best split of the samples."""
    best = None
    for k in range(min_points, x.size - min_points + 1):
        left = np.polyfit(x[:k], y[:k], deg=1)
        right = np.polyfit(x[k:], y[k:], deg=1)
        sse = (np.sum((np.polyval(left, x[:k]) - y[:k]) ** 2)
               + np.sum((np.polyval(right, x[k:]) - y[k:]) ** 2))
        if best is None or sse < best[0]:
            best = (sse, left, right)
    return best[1], best[2]


def detect_Nstar(errors, size=3):
    """
    Detect the node count at which the error stops decreasing.

    The smoothed log(error) is fitted by two lines: the exponential decay
    of the truncation error and the level (or slow growth) of rounding
    errors. N_star is the node count closest to their intersection.

    Parameters
    ----------
    errors : list of (N, relative_error)
        Errors sorted by N, e.g., the output of
        :func:`talbotinv.quadrature.convergence_sweep`. NaN entries
        are ignored.
    size : int, optional
        Window of the running median applied to log(error).

    Returns
    -------
    N_star : int
        The node count at which truncation errors reach the level of
        rounding errors.

    Raises
    ------
    NoTurnDetectedError
        If the errors do not level off, i.e., they are still decreasing
        at the end of the range.
    """
    Ns, values = check_errors_list(errors)
    valid = np.isfinite(values) & (values > 0)
    Ns, values = Ns[valid], values[valid]
    if Ns.size < 6:
        raise ValueError(
            f"Expected at least 6 finite positive errors, got {Ns.size}"
        )

    smoothed = median_filter(np.log(values), size=size, mode='nearest')
    (decay, left), (rise, right) = _fit_two_lines(Ns.astype(float), smoothed)

    # The errors level off once they decrease at less than half the rate
    if decay >= 0 or rise <= decay / 2:
        raise NoTurnDetectedError(
            f"The errors are still decreasing at N={Ns[-1]}, extend the "
            f"range of N to detect the critical node count"
        )

    crossing = (right - left) / (decay - rise)
    N_star = int(Ns[np.argmin(np.abs(Ns - crossing))])
    logger.debug(f'Truncation and rounding errors meet at N={crossing:.2f}')
    return N_star


def calibrate(transform, t, Ns, reference=None, kind='cotangent',
              epsilon=UNIT_ROUNDOFF):
    """
    Estimate the roundoff model of a problem from a sweep over N.

    Parameters
    ----------
    transform : ScalarTransform or VectorTransform
        The transform to invert.
    t : float
        The time.
    Ns : list of int
        The node counts of the sweep, the range should extend well
        beyond the expected critical node count.
    reference : float | array | None, optional
        The exact value of f(t). If None, the differences between
        consecutive approximations are used as the error.
    kind : str, optional
        The contour family.
    epsilon : float, optional
        Unit roundoff.

    Returns
    -------
    model : RoundoffModel
        The model with the detected N_star and the matching k0.
    """
    base = _base_contour(kind)
    if reference is None:
        errors = difference_sweep(transform, t, Ns, base)
    else:
        errors = convergence_sweep(transform, reference, t, Ns, base)

    N_star = detect_Nstar(errors)
    k0 = estimate_k0(N_star, base, epsilon)
    logger.info(f'Calibrated roundoff model for {transform.name}: '
                f'N_star={N_star}, k0={k0:.3g}')
    return RoundoffModel(k0=k0, epsilon=epsilon, N_star=N_star, kind=kind)
