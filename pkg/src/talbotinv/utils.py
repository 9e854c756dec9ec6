import logging
import math
import numpy as np


logger = logging.getLogger('talbotinv')


def relative_error(approx, reference):
    """
    Relative error of an approximation in the maximum norm.

    Parameters
    ----------
    approx : float or array
        Approximate value(s), e.g., the result of an inversion.
    reference : float or array
        Exact value(s) of the same shape.

    Returns
    -------
    error : float
        ``max|approx - reference| / max|reference|``.

    Raises
    ------
    ValueError
        If the shapes do not match or the reference is zero.
    """
    approx = np.atleast_1d(np.asarray(approx, dtype=float))
    reference = np.atleast_1d(np.asarray(reference, dtype=float))
    if approx.shape != reference.shape:
        raise ValueError(
            f"The shapes of the approximation {approx.shape} and the "
            f"reference {reference.shape} do not match"
        )

    scale = np.max(np.abs(reference))
    if scale == 0 or not np.isfinite(scale):
        raise ValueError(
            "The reference should be finite and nonzero for the relative "
            "error to be defined"
        )

    return float(np.max(np.abs(approx - reference)) / scale)


def compensated_sum(terms):
    """
    Exactly rounded sum of real terms along the first axis.

    The terms are first ordered by increasing magnitude so that the result
    does not depend on the order in which they were produced.

    Parameters
    ----------
    terms : array, shape (n_terms,) or (n_terms, n_components)
        Real terms to be summed.

    Returns
    -------
    total : float or array, shape (n_components,)
        The sum of the terms for each component.
    """
    terms = np.asarray(terms, dtype=float)
    if terms.ndim == 1:
        return math.fsum(terms[np.argsort(np.abs(terms), kind='stable')])

    order = np.argsort(np.abs(terms), axis=0, kind='stable')
    ordered = np.take_along_axis(terms, order, axis=0)
    return np.array([math.fsum(column) for column in ordered.T])


def successive_differences(values):
    """
    Error proxy for a sequence of approximations f_N.

    As long as the approximations converge quickly, the difference between
    two consecutive approximations is dominated by the error of the first
    one. Once roundoff takes over, both errors have the same magnitude, so
    the proxy also captures the turn from decay to growth.

    Parameters
    ----------
    values : list of (N, value)
        Approximations sorted by N. Values can be scalars or arrays.

    Returns
    -------
    proxies : list of (N, error)
        ``|f_N - f_next| / |f_next|`` (maximum norm) for all but the last N.
    """
    proxies = []
    for (n, current), (_, following) in zip(values[:-1], values[1:]):
        try:
            proxies.append((n, relative_error(current, following)))
        except ValueError:
            proxies.append((n, np.nan))
    return proxies


def fit_rate(Ns, errors):
    """
    Least-squares slope of log(error) against N.

    Parameters
    ----------
    Ns : array-like
        Node counts.
    errors : array-like
        Positive errors for each node count. Non-finite or non-positive
        values are ignored.

    Returns
    -------
    rate : float
        The fitted slope; exponential convergence O(exp(-cN)) gives -c.
    """
    Ns = np.asarray(Ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    valid = np.isfinite(errors) & (errors > 0)
    if np.count_nonzero(valid) < 2:
        raise ValueError("At least two positive errors are needed to fit a rate")

    slope, _ = np.polyfit(Ns[valid], np.log(errors[valid]), deg=1)
    return float(slope)
