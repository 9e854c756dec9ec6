"""
This module contains all functions that check the input provided
by the user:

 - node counts, times and ranges of node counts
 - coefficients of the contour families
 - lists of errors used for detecting the critical node count
 - roundoff control policies
"""

import numbers
import numpy as np


def check_node_count(N, name='N'):
    """
    Check that the number of quadrature nodes is a positive integer.

    Parameters
    ----------
    N : int
        The value to be checked.
    name : str, optional
        The name of the argument, used in the error message.

    Returns
    -------
    N : int
        The checked value converted to a Python integer.

    Raises
    ------
    ValueError
        If N is not an integer or not positive.
    """
    if isinstance(N, bool) or not isinstance(N, numbers.Integral):
        raise ValueError(f"Expected {name} to be an integer, got {type(N).__name__}")

    if N < 1:
        raise ValueError(f"Expected {name} to be a positive integer, got {N}")

    return int(N)


def check_time(t):
    """
    Check that the time at which the inverse is evaluated is positive
    and finite.

    Raises
    ------
    ValueError
        If t is not a positive finite number.
    """
    if not isinstance(t, numbers.Real) or isinstance(t, bool):
        raise ValueError(f"Expected t to be a real number, got {type(t).__name__}")

    if not np.isfinite(t) or t <= 0:
        raise ValueError(f"Expected t to be positive and finite, got {t}")

    return float(t)


def check_positive(value, name):
    """
    Check that a real parameter (e.g., lambda, c or r of a transform)
    is positive and finite.
    """
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ValueError(f"Expected {name} to be a real number, got {type(value).__name__}")

    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"Expected {name} to be positive, got {value}")

    return float(value)


def check_n_range(start, stop, step=1):
    """
    Check a range of node counts given as (start, stop, step) with
    an inclusive stop value.

    Returns
    -------
    Ns : list of int
        All node counts in the range.

    Raises
    ------
    ValueError
        If the range is empty or the step is not a positive integer.
    """
    start = check_node_count(start, 'the first N')
    stop = check_node_count(stop, 'the last N')
    step = check_node_count(step, 'the step of N')

    if stop < start:
        raise ValueError(
            f"The range of N is empty: the last N ({stop}) is smaller than "
            f"the first one ({start})"
        )

    return list(range(start, stop + 1, step))


def check_cotangent_coefficients(sigma, mu, nu, alpha):
    """
    Check the coefficients of the cotangent contour.

    Raises
    ------
    ValueError
        If alpha is not in (0, 1] or mu, nu are not positive.
    """
    for name, value in zip(['sigma', 'mu', 'nu', 'alpha'], [sigma, mu, nu, alpha]):
        if not np.isfinite(value):
            raise ValueError(f"Expected {name} to be finite, got {value}")

    if not 0 < alpha <= 1:
        raise ValueError(f"Expected alpha to be in (0, 1], got {alpha}")

    if mu <= 0 or nu <= 0:
        raise ValueError(f"Expected mu and nu to be positive, got mu={mu}, nu={nu}")


def check_rational_coefficients(a, b, d, e):
    """
    Check the coefficients of the rational contour.

    Raises
    ------
    ValueError
        If d <= 1, i.e., the pole of the rational term lies inside
        the parameter interval [-pi, pi].
    """
    for name, value in zip(['a', 'b', 'd', 'e'], [a, b, d, e]):
        if not np.isfinite(value):
            raise ValueError(f"Expected {name} to be finite, got {value}")

    if d <= 1:
        raise ValueError(
            f"Expected d to be larger than 1 so that the pole of the rational "
            f"term lies outside [-pi, pi], got {d}"
        )


def check_errors_list(errors, min_length=6):
    """
    Check a list of (N, relative_error) pairs used for detecting the
    critical node count.

    Returns
    -------
    Ns, values : arrays
        The node counts and the corresponding errors.

    Raises
    ------
    ValueError
        If the list is too short, not sorted by N, or contains no
        positive errors.
    """
    if len(errors) < min_length:
        raise ValueError(
            f"Expected at least {min_length} (N, error) pairs, got {len(errors)}"
        )

    Ns = np.array([n for n, _ in errors], dtype=int)
    values = np.array([e for _, e in errors], dtype=float)
    if np.any(np.diff(Ns) <= 0):
        raise ValueError("Expected the errors to be sorted by increasing N")

    if not np.any(np.isfinite(values) & (values > 0)):
        raise ValueError("Expected at least one positive finite error")

    return Ns, values


def check_roundoff_policy(policy):
    """
    Parse the roundoff control policy.

    Accepted values are ``'off'``, ``'auto'`` and ``'k0=<value>'``, the latter
    optionally followed by ``',from=<N>'`` to set the first node count that
    uses the stabilized parameters.

    Returns
    -------
    mode : str
        ``'off'``, ``'auto'`` or ``'fixed'``.
    k0 : float or None
        The provided value of k0 for the fixed mode.
    n_from : int or None
        The first node count that uses stabilized parameters, if provided.

    Raises
    ------
    ValueError
        If the policy cannot be parsed.
    """
    if not isinstance(policy, str):
        raise ValueError(f"Expected the roundoff policy to be a string, got {type(policy).__name__}")

    policy = policy.strip().lower()
    if policy in ('off', 'auto'):
        return policy, None, None

    fields = dict()
    for chunk in policy.split(','):
        key, sep, value = chunk.partition('=')
        if not sep:
            raise ValueError(
                f"Could not parse the roundoff policy '{policy}', expected "
                f"'off', 'auto' or 'k0=<value>[,from=<N>]'"
            )
        fields[key.strip()] = value.strip()

    unknown = set(fields) - {'k0', 'from'}
    if 'k0' not in fields or unknown:
        raise ValueError(
            f"Could not parse the roundoff policy '{policy}', expected "
            f"'off', 'auto' or 'k0=<value>[,from=<N>]'"
        )

    try:
        k0 = float(fields['k0'])
        n_from = int(fields['from']) if 'from' in fields else None
    except ValueError:
        raise ValueError(f"Could not parse the numbers in the roundoff policy '{policy}'")

    check_positive(k0, 'k0')
    if n_from is not None:
        check_node_count(n_from, 'the first stabilized N')

    return 'fixed', k0, n_from
