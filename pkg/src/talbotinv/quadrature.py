"""
Midpoint quadrature of the inverse Laplace transform on a Talbot-type contour.

For a transform F, the inverse is approximated by

    f_N(t) = 1 / (N i) sum_k exp(z_k t) F(z_k) z'_k,

where z_k are the midpoint nodes of the contour scaled by N / t. For real
valued f, only the nodes with theta > 0 (and theta = 0 for odd N) need to be
evaluated, which halves the number of evaluations of F.
"""

import numpy as np

from ._check import check_node_count, check_time
from .errors import NodeOverflowError, TalbotError, TransformEvaluationError
from .utils import compensated_sum, logger, relative_error, successive_differences


# exp(x) overflows in double precision beyond this value
LOG_REALMAX = np.log(np.finfo(float).max)


class _BaseTransform:
    """
    An abstract class representing a Laplace transform F(z) to be inverted.

    Subclasses implement the evaluation of F at an array of nodes.

    Attributes
    ----------
    name : str
        The name of the transform, used in logs and reports.
    """
    kind = "base"

    def __init__(self, name=None):
        self.name = name or 'transform'

    def __repr__(self):
        return f'<{type(self).__name__} | {self.name}>'

    def evaluate(self, z):
        raise NotImplementedError(
            'The evaluate() method should be implemented in a subclass.'
        )

    def _fail(self, index, z, err):
        message = f"Failed to evaluate {self.name} at node {index} (z={z:.6g}): {err}"
        logger.error(message)
        raise TransformEvaluationError(
            message, index=index, z=z
        ) from err


class ScalarTransform(_BaseTransform):
    """
    A transform with scalar values.

    Parameters
    ----------
    fun : callable
        The function F(z). If ``vectorized`` is True, it should accept
        an array of complex nodes and return an array of the same shape.
    name : str, optional
        The name of the transform.
    vectorized : bool, optional
        Whether ``fun`` accepts arrays. Defaults to True.
    """
    kind = "scalar"

    def __init__(self, fun, name=None, vectorized=True):
        super().__init__(name)
        self.fun = fun
        self.vectorized = vectorized

    def __call__(self, z):
        return self.fun(z)

    def _evaluate_one(self, index, z):
        try:
            value = complex(self.fun(z))
        except Exception as err:
            self._fail(index, z, err)
        if not np.isfinite(value):
            self._fail(index, z, ValueError('non-finite value'))
        return value

    def evaluate(self, z):
        """
        Evaluate the transform at the nodes.

        Parameters
        ----------
        z : array, shape (n,)
            The nodes.

        Returns
        -------
        values : array, shape (n,)
            F(z) at every node.

        Raises
        ------
        TransformEvaluationError
            If F cannot be evaluated at one of the nodes, the index of the
            first failing node is reported.
        """
        if self.vectorized:
            try:
                values = np.asarray(self.fun(z), dtype=complex)
                if values.shape == z.shape and np.all(np.isfinite(values)):
                    return values
            except Exception as err:
                logger.debug(f"Vectorized evaluation of {self.name} failed ({err}), "
                             f"evaluating node by node")

        # Evaluate node by node to locate the failure (if any)
        return np.array([self._evaluate_one(i, zi) for i, zi in enumerate(z)])


class VectorTransform(_BaseTransform):
    """
    A transform with vector values, e.g., the resolvent (zI + A)^{-1} u0.

    Parameters
    ----------
    solve : callable
        The function that maps a single complex node z to a vector
        of length ``dim``.
    dim : int
        The length of the vectors.
    name : str, optional
        The name of the transform.
    """
    kind = "vector"

    def __init__(self, solve, dim, name=None):
        super().__init__(name)
        self.solve = solve
        self.dim = check_node_count(dim, 'dim')

    def __call__(self, z):
        return self.solve(z)

    def evaluate(self, z):
        """
        Evaluate the transform at the nodes, one solve per node.

        Returns
        -------
        values : array, shape (n, dim)
            F(z) for every node in rows.
        """
        values = np.empty((z.size, self.dim), dtype=complex)
        for i, zi in enumerate(z):
            try:
                values[i] = self.solve(zi)
            except Exception as err:
                self._fail(i, zi, err)
            if not np.all(np.isfinite(values[i])):
                self._fail(i, zi, ValueError('non-finite value'))
        return values


class InversionResult:
    """
    The result of a numerical inversion.

    Attributes
    ----------
    value : float or array
        The approximation of f(t).
    N : int
        The number of quadrature nodes.
    t : float
        The time at which the inverse was evaluated.
    contour : CotangentContour or RationalContour
        The contour that was used.
    n_evaluations : int
        The number of evaluations of the transform.
    """

    def __init__(self, value, N, t, contour, n_evaluations):
        self.value = value
        self.N = N
        self.t = t
        self.contour = contour
        self.n_evaluations = n_evaluations

    def __repr__(self):
        return (f'<InversionResult | N={self.N} | t={self.t:g} | '
                f'{self.contour.kind} contour>')


def _check_overflow(z, t):
    exponent = np.max(z.real) * t
    if exponent >= LOG_REALMAX:
        raise NodeOverflowError(
            f"The factor exp(z t) overflows: max Re(z) t = {exponent:.1f} "
            f"exceeds {LOG_REALMAX:.1f}"
        )


def _weighted_terms(transform, z, dz, t):
    values = transform.evaluate(z)
    factor = np.exp(z * t) * dz
    if values.ndim == 2:
        factor = factor[:, np.newaxis]
    return factor * values


def invert(transform, contour, N, t):
    """
    Invert the transform at time t using N nodes of the contour.

    Parameters
    ----------
    transform : ScalarTransform or VectorTransform
        The transform to invert.
    contour : CotangentContour or RationalContour
        The contour, e.g., :data:`talbotinv.params.TALBOT_CONTOUR`.
    N : int
        The number of nodes.
    t : float
        The time, t > 0.

    Returns
    -------
    result : InversionResult
        The approximation of f(t). The transform is only evaluated at the
        nodes with theta >= 0, so ``result.n_evaluations == ceil(N / 2)``.

    Raises
    ------
    NodeOverflowError
        If exp(z t) overflows at one of the nodes.
    TransformEvaluationError
        If the transform cannot be evaluated at one of the nodes.
    """
    N = check_node_count(N)
    t = check_time(t)

    node_set = contour.nodes(N, t)
    idx = node_set.upper
    weights = np.full(idx.size, 2.0)
    if node_set.center is not None:
        idx = np.concatenate([[node_set.center], idx])
        weights = np.concatenate([[1.0], weights])

    z = node_set.z[idx]
    _check_overflow(z, t)
    g = _weighted_terms(transform, z, node_set.dz[idx], t)
    if g.ndim == 2:
        weights = weights[:, np.newaxis]

    value = compensated_sum(weights * g.imag) / N
    if not np.all(np.isfinite(value)):
        raise TransformEvaluationError(
            f"The inversion of {transform.name} produced non-finite values "
            f"for N={N}, t={t}"
        )

    logger.debug(f'Inverted {transform.name} at t={t:g} with N={N} '
                 f'({contour.kind} contour)')
    return InversionResult(value, N, t, contour, int(idx.size))


def invert_full_sum(transform, contour, N, t):
    """
    Invert the transform using all N nodes without the symmetry reduction.

    This variant evaluates the transform N times and is used to check
    :func:`invert`. It returns the real part of the full sum.
    """
    N = check_node_count(N)
    t = check_time(t)

    node_set = contour.nodes(N, t)
    _check_overflow(node_set.z, t)
    g = _weighted_terms(transform, node_set.z, node_set.dz, t)

    value = compensated_sum(g.imag) / N
    return InversionResult(value, N, t, contour, N)


def resolve_contour(param_source, N):
    """
    Contour to use for N nodes.

    ``param_source`` is either a contour or a callable that maps N to
    a contour (e.g., a :class:`talbotinv.roundoff.RoundoffModel`).
    """
    return param_source(N) if callable(param_source) else param_source


def sweep_values(transform, t, Ns, param_source):
    """
    Compute the approximations f_N(t) for a range of N.

    Returns
    -------
    values : list of (N, value)
        The approximations; failed inversions are recorded as NaN.
    """
    values = []
    for N in Ns:
        try:
            contour = resolve_contour(param_source, N)
            values.append((N, invert(transform, contour, N, t).value))
        except (TalbotError, np.linalg.LinAlgError) as err:
            logger.warning(f'Inversion failed for N={N}: {err}')
            values.append((N, np.nan))
    return values


def convergence_sweep(transform, reference, t, Ns, param_source):
    """
    Relative error of the inversion for a range of N.

    Parameters
    ----------
    transform : ScalarTransform or VectorTransform
        The transform to invert.
    reference : float or array
        The exact value of f(t).
    t : float
        The time.
    Ns : list of int
        The node counts, in increasing order.
    param_source : contour or callable
        A fixed contour or a function N -> contour.

    Returns
    -------
    errors : list of (N, relative_error)
        The relative error for each N (NaN if the inversion failed).
    """
    errors = []
    for N, value in sweep_values(transform, t, Ns, param_source):
        if np.all(np.isfinite(value)):
            errors.append((N, relative_error(value, reference)))
        else:
            errors.append((N, np.nan))
    return errors


def difference_sweep(transform, t, Ns, param_source):
    """
    Reference-free error proxy |f_N - f_next| / |f_next| for a range of N.

    See :func:`talbotinv.utils.successive_differences`.
    """
    return successive_differences(sweep_values(transform, t, Ns, param_source))
