"""
Contour families for the deformed Bromwich integral.

A contour is described on the level of the normalized function zeta(theta),
-pi <= theta <= pi. The quadrature nodes are obtained by scaling with N / t,
which is only applied in :meth:`_BaseContour.nodes`.
"""

import numpy as np

from ._check import (
    check_cotangent_coefficients, check_rational_coefficients,
    check_node_count, check_time
)
from .errors import ContourDomainError


# Below this value of |alpha * theta|, theta * cot(alpha * theta) is evaluated
# by its Taylor series to avoid the 0 / 0 cancellation near the apex
SERIES_THRESHOLD = 1e-2


def _theta_cot(theta, alpha):
    """theta * cot(alpha * theta) and its derivative with respect to theta."""
    x = alpha * theta
    small = np.abs(x) < SERIES_THRESHOLD
    value = np.empty_like(theta)
    slope = np.empty_like(theta)

    # x cot(x) = 1 - x^2/3 - x^4/45 - 2x^6/945 - ...
    xs = x[small]
    x2 = xs * xs
    value[small] = (1 - x2 / 3 - x2 * x2 / 45 - 2 * x2 ** 3 / 945) / alpha
    slope[small] = -2 * xs / 3 - 4 * xs * x2 / 45 - 4 * xs * x2 * x2 / 315

    xl = x[~small]
    k = np.round(xl.real / np.pi)
    if np.any((k != 0) & (np.abs(xl - k * np.pi) < 1e-12)):
        raise ContourDomainError(
            f"The cotangent contour with alpha={alpha} has a pole at "
            f"theta = k * pi / alpha, k != 0"
        )
    sin_x = np.sin(xl)
    cot_x = np.cos(xl) / sin_x
    value[~small] = theta[~small] * cot_x
    slope[~small] = cot_x - xl / sin_x ** 2

    return value, slope


class NodeSet:
    """
    Quadrature nodes of the N-panel midpoint rule on a scaled contour.

    Attributes
    ----------
    N : int
        The number of nodes.
    t : float
        The time at which the inverse is evaluated.
    thetas : array, shape (N,)
        Midpoints theta_k = -pi + (k - 1/2) 2 pi / N, k = 1, ..., N.
    z : array, shape (N,)
        Nodes z(theta_k) = (N / t) zeta(theta_k).
    dz : array, shape (N,)
        Derivatives z'(theta_k) = (N / t) zeta'(theta_k).

    Notes
    -----
    The arrays are read-only. The lower half is filled from the upper half,
    so ``z[::-1] == conj(z)`` and ``dz[::-1] == -conj(dz)`` hold exactly.
    For odd N the middle node is theta = 0, i.e., the apex of the contour
    on the positive real axis.
    """

    def __init__(self, N, t, thetas, z, dz):
        self.N = N
        self.t = t
        self.thetas = thetas
        self.z = z
        self.dz = dz
        for arr in (self.thetas, self.z, self.dz):
            arr.flags.writeable = False

    def __repr__(self):
        return f'<NodeSet | N={self.N} | t={self.t:g}>'

    def __len__(self):
        return self.N

    @property
    def upper(self):
        """Indices of the nodes with theta > 0."""
        return np.arange(self.N - self.N // 2, self.N)

    @property
    def center(self):
        """Index of the node theta = 0 (odd N only), otherwise None."""
        return self.N // 2 if self.N % 2 else None


class _BaseContour:
    """
    An abstract class representing a family of Hankel contours zeta(theta).

    Subclasses implement the evaluation of zeta and its analytic derivative
    for (arrays of) complex theta.
    """
    kind = "base"

    def _zeta(self, theta):
        raise NotImplementedError(
            'The _zeta() method should be implemented in a subclass.'
        )

    def _zeta_prime(self, theta):
        raise NotImplementedError(
            'The _zeta_prime() method should be implemented in a subclass.'
        )

    @property
    def zeta0(self):
        raise NotImplementedError(
            'The zeta0 property should be implemented in a subclass.'
        )

    def zeta(self, theta):
        """
        Evaluate the contour at (complex) theta.

        Parameters
        ----------
        theta : complex or array
            Parameter value(s).

        Returns
        -------
        out : complex or array
            zeta(theta), with the removable singularity at theta = 0 filled in.

        Raises
        ------
        ContourDomainError
            If theta lies on a pole of the contour formula.
        """
        theta = np.asarray(theta, dtype=complex)
        return self._zeta(np.atleast_1d(theta)).reshape(theta.shape)[()]

    def zeta_prime(self, theta):
        """
        Evaluate the analytic derivative zeta'(theta).

        Raises
        ------
        ContourDomainError
            If theta lies on a pole of the contour formula.
        """
        theta = np.asarray(theta, dtype=complex)
        return self._zeta_prime(np.atleast_1d(theta)).reshape(theta.shape)[()]

    def nodes(self, N, t):
        """
        Midpoint nodes of the contour scaled by N / t.

        Parameters
        ----------
        N : int
            The number of nodes.
        t : float
            The time at which the inverse is evaluated.

        Returns
        -------
        nodes : NodeSet
            The nodes and the derivatives of the contour at the nodes.
        """
        N = check_node_count(N)
        t = check_time(t)

        n_upper = N // 2
        h = 2 * np.pi / N
        k = np.arange(N - n_upper + 1, N + 1)
        upper = -np.pi + (k - 0.5) * h

        scale = N / t
        z_upper = scale * self._zeta(upper.astype(complex))
        dz_upper = scale * self._zeta_prime(upper.astype(complex))

        center = np.zeros(N % 2)
        z_center = scale * self._zeta(center.astype(complex)).real + 0j
        dz_center = 1j * scale * self._zeta_prime(center.astype(complex)).imag

        thetas = np.concatenate([-upper[::-1], center, upper])
        z = np.concatenate([np.conj(z_upper[::-1]), z_center, z_upper])
        dz = np.concatenate([-np.conj(dz_upper[::-1]), dz_center, dz_upper])

        return NodeSet(N, t, thetas, z, dz)


class CotangentContour(_BaseContour):
    """
    The modified Talbot contour

        zeta(theta) = -sigma + mu theta cot(alpha theta) + nu i theta.

    Attributes
    ----------
    sigma, mu, nu : float
        Shift and scale coefficients, mu > 0 and nu > 0.
    alpha : float
        Truncation parameter in (0, 1]; alpha = 1 is Talbot's original contour.
    c : float or None
        The decay rate (error O(exp(-cN))) that the coefficients were derived
        for, if known.
    """
    kind = "cotangent"

    def __init__(self, sigma, mu, nu, alpha, c=None):
        check_cotangent_coefficients(sigma, mu, nu, alpha)

        self.sigma = float(sigma)
        self.mu = float(mu)
        self.nu = float(nu)
        self.alpha = float(alpha)
        self.c = None if c is None else float(c)

    def __repr__(self):
        return (f'<CotangentContour | sigma={self.sigma:.4f}, mu={self.mu:.4f}, '
                f'nu={self.nu:.4f}, alpha={self.alpha:.4f}>')

    @property
    def zeta0(self):
        return -self.sigma + self.mu / self.alpha

    def _zeta(self, theta):
        value, _ = _theta_cot(theta, self.alpha)
        return -self.sigma + self.mu * value + 1j * self.nu * theta

    def _zeta_prime(self, theta):
        _, slope = _theta_cot(theta, self.alpha)
        return self.mu * slope + 1j * self.nu


class RationalContour(_BaseContour):
    """
    Rational replacement of the cotangent contour

        zeta(theta) = a + b theta^2 / (theta^2 - d pi^2) + e i theta.

    Attributes
    ----------
    a, b, d, e : float
        Coefficients of the contour, d > 1.
    c : float or None
        The decay rate that the coefficients were derived for, if known.
    """
    kind = "rational"

    def __init__(self, a, b, d, e, c=None):
        check_rational_coefficients(a, b, d, e)

        self.a = float(a)
        self.b = float(b)
        self.d = float(d)
        self.e = float(e)
        self.c = None if c is None else float(c)

    def __repr__(self):
        return (f'<RationalContour | a={self.a:.4f}, b={self.b:.4f}, '
                f'd={self.d:.4f}, e={self.e:.4f}>')

    @property
    def zeta0(self):
        return self.a

    def _denominator(self, theta):
        pole = self.d * np.pi ** 2
        denominator = theta * theta - pole
        if np.any(np.abs(denominator) < 1e-12 * pole):
            raise ContourDomainError(
                f"The rational contour with d={self.d} has a pole at "
                f"theta^2 = d * pi^2"
            )
        return denominator

    def _zeta(self, theta):
        theta2 = theta * theta
        return self.a + self.b * theta2 / self._denominator(theta) + 1j * self.e * theta

    def _zeta_prime(self, theta):
        pole = self.d * np.pi ** 2
        return -2 * self.b * pole * theta / self._denominator(theta) ** 2 + 1j * self.e


def zeta(params, theta):
    """Evaluate zeta(theta) for the provided contour."""
    return params.zeta(theta)


def zeta_prime(params, theta):
    """Evaluate zeta'(theta) for the provided contour."""
    return params.zeta_prime(theta)


def nodes(params, N, t):
    """Midpoint nodes of the provided contour, see :meth:`_BaseContour.nodes`."""
    return params.nodes(N, t)
