"""
Exceptions raised when a numerical step of the inversion fails.

Invalid user input is reported with a plain ``ValueError`` from
:mod:`talbotinv._check`; the classes below describe failures that only show
up while computing (a pole hit by a node, a solver that does not converge,
an overflowing exponential factor, and so on). All of them derive from
:class:`TalbotError` so that callers (e.g., the command-line interface) can
tell numerical failures apart from usage errors.
"""


class TalbotError(Exception):
    """Base class for all numerical failures in talbotinv."""


class ContourDomainError(TalbotError, ValueError):
    """A contour or a transform was evaluated on a pole or a branch cut."""


class SingularConfigurationError(TalbotError, ValueError):
    """The closed-form contour coefficients cannot be computed."""


class ConvergenceError(TalbotError, RuntimeError):
    """An iterative solver or a truncated series did not converge."""


class OutOfRangeError(TalbotError, ValueError):
    """A solver left the admissible region of its unknowns."""


class TransformEvaluationError(TalbotError, RuntimeError):
    """The transform could not be evaluated at one of the quadrature nodes."""

    def __init__(self, message, index=None, z=None):
        super().__init__(message)
        self.index = index
        self.z = z


class NodeOverflowError(TalbotError, OverflowError):
    """The exponential factor exp(z t) overflows at some quadrature node."""


class NoTurnDetectedError(TalbotError, ValueError):
    """An error curve decays monotonically, so no critical N can be found."""


class CertificationError(TalbotError, RuntimeError):
    """Two independent inversions of the same transform disagree."""
