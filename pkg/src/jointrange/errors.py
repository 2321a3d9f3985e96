"""Exception hierarchy shared by every module."""


class JointRangeError(Exception):
    """Base class for all errors raised by :mod:`jointrange`."""


class NotHermitian(JointRangeError, ValueError):
    pass


class NoConvergence(JointRangeError, RuntimeError):
    pass


class DimensionMismatch(JointRangeError, ValueError):
    pass


class NotUnitary(JointRangeError, ValueError):
    pass


class EmptyFamily(JointRangeError, ValueError):
    pass


class SingularMap(JointRangeError, ValueError):
    pass


class ScalarWeight(JointRangeError, ValueError):
    pass


class BadWeight(JointRangeError, ValueError):
    pass


class TooLarge(JointRangeError, ValueError):
    pass


class BadBlockSpec(JointRangeError, ValueError):
    pass


class NotProjection(JointRangeError, ValueError):
    pass


class SpectrumMismatch(JointRangeError, ValueError):
    pass


class GammaOutOfRange(JointRangeError, ValueError):
    pass


class RouteDisagreement(JointRangeError, RuntimeError):
    """Algebraic and geometric commutativity routes returned different verdicts.

    This indicates an implementation defect, never a property of the input.
    """


class NotCommutingNormal(JointRangeError):
    """Raised by :func:`simultaneous_diagonalize` when no common eigenbasis exists.

    Attributes
    ----------
    pair : tuple of int or None
        Indices of the offending pair in the Hermitian expansion, if one was found.
    residual : float
        The relative residual that exceeded the tolerance.
    """

    def __init__(self, message, pair=None, residual=float("nan")):
        super().__init__(message)
        self.pair = pair
        self.residual = residual


class ParseError(JointRangeError, ValueError):
    pass


class WrongArity(JointRangeError, ValueError):
    pass


class UnknownDemo(JointRangeError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""
