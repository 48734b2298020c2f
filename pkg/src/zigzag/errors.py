"""Exception hierarchy shared by every module of the package."""


class ZigZagError(Exception):
    """Base class for all package errors."""


class PreconditionError(ZigZagError, ValueError):
    """An operation was called outside its domain."""


class DivisionByZero(ZigZagError, ZeroDivisionError):
    pass


class PrimeMismatch(PreconditionError):
    pass


class NotPrime(PreconditionError):
    pass


class NegativeValuation(PreconditionError):
    pass


class NonSquareResidue(PreconditionError):
    pass


class OddValuation(PreconditionError):
    pass


class SlopeOutOfRange(PreconditionError):
    pass


class NonHalfIntegralSlope(PreconditionError):
    pass


class WeightCongruenceViolation(PreconditionError):
    pass


class WeightBelowBase(PreconditionError):
    pass


class DegenerateWeight(PreconditionError):
    pass


class UnknownFactor(PreconditionError):
    pass


class ZeroInverse(ZigZagError, ZeroDivisionError):
    pass


class ZeroLambda(PreconditionError):
    pass


class LevelUnavailable(ZigZagError):
    """Full-Galois comparison requested on a class that only carries inertia data."""


class FamilyError(PreconditionError):
    pass


class ParseError(ZigZagError, ValueError):
    pass


class InsufficientPrecision(ZigZagError, ArithmeticError):
    """The capped computation cannot certify the requested quantity.

    ``bound`` is the certified lower bound on the valuation of the
    quantity in question (a :class:`~zigzag.padic.HalfInt`).
    """

    def __init__(self, bound, message=None):
        self.bound = bound
        super().__init__(message or f"valuation is only known to be >= {bound}")
