"""Exception hierarchy shared by every module of the package."""


class S3DeformError(Exception):
    """Base class for all errors raised by s3deform."""


# p-adic layer
class NotRoot(S3DeformError, ValueError):
    pass


class NotSimpleRoot(S3DeformError, ValueError):
    pass


class NotUnit(S3DeformError, ValueError):
    pass


class PrecisionTooLow(S3DeformError, ValueError):
    pass


class SquareDiscriminant(S3DeformError, ValueError):
    pass


class BadValuation(S3DeformError, ValueError):
    pass


class WrongField(S3DeformError, ValueError):
    pass


class NoQuadraticFactor(S3DeformError, ValueError):
    pass


# number fields
class Reducible(S3DeformError, ValueError):
    pass


class IndexDivisor(S3DeformError, ValueError):
    pass


class SearchExhausted(S3DeformError, RuntimeError):
    pass


class NotFundamental(S3DeformError, ValueError):
    pass


class BoundTooLarge(S3DeformError, ValueError):
    pass


# classification
class WrongSplittingType(S3DeformError, ValueError):
    pass


class NotTotallyComplex(S3DeformError, ValueError):
    pass


class SmallPrime(S3DeformError, ValueError):
    pass


# family search
class NotPrime(S3DeformError, ValueError):
    pass


class NoSimpleRoot(S3DeformError, ArithmeticError):
    pass


class OutOfRange(S3DeformError, ValueError):
    pass


class LedgerCorrupt(S3DeformError, RuntimeError):
    pass


# S3-modules
class BadAction(S3DeformError, ValueError):
    pass


class HypothesisNotMet(S3DeformError, ValueError):
    pass


# deformation
class BadConstantTerm(S3DeformError, ValueError):
    pass


class NonzeroConstantTerm(S3DeformError, ValueError):
    pass


class NotNeat(S3DeformError, ValueError):
    pass
