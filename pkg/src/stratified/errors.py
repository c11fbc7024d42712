"""Exception hierarchy shared by all modules."""


class StratError(Exception):
    """Base class for every error raised by this package."""


class FieldError(StratError, ValueError):
    pass


class NotPrime(FieldError):
    pass


class ReducibleModulus(FieldError):
    pass


class DegreeMismatch(FieldError):
    pass


class SpecMismatch(FieldError):
    pass


class DivisionByZero(StratError, ZeroDivisionError):
    pass


class LinAlgError(StratError, ValueError):
    pass


class Singular(LinAlgError):
    pass


class ShapeMismatch(LinAlgError):
    pass


class NoSolution(LinAlgError):
    pass


class PolyError(StratError, ValueError):
    pass


class RingMismatch(PolyError):
    pass


class UnknownVariable(PolyError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ZeroAtLaurentVariable(PolyError, ZeroDivisionError):
    pass


class ExponentOverflow(PolyError, OverflowError):
    pass


class DenominatorDivisibleByP(StratError, ValueError):
    pass


class ModuleError(StratError, ValueError):
    pass


class CutoffTooSmall(ModuleError):
    pass


class NotUnimodular(ModuleError):
    pass


class MissingAssignment(ModuleError):
    pass


class NoEmbedding(ModuleError):
    pass


class MultipleFiberVariables(ModuleError):
    pass


class NotLaurent(ModuleError):
    pass


class ProbeCheckFailed(ModuleError):
    pass


class HasBaseVariables(ModuleError):
    pass


class NotFoundWithinBound(StratError):
    """No witness of the requested degree exists.

    This is never a proof that no witness exists at all, only that none was
    found inside the searched range.
    """


class DuplicatePoints(ModuleError):
    pass


class IndexOutOfRange(ModuleError, IndexError):
    pass


class NotDecomposable(StratError):
    pass


class NotCommuting(StratError, ValueError):
    pass


class WindowTooLarge(StratError, ValueError):
    pass


class UnsupportedShape(ModuleError):
    pass


class FormatError(StratError, ValueError):
    """Malformed or schema-invalid document."""
