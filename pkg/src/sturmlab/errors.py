"""Exception hierarchy shared by all sturmlab modules.

Every error carries an ``exit_code`` used by the CLI: 2 parse, 3 validation,
4 indeterminate (precision exhausted before a certified answer), 5 domain,
6 unknown export kind, 7 internal.
"""


class SturmlabError(Exception):
    exit_code = 7


class ParseError(SturmlabError):
    exit_code = 2


class ValidationError(SturmlabError):
    exit_code = 3


class Indeterminate(SturmlabError):
    """A certified answer could not be reached at the allowed precision."""

    exit_code = 4


class PrecisionExhausted(Indeterminate):
    pass


class TolUnreachable(Indeterminate):
    pass


class ItineraryAmbiguous(Indeterminate):
    pass


class DomainError(SturmlabError):
    exit_code = 5


class DivisionByZero(DomainError):
    pass


class IsolatorInvalid(DomainError):
    pass


class ZeroVector(DomainError):
    pass


class ConstantPolynomial(DomainError):
    pass


class RootOfUnity(DomainError):
    pass


class HeightOne(DomainError):
    pass


class BadSplit(DomainError):
    pass


class PrefixTooShort(DomainError):
    pass


class WindowTooLong(DomainError):
    pass


class NoWindow(DomainError):
    pass


class NotPaired(DomainError):
    def __init__(self, position, message=None):
        super().__init__(message or f"unpaired mismatch at position {position}")
        self.position = position


class IndexOutOfRange(DomainError):
    pass


class SharedThetaViolation(DomainError):
    pass


class DegenerateDifference(DomainError):
    pass


class PrecisionTooLow(ValidationError):
    pass


class NotOnAttractor(DomainError):
    pass


class UnknownKind(SturmlabError):
    exit_code = 6
