"""Exception hierarchy shared by all modules."""


class FrstrError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(FrstrError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleAtOne(DomainError):
    """zeta(s) was requested at its pole s = 1."""


class AccuracyNotReachable(FrstrError, ArithmeticError):
    """The requested accuracy cannot be met with the given settings."""


class NoSignChange(FrstrError, ValueError):
    """A root bracket does not contain a sign change."""


class EmptyInput(FrstrError, ValueError):
    pass


class NonpositiveLength(FrstrError, ValueError):
    pass


class SpecInvalid(FrstrError, ValueError):
    """A self-similar specification violates its invariants."""


class DegenerateRange(FrstrError, ValueError):
    pass


class PoleHit(FrstrError, ZeroDivisionError):
    """A closed-form zeta was evaluated on (or numerically at) a pole."""


class WindowTooCoarse(FrstrError, RuntimeError):
    """Box subdivision hit its depth limit with unresolved winding numbers."""


class AsymmetricInput(FrstrError, ValueError):
    """A list of complex dimensions is not closed under conjugation."""


class NewtonDivergence(FrstrError, RuntimeError):
    pass


class InsufficientSpan(FrstrError, ValueError):
    pass


class TruncationRequired(FrstrError, ValueError):
    """A non-compact test function needs an explicit truncation policy."""


class NotPrime(FrstrError, ValueError):
    pass


class DomainTooSmall(FrstrError, ValueError):
    """An integration domain misses part of the effective mass."""


class QuadratureFailure(FrstrError, RuntimeError):
    pass


class ExtrapolationUnstable(FrstrError, RuntimeError):
    pass


class Inconclusive(FrstrError, RuntimeError):
    pass


class UsageError(FrstrError):
    """Command line misuse; maps to exit status 2."""

    def __init__(self, message: str, flag: str | None = None):
        super().__init__(message)
        self.flag = flag
