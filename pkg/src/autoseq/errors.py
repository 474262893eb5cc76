"""Exception hierarchy shared by all modules."""


class AutoseqError(Exception):
    """Base class; ``witness`` carries whatever evidence triggered the error."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(AutoseqError):
    pass


class ZeroInstability(AutoseqError):
    pass


class NoRepetition(AutoseqError):
    pass


class NotDivisible(AutoseqError):
    pass


class NotCoprime(AutoseqError):
    pass


class NotADivisor(AutoseqError):
    pass


class SpecInvalid(AutoseqError):
    pass


class NotMultiplicative(AutoseqError):
    pass


class PeriodUndetected(AutoseqError):
    pass


class ReconstructionMismatch(AutoseqError):
    pass


class CompositeNonPeriodic(AutoseqError):
    pass


class NoFit(AutoseqError):
    pass


class FormMismatch(AutoseqError):
    pass
