"""Exception hierarchy.  Every mathematical failure carries its witness."""


class GerbeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GerbeError, ValueError):
    """Malformed input (bad shapes, out-of-range indices, bad JSON)."""


class SizeLimitExceeded(GerbeError):
    """A configurable resource cap was hit."""


class OrderLimitExceeded(SizeLimitExceeded):
    pass


class WitnessError(GerbeError):
    """A mathematical check failed; ``witness`` names the offending data."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAssociative(WitnessError):
    pass


class NoIdentity(WitnessError):
    pass


class NotInvertible(WitnessError):
    pass


class NotAbelian(WitnessError):
    pass


class NotCentral(WitnessError):
    pass


class NotSubgroup(WitnessError):
    pass


class NotACocycle(WitnessError):
    pass


class DomainMismatch(WitnessError):
    pass


class InvalidAction(WitnessError):
    pass


class NotEquivariant(WitnessError):
    pass


class NoSolutionAtLevel(GerbeError):
    """A linear solve over (1/level)Z/Z had no solution.

    ``stage`` is set by multi-stage pipelines (e.g. ``"beta"`` or ``"gamma"``).
    """

    def __init__(self, message, level, stage=None):
        super().__init__(message)
        self.level = level
        self.stage = stage


class InternalVerificationFailed(GerbeError):
    pass


class RestrictionNotCharacter(WitnessError):
    pass


class EtaSolveFailed(WitnessError):
    def __init__(self, message, witness=None, level=None):
        super().__init__(message, witness)
        self.level = level


class CompatibilityFailed(WitnessError):
    pass


class ComparisonNotIso(WitnessError):
    pass


class ClassMismatch(WitnessError):
    pass


class NotNondegenerate(WitnessError):
    pass


class LevelTooCoarse(WitnessError):
    pass
