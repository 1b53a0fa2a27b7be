"""Exception taxonomy shared by every solver stage.

Each error carries the name of the stage that raised it so batch front ends
can report where a solve broke down.
"""


class KGError(ValueError):
    """Base class for all numerical failures raised by this package."""

    def __init__(self, message="", *, stage=None, **details):
        super().__init__(message)
        self.stage = stage
        self.details = details

    @property
    def kind(self):
        return type(self).__name__

    def at(self, stage):
        """Record the pipeline stage unless a more specific one is already set."""
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class DomainError(KGError):
    pass


class SupercriticalCoupling(KGError):
    pass


class UnsupportedPotential(KGError):
    pass


class NoRealExpansion(KGError):
    pass


class NonpositiveQ(KGError):
    pass


class ComplexLeadingEnergy(KGError):
    pass


class ImaginaryFrequency(KGError):
    pass


class NoBracket(KGError):
    pass


class MaximumNotMinimum(KGError):
    pass


class BranchInconsistent(KGError):
    pass


class DegenerateDenominator(KGError):
    pass


class NotConfining(KGError):
    pass


class BracketExhausted(KGError):
    pass
