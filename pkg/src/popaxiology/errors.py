"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): bad input
(``ValidationError``, exit 2) and well-formed input on which the requested
quantity does not exist (``NumericDomainError``, exit 3).
"""


class AxiologyError(Exception):
    pass


class ValidationError(AxiologyError, ValueError):
    pass


class NumericDomainError(AxiologyError, ArithmeticError):
    pass


class RankStatisticsUnavailable(ValidationError):
    """Rank-based operation requested on a population with fractional counts."""


class NoValueFunction(ValidationError):
    """The axiology is an ordering without a real-valued representation."""


class RestrictionViolated(ValidationError):
    def __init__(self, predicate: str, detail: str = ""):
        self.predicate = predicate
        msg = f"restriction violated: {predicate}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UncoveredCombination(ValidationError):
    """No convergence result covers this family/background pairing."""


class ThresholdUndefined(NumericDomainError):
    pass


class PresetDomainError(NumericDomainError):
    """A function preset was evaluated or inverted outside its domain."""


class NoIndifference(NumericDomainError):
    """Cost solver found no sign change inside its bracket."""
