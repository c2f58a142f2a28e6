"""Population axiologies, their large-background limits, and catastrophe-cost measures."""

from .errors import (
    AxiologyError,
    NoIndifference,
    NoValueFunction,
    NumericDomainError,
    PresetDomainError,
    RankStatisticsUnavailable,
    RestrictionViolated,
    ThresholdUndefined,
    UncoveredCombination,
    ValidationError,
)
from .population import (
    Distribution,
    Population,
    PopulationSummary,
    add,
    covers,
    distribution,
    is_moderate,
    mad,
    mad_point,
    pigou_dalton,
    qam,
    scale,
    sorted_welfare,
    summarize,
)
from .axiologies import AxiologySpec, ComparisonResult, Family, Ordering, compare, evaluate, vv2_dominance
from .limits import (
    ConvergenceReport,
    FixedAverage,
    FixedDistribution,
    LimitCounterpart,
    Restriction,
    au_threshold,
    convergence_scan,
    limit_counterpart,
    marginal_value,
    numeric_weighting,
    repugnant_background,
)
from .xrisk import Scenario, Table1Parameters, XRiskReport, generic_cost_solver, mic, moc, regime_approx, table1, vdr

__version__ = "0.1.0"

__all__ = [
    "AxiologyError", "NoIndifference", "NoValueFunction", "NumericDomainError", "PresetDomainError",
    "RankStatisticsUnavailable", "RestrictionViolated", "ThresholdUndefined", "UncoveredCombination",
    "ValidationError",
    "Distribution", "Population", "PopulationSummary", "add", "covers", "distribution", "is_moderate",
    "mad", "mad_point", "pigou_dalton", "qam", "scale", "sorted_welfare", "summarize",
    "AxiologySpec", "ComparisonResult", "Family", "Ordering", "compare", "evaluate", "vv2_dominance",
    "ConvergenceReport", "FixedAverage", "FixedDistribution", "LimitCounterpart", "Restriction",
    "au_threshold", "convergence_scan", "limit_counterpart", "marginal_value", "numeric_weighting",
    "repugnant_background",
    "Scenario", "Table1Parameters", "XRiskReport", "generic_cost_solver", "mic", "moc", "regime_approx",
    "table1", "vdr",
]
