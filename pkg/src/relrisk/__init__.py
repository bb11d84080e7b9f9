"""Relative-risk effect measures, response types and switch-pattern models."""

from .counterfactual import (
    PopulationCounts,
    ResponseTypeDistribution,
    enumerate_population,
    marginal_risks,
    monotonicity_check,
    proportion_harmed,
    proportion_prevented,
)
from .errors import (
    CollinearDesign,
    EmptyMargin,
    EmptyPopulation,
    InconsistentPattern,
    MonotonicityViolated,
    NotClosed,
    NotConverged,
    SeparationDetected,
    EffectMeasureError,
    UndefinedMeasure,
    ZeroCell,
)
from .measures import (
    ConfidenceInterval,
    EffectScale,
    MeasureValue,
    RiskPair,
    TwoByTwoTable,
    abbott_formula,
    apply_measure,
    cheng_power,
    estimate_risks,
    grrr,
    odds_ratio,
    relative_risk_reduction,
    relative_survival_reduction,
    risk_difference,
    risk_ratio,
    survival_ratio,
    swap_outcome_labels,
    switch_select,
    wald_ci,
)
from .switchmodel import (
    SimulatedCohort,
    SwitchModel,
    SwitchPatternType,
    exact_risks,
    observed_table,
    potential_outcomes,
    recover_prevalence,
    simulate_cohort,
    stability_sweep,
    stable_scale,
)

__version__ = "0.1.0"
