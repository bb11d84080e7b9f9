"""Response types and the two monotonicity identities for RR and SR.

Each individual has a pair of potential outcomes ``(Y^0, Y^1)``:

========== ===== =====
type        Y^0   Y^1
========== ===== =====
doomed       1     1
causal       0     1
preventive   1     0
immune       0     0
========== ===== =====
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyPopulation, MonotonicityViolated, UndefinedMeasure
from .measures import RiskPair

SUM_TOL = 1e-12

# (y0, y1) for each type, in field order
TYPE_OUTCOMES = {
    "doomed": (1, 1),
    "causal": (0, 1),
    "preventive": (1, 0),
    "immune": (0, 0),
}


def classify(y0: int, y1: int) -> str:
    for name, outcomes in TYPE_OUTCOMES.items():
        if outcomes == (y0, y1):
            return name
    raise ValueError(f"potential outcomes must be bits, got ({y0!r}, {y1!r})")


@dataclass(frozen=True)
class ResponseTypeDistribution:
    doomed: float
    causal: float
    preventive: float
    immune: float

    def __post_init__(self):
        parts = (self.doomed, self.causal, self.preventive, self.immune)
        if any(not 0 <= x <= 1 for x in parts):
            raise ValueError(f"prevalences must lie in [0, 1], got {parts}")
        if abs(sum(parts) - 1) > SUM_TOL:
            raise ValueError(f"prevalences must sum to 1, got {sum(parts)!r}")


@dataclass(frozen=True)
class PopulationCounts:
    n_doomed: int
    n_causal: int
    n_preventive: int
    n_immune: int

    def __post_init__(self):
        for name in ("n_doomed", "n_causal", "n_preventive", "n_immune"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.n_doomed + self.n_causal + self.n_preventive + self.n_immune

    def as_dict(self) -> dict:
        return {
            "doomed": self.n_doomed,
            "causal": self.n_causal,
            "preventive": self.n_preventive,
            "immune": self.n_immune,
        }


def marginal_risks(d: ResponseTypeDistribution) -> RiskPair:
    return RiskPair(p0=d.doomed + d.preventive, p1=d.doomed + d.causal)


def monotonicity_check(d: ResponseTypeDistribution, direction: str) -> bool:
    """Exact check: ``no_causation`` needs zero causal types, ``no_prevention`` zero preventive types."""
    if direction == "no_causation":
        return d.causal == 0
    if direction == "no_prevention":
        return d.preventive == 0
    raise ValueError(f"direction must be 'no_causation' or 'no_prevention', got {direction!r}")


def proportion_prevented(d: ResponseTypeDistribution) -> float:
    """Share of would-be cases (untreated) in whom treatment prevents the outcome.

    Requires no causal types; under that assumption it equals ``1 - RR``.
    """
    if not monotonicity_check(d, "no_causation"):
        raise MonotonicityViolated(f"causal prevalence is {d.causal}, not 0")
    denom = d.doomed + d.preventive
    if denom == 0:
        raise UndefinedMeasure("nobody would have the outcome untreated")
    return d.preventive / denom


def proportion_harmed(d: ResponseTypeDistribution) -> float:
    """Share of would-be survivors (untreated) whom treatment harms; ``1 - SR`` under no prevention."""
    if not monotonicity_check(d, "no_prevention"):
        raise MonotonicityViolated(f"preventive prevalence is {d.preventive}, not 0")
    denom = d.causal + d.immune
    if denom == 0:
        raise UndefinedMeasure("nobody would be free of the outcome untreated")
    return d.causal / denom


def enumerate_population(c: PopulationCounts) -> ResponseTypeDistribution:
    n = c.total
    if n == 0:
        raise EmptyPopulation("population has no individuals")
    return ResponseTypeDistribution(
        doomed=c.n_doomed / n,
        causal=c.n_causal / n,
        preventive=c.n_preventive / n,
        immune=c.n_immune / n,
    )


def individuals(c: PopulationCounts) -> list[tuple[int, int]]:
    """Expand counts into one ``(y0, y1)`` pair per person, in type order."""
    out = []
    for name, k in c.as_dict().items():
        out.extend([TYPE_OUTCOMES[name]] * k)
    return out
