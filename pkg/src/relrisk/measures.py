"""Relative-risk effect measures: compute, invert, and estimate from 2x2 tables.

Every measure takes a :class:`RiskPair` ``(p0, p1)`` of counterfactual risks,
untreated and treated. The functions use plain arithmetic only, so passing
:class:`fractions.Fraction` risks gives exact rational results, which the
test-suite uses to check identities without floating-point slack.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.stats import norm

from .errors import EmptyMargin, NotClosed, UndefinedMeasure, ZeroCell


class EffectScale(str, enum.Enum):
    RISK_RATIO = "rr"
    SURVIVAL_RATIO = "sr"
    RISK_DIFFERENCE = "rd"
    ODDS_RATIO = "or"
    RELATIVE_RISK_REDUCTION = "rrr"
    RELATIVE_SURVIVAL_REDUCTION = "rsr"
    SWITCH_SELECTED = "switch"
    GRRR = "grrr"

    @classmethod
    def from_name(cls, name: str) -> "EffectScale":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scale {name!r}; expected one of {valid}") from None


def _is_probability(x) -> bool:
    return 0 <= x <= 1


@dataclass(frozen=True)
class RiskPair:
    """Outcome risk without treatment (``p0``) and with treatment (``p1``)."""

    p0: float
    p1: float

    def __post_init__(self):
        if not (_is_probability(self.p0) and _is_probability(self.p1)):
            raise ValueError(f"risks must lie in [0, 1], got p0={self.p0!r}, p1={self.p1!r}")


@dataclass(frozen=True)
class MeasureValue:
    """A number tagged with the scale it lives on.

    ``selected`` is only used by :attr:`EffectScale.SWITCH_SELECTED` and names
    which relative-risk variant (RR or SR) the switch rule picked.
    """

    scale: EffectScale
    value: float
    selected: Optional[EffectScale] = None

    def __post_init__(self):
        s, v = self.scale, self.value
        if v != v:
            raise ValueError("measure value is NaN")
        if s in (EffectScale.RISK_RATIO, EffectScale.SURVIVAL_RATIO, EffectScale.ODDS_RATIO):
            ok = v >= 0
        elif s in (EffectScale.RISK_DIFFERENCE, EffectScale.GRRR):
            ok = -1 <= v <= 1
        elif s in (EffectScale.RELATIVE_RISK_REDUCTION, EffectScale.RELATIVE_SURVIVAL_REDUCTION):
            ok = v <= 1
        else:
            if self.selected not in (EffectScale.RISK_RATIO, EffectScale.SURVIVAL_RATIO):
                raise ValueError("a switch-selected value must record RR or SR as its selection")
            # p1 <= p0 gives RR <= 1, p1 > p0 gives SR < 1
            ok = 0 <= v <= 1
        if not ok:
            raise ValueError(f"value {v!r} is outside the range of scale {s.value}")
        if self.selected is not None and s is not EffectScale.SWITCH_SELECTED:
            raise ValueError("only switch-selected values carry a selection")


@dataclass(frozen=True)
class TwoByTwoTable:
    """Exposure-by-outcome counts. ``a1_y0`` = treated without the outcome, etc."""

    a1_y1: int
    a1_y0: int
    a0_y1: int
    a0_y0: int

    KEYS = ("a1_y1", "a1_y0", "a0_y1", "a0_y0")

    def __post_init__(self):
        for key in self.KEYS:
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"{key} must be a nonnegative integer, got {v!r}")

    @property
    def n_treated(self) -> int:
        return self.a1_y1 + self.a1_y0

    @property
    def n_untreated(self) -> int:
        return self.a0_y1 + self.a0_y0

    @classmethod
    def from_dict(cls, d: dict) -> "TwoByTwoTable":
        missing = [k for k in cls.KEYS if k not in d]
        extra = sorted(set(d) - set(cls.KEYS))
        if missing or extra:
            raise ValueError(f"2x2 table keys must be exactly {cls.KEYS}; missing={missing} extra={extra}")
        return cls(**{k: d[k] for k in cls.KEYS})

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.KEYS}


@dataclass(frozen=True)
class ConfidenceInterval:
    low: float
    high: float
    level: float
    estimate: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.level < 1:
            raise ValueError(f"level must be in (0, 1), got {self.level}")
        if self.low > self.high:
            raise ValueError("interval bounds are reversed")


# ---------------------------------------------------------------------------
# Point measures


def risk_ratio(rp: RiskPair) -> MeasureValue:
    if rp.p0 == 0:
        raise UndefinedMeasure("risk ratio undefined: untreated risk is 0")
    return MeasureValue(EffectScale.RISK_RATIO, rp.p1 / rp.p0)


def survival_ratio(rp: RiskPair) -> MeasureValue:
    if rp.p0 == 1:
        raise UndefinedMeasure("survival ratio undefined: untreated risk is 1")
    return MeasureValue(EffectScale.SURVIVAL_RATIO, (1 - rp.p1) / (1 - rp.p0))


def relative_risk_reduction(rp: RiskPair) -> MeasureValue:
    """``1 - RR``: the prevented fraction when no one is caused by treatment."""
    return MeasureValue(EffectScale.RELATIVE_RISK_REDUCTION, 1 - risk_ratio(rp).value)


def relative_survival_reduction(rp: RiskPair) -> MeasureValue:
    """``1 - SR``: the harmed fraction when no one is prevented by treatment."""
    return MeasureValue(EffectScale.RELATIVE_SURVIVAL_REDUCTION, 1 - survival_ratio(rp).value)


def abbott_formula(rp: RiskPair) -> MeasureValue:
    """Abbott's corrected mortality ``(p1 - p0) / (1 - p0)``.

    Same quantity as :func:`relative_survival_reduction`; kept under the
    entomology name so callers can ask for it directly.
    """
    return relative_survival_reduction(rp)


def cheng_power(rp: RiskPair, direction: str) -> MeasureValue:
    """Causal power in the Power PC sense.

    ``direction="generative"`` returns ``(p1 - p0) / (1 - p0)``;
    ``direction="preventive"`` returns ``(p0 - p1) / p0``.
    """
    if direction == "generative":
        return relative_survival_reduction(rp)
    if direction == "preventive":
        return relative_risk_reduction(rp)
    raise ValueError(f"direction must be 'generative' or 'preventive', got {direction!r}")


def risk_difference(rp: RiskPair) -> MeasureValue:
    return MeasureValue(EffectScale.RISK_DIFFERENCE, rp.p1 - rp.p0)


def odds_ratio(rp: RiskPair) -> MeasureValue:
    if rp.p0 == 0 or rp.p0 == 1 or rp.p1 == 1:
        raise UndefinedMeasure(f"odds ratio undefined at p0={rp.p0}, p1={rp.p1}")
    return MeasureValue(EffectScale.ODDS_RATIO, (rp.p1 / (1 - rp.p1)) / (rp.p0 / (1 - rp.p0)))


def switch_select(rp: RiskPair) -> MeasureValue:
    """RR when treatment does not raise risk, SR when it does.

    At ``p1 == p0`` both equal 1 and RR is chosen.
    """
    if rp.p1 <= rp.p0:
        chosen = risk_ratio(rp)
    else:
        chosen = survival_ratio(rp)
    return MeasureValue(EffectScale.SWITCH_SELECTED, chosen.value, selected=chosen.scale)


def grrr(rp: RiskPair) -> MeasureValue:
    """Generalized relative risk reduction on [-1, 1].

    ``1 - RR`` when risk does not increase, ``SR - 1`` when it does; positive
    values are risk reductions.
    """
    if rp.p1 <= rp.p0:
        value = 1 - risk_ratio(rp).value
    else:
        value = survival_ratio(rp).value - 1
    return MeasureValue(EffectScale.GRRR, value)


MEASURES: dict[EffectScale, Callable[[RiskPair], MeasureValue]] = {
    EffectScale.RISK_RATIO: risk_ratio,
    EffectScale.SURVIVAL_RATIO: survival_ratio,
    EffectScale.RISK_DIFFERENCE: risk_difference,
    EffectScale.ODDS_RATIO: odds_ratio,
    EffectScale.RELATIVE_RISK_REDUCTION: relative_risk_reduction,
    EffectScale.RELATIVE_SURVIVAL_REDUCTION: relative_survival_reduction,
    EffectScale.SWITCH_SELECTED: switch_select,
    EffectScale.GRRR: grrr,
}


def compute(scale: EffectScale, rp: RiskPair) -> MeasureValue:
    return MEASURES[EffectScale(scale)](rp)


# ---------------------------------------------------------------------------
# Transport


# implied risks within this distance of [0, 1] are rounding noise, not non-closure
CLOSURE_TOL = 1e-12


def _closed(p1, scale: EffectScale):
    if _is_probability(p1):
        return p1
    if -CLOSURE_TOL <= p1 <= 1 + CLOSURE_TOL:
        return _clip(p1)
    raise NotClosed(f"{scale.value} transport implies p1 = {p1!r}, outside [0, 1]", implied=p1)


def _clip(p1):
    # Only for scales that are closed in exact arithmetic; absorbs rounding.
    return min(max(p1, 0), 1)


def apply_measure(p0: float, m: MeasureValue) -> float:
    """Predict the treated risk from a baseline risk and an effect measure.

    Returns the ``p1`` for which ``m`` computed on ``(p0, p1)`` gives back
    ``m``. RR, SR, RD, RRR and RSR are not closed on [0, 1]: an implied risk
    out of range raises :class:`NotClosed` and is never clamped. GRRR and
    switch-selected values always land in [0, 1]; on a degenerate baseline
    (``p0 = 0`` on the benefit branch, ``p0 = 1`` on the harm branch) they
    return ``p1 = p0``.
    """
    if not _is_probability(p0):
        raise ValueError(f"baseline risk must lie in [0, 1], got {p0!r}")
    s, v = m.scale, m.value
    if s is EffectScale.RISK_RATIO:
        if p0 == 0:
            raise UndefinedMeasure("risk ratio cannot be applied to a zero baseline risk")
        return _closed(p0 * v, s)
    if s is EffectScale.RELATIVE_RISK_REDUCTION:
        if p0 == 0:
            raise UndefinedMeasure("relative risk reduction cannot be applied to a zero baseline risk")
        return _closed(p0 - v * p0, s)
    if s is EffectScale.SURVIVAL_RATIO:
        if p0 == 1:
            raise UndefinedMeasure("survival ratio cannot be applied to a baseline risk of 1")
        return _closed(1 - (1 - p0) * v, s)
    if s is EffectScale.RELATIVE_SURVIVAL_REDUCTION:
        if p0 == 1:
            raise UndefinedMeasure("relative survival reduction cannot be applied to a baseline risk of 1")
        return _closed(p0 + v * (1 - p0), s)
    if s is EffectScale.RISK_DIFFERENCE:
        return _closed(p0 + v, s)
    if s is EffectScale.ODDS_RATIO:
        if p0 == 0 or p0 == 1:
            raise UndefinedMeasure("odds ratio cannot be applied to a baseline risk of 0 or 1")
        odds = v * p0 / (1 - p0)
        return _closed(odds / (1 + odds), s)
    if s is EffectScale.GRRR:
        if v >= 0:
            return _clip(p0 - v * p0)
        return _clip(p0 - v * (1 - p0))
    if s is EffectScale.SWITCH_SELECTED:
        if m.selected is EffectScale.RISK_RATIO:
            return _clip(p0 * v)
        return _clip(1 - (1 - p0) * v)
    raise ValueError(f"unsupported scale {s!r}")


def swap_outcome_labels(rp: RiskPair) -> RiskPair:
    """Recode the outcome so that events become non-events and vice versa."""
    return RiskPair(1 - rp.p0, 1 - rp.p1)


# ---------------------------------------------------------------------------
# Estimation from counts


def estimate_risks(t: TwoByTwoTable) -> RiskPair:
    if t.n_treated == 0 or t.n_untreated == 0:
        raise EmptyMargin(f"both exposure arms need observations (treated={t.n_treated}, untreated={t.n_untreated})")
    return RiskPair(p0=t.a0_y1 / t.n_untreated, p1=t.a1_y1 / t.n_treated)


def wald_ci(t: TwoByTwoTable, scale: EffectScale, level: float = 0.95) -> ConfidenceInterval:
    """Log-scale Wald interval for RR, SR or OR.

    RR: ``SE^2 = 1/a1_y1 - 1/n1 + 1/a0_y1 - 1/n0``; SR swaps events and
    non-events; OR sums the reciprocals of the four cells. Zero cells raise
    :class:`ZeroCell` rather than being corrected.
    """
    scale = EffectScale(scale)
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0, 1), got {level}")
    rp = estimate_risks(t)
    n1, n0 = t.n_treated, t.n_untreated
    if scale is EffectScale.RISK_RATIO:
        cells = {"a1_y1": t.a1_y1, "a0_y1": t.a0_y1}
    elif scale is EffectScale.SURVIVAL_RATIO:
        cells = {"a1_y0": t.a1_y0, "a0_y0": t.a0_y0}
    elif scale is EffectScale.ODDS_RATIO:
        cells = t.to_dict()
    else:
        raise ValueError(f"Wald intervals are only provided for rr, sr and or, not {scale.value}")
    zero = [k for k, v in cells.items() if v == 0]
    if zero:
        raise ZeroCell(f"cells {zero} are zero; the log-scale standard error is infinite")

    if scale is EffectScale.RISK_RATIO:
        est = risk_ratio(rp).value
        var = 1 / t.a1_y1 - 1 / n1 + 1 / t.a0_y1 - 1 / n0
    elif scale is EffectScale.SURVIVAL_RATIO:
        est = survival_ratio(rp).value
        var = 1 / t.a1_y0 - 1 / n1 + 1 / t.a0_y0 - 1 / n0
    else:
        est = (t.a1_y1 * t.a0_y0) / (t.a1_y0 * t.a0_y1)
        var = 1 / t.a1_y1 + 1 / t.a1_y0 + 1 / t.a0_y1 + 1 / t.a0_y0
    z = norm.ppf(0.5 + level / 2)
    half = z * math.sqrt(max(var, 0.0))
    log_est = math.log(est)
    return ConfidenceInterval(math.exp(log_est - half), math.exp(log_est + half), level, estimate=est)
