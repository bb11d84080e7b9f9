"""Switch-pattern causal mechanisms and the effect scale each one stabilizes.

A person carries a background indicator (Bernoulli ``r``) that sets the
outcome absent any treatment effect, and a switch indicator (Bernoulli ``q``,
independent of the background) that decides how treatment acts on them.
Without a switch, treatment does nothing. The four patterns:

* sufficient-causal: treatment alone produces the outcome.
* necessary-preventive: only treatment keeps the outcome away.
* sufficient-preventive: treatment alone blocks the outcome.
* necessary-causal: the outcome can only happen under treatment.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import measures as M
from .counterfactual import TYPE_OUTCOMES, PopulationCounts
from .errors import InconsistentPattern, EffectMeasureError, UndefinedMeasure
from .measures import EffectScale, RiskPair, TwoByTwoTable
from .rng import bernoulli

# rounding slack tolerated before a recovered prevalence counts as out of range
PREVALENCE_TOL = 1e-12

SWEEP_COLUMNS = ("r", "p0", "p1", "rr", "sr", "rd", "or", "grrr", "stable_scale_value")


class SwitchPatternType(str, enum.Enum):
    SUFFICIENT_CAUSAL = "sufficient-causal"
    NECESSARY_PREVENTIVE = "necessary-preventive"
    SUFFICIENT_PREVENTIVE = "sufficient-preventive"
    # printed as a second "Sufficient-causal" row in the source table; its
    # function, prevalence and stability cells all describe the necessary case
    NECESSARY_CAUSAL = "necessary-causal"

    @classmethod
    def from_name(cls, name: str) -> "SwitchPatternType":
        key = name.strip().lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown pattern {name!r}; expected one of {valid}") from None


@dataclass(frozen=True)
class SwitchModel:
    pattern: SwitchPatternType
    q: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "pattern", SwitchPatternType(self.pattern))
        if not (0 <= self.q <= 1 and 0 <= self.r <= 1):
            raise ValueError(f"q and r must lie in [0, 1], got q={self.q!r}, r={self.r!r}")


@dataclass(frozen=True)
class SimulatedCohort:
    counts: PopulationCounts
    seed: int
    n: int

    def __post_init__(self):
        if self.counts.total != self.n:
            raise ValueError(f"counts total {self.counts.total} does not match n={self.n}")


class StableScale(NamedTuple):
    scale: EffectScale
    reciprocal: bool

    def label(self) -> str:
        name = self.scale.value.upper()
        return f"1/{name}" if self.reciprocal else name


def _outcomes(pattern: SwitchPatternType, background, switch):
    # works on Python bools and numpy bool arrays alike
    b = np.asarray(background, dtype=bool)
    s = np.asarray(switch, dtype=bool)
    if pattern is SwitchPatternType.SUFFICIENT_CAUSAL:
        return b, b | s
    if pattern is SwitchPatternType.NECESSARY_PREVENTIVE:
        return b | s, b
    if pattern is SwitchPatternType.SUFFICIENT_PREVENTIVE:
        return b, b & ~s
    if pattern is SwitchPatternType.NECESSARY_CAUSAL:
        return b & ~s, b
    raise ValueError(f"unknown pattern {pattern!r}")


def potential_outcomes(pattern: SwitchPatternType, background: int, switch: int) -> tuple[int, int]:
    """``(y0, y1)`` for one person with the given background and switch bits."""
    for bit in (background, switch):
        if bit not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {bit!r}")
    y0, y1 = _outcomes(SwitchPatternType(pattern), background, switch)
    return int(y0), int(y1)


def exact_risks(m: SwitchModel) -> RiskPair:
    q, r = m.q, m.r
    p = m.pattern
    if p is SwitchPatternType.SUFFICIENT_CAUSAL:
        return RiskPair(p0=r, p1=r + q * (1 - r))
    if p is SwitchPatternType.NECESSARY_PREVENTIVE:
        return RiskPair(p0=r + q * (1 - r), p1=r)
    if p is SwitchPatternType.SUFFICIENT_PREVENTIVE:
        return RiskPair(p0=r, p1=r * (1 - q))
    return RiskPair(p0=r * (1 - q), p1=r)


def recover_prevalence(pattern: SwitchPatternType, rp: RiskPair) -> float:
    """Switch prevalence implied by a pair of risks if ``pattern`` is the only mechanism.

    Raises :class:`InconsistentPattern` when the risks move in the direction
    the pattern cannot produce.
    """
    pattern = SwitchPatternType(pattern)
    if pattern is SwitchPatternType.SUFFICIENT_CAUSAL:
        num, den = 1 - rp.p1, 1 - rp.p0
    elif pattern is SwitchPatternType.NECESSARY_PREVENTIVE:
        num, den = 1 - rp.p0, 1 - rp.p1
    elif pattern is SwitchPatternType.SUFFICIENT_PREVENTIVE:
        num, den = rp.p1, rp.p0
    else:
        num, den = rp.p0, rp.p1
    if den == 0:
        raise UndefinedMeasure(f"{pattern.value}: denominator risk is zero for {rp}")
    q = 1 - num / den
    if q < -PREVALENCE_TOL or q > 1 + PREVALENCE_TOL:
        raise InconsistentPattern(
            f"{pattern.value} implies switch prevalence {q!r} for p0={rp.p0}, p1={rp.p1}; "
            "the direction of effect contradicts the pattern"
        )
    return min(max(q, 0), 1)


_STABLE = {
    SwitchPatternType.SUFFICIENT_CAUSAL: StableScale(EffectScale.SURVIVAL_RATIO, False),
    SwitchPatternType.NECESSARY_PREVENTIVE: StableScale(EffectScale.SURVIVAL_RATIO, True),
    SwitchPatternType.SUFFICIENT_PREVENTIVE: StableScale(EffectScale.RISK_RATIO, False),
    SwitchPatternType.NECESSARY_CAUSAL: StableScale(EffectScale.RISK_RATIO, True),
}


def stable_scale(pattern: SwitchPatternType) -> StableScale:
    return _STABLE[SwitchPatternType(pattern)]


def stable_value(pattern: SwitchPatternType, rp: RiskPair) -> float:
    """The measure that the pattern holds fixed, oriented as in :func:`stable_scale`."""
    st = stable_scale(pattern)
    value = M.compute(st.scale, rp).value
    if not st.reciprocal:
        return value
    if value == 0:
        raise UndefinedMeasure(f"1/{st.scale.value} undefined: {st.scale.value} is 0")
    return 1 / value


# ---------------------------------------------------------------------------
# Stability sweep


@dataclass
class SweepTable:
    pattern: SwitchPatternType
    q: float
    rows: list[dict] = field(default_factory=list)
    # (row index, column) -> error message for cells that could not be computed
    errors: dict[tuple[int, str], str] = field(default_factory=dict)

    def column(self, name: str) -> list[Optional[float]]:
        return [row[name] for row in self.rows]

    def to_records(self) -> list[dict]:
        return [dict(row) for row in self.rows]

    def to_csv(self, precision: Optional[int] = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in self.rows:
            writer.writerow([_fmt(row[c], precision) for c in SWEEP_COLUMNS])
        return buf.getvalue()


def _fmt(x, precision: Optional[int]) -> str:
    if x is None:
        return ""
    if precision is None:
        return repr(float(x))
    return f"{x:.{precision}f}"


_SWEEP_MEASURES = {
    "rr": M.risk_ratio,
    "sr": M.survival_ratio,
    "rd": M.risk_difference,
    "or": M.odds_ratio,
    "grrr": M.grrr,
}


def stability_sweep(pattern: SwitchPatternType, q: float, baseline_risks: Sequence[float]) -> SweepTable:
    """Every measure across a list of background risks at fixed switch prevalence.

    Undefined cells are stored as ``None`` and their reason goes into
    ``SweepTable.errors``; they never abort the sweep.
    """
    pattern = SwitchPatternType(pattern)
    if len(baseline_risks) == 0:
        raise ValueError("baseline_risks must be nonempty")
    for r in baseline_risks:
        if not 0 <= r < 1:
            raise ValueError(f"baseline risks must lie in [0, 1), got {r!r}")
    table = SweepTable(pattern=pattern, q=q)
    for i, r in enumerate(baseline_risks):
        rp = exact_risks(SwitchModel(pattern, q, r))
        row = {"r": r, "p0": rp.p0, "p1": rp.p1}
        for name, fn in _SWEEP_MEASURES.items():
            try:
                row[name] = fn(rp).value
            except EffectMeasureError as exc:
                row[name] = None
                table.errors[(i, name)] = f"{type(exc).__name__}: {exc}"
        try:
            row["stable_scale_value"] = stable_value(pattern, rp)
        except EffectMeasureError as exc:
            row["stable_scale_value"] = None
            table.errors[(i, "stable_scale_value")] = f"{type(exc).__name__}: {exc}"
        table.rows.append(row)
    return table


# ---------------------------------------------------------------------------
# Monte Carlo


_TYPE_ORDER = tuple(TYPE_OUTCOMES)  # doomed, causal, preventive, immune


def _type_codes(y0: np.ndarray, y1: np.ndarray) -> np.ndarray:
    # doomed=0, causal=1, preventive=2, immune=3, matching _TYPE_ORDER
    return np.where(y0, np.where(y1, 0, 2), np.where(y1, 1, 3))


def _count_chunk(m: SwitchModel, seed: int, start: int, count: int) -> np.ndarray:
    background = bernoulli(seed, "background", start, count, m.r)
    switch = bernoulli(seed, "switch", start, count, m.q)
    y0, y1 = _outcomes(m.pattern, background, switch)
    return np.bincount(_type_codes(y0, y1), minlength=4)


def _chunks(n: int, chunk_size: int):
    return [(start, min(chunk_size, n - start)) for start in range(0, n, chunk_size)]


def simulate_cohort(
    m: SwitchModel, n: int, seed: int, *, chunk_size: int = 1 << 18, workers: int = 1
) -> SimulatedCohort:
    """Draw ``n`` people from the switch model and tally their response types.

    Person ``i`` uses draw ``i`` of the ``"background"`` and ``"switch"``
    streams for ``seed``, so ``chunk_size`` and ``workers`` never change the
    result.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if chunk_size <= 0:
        raise ValueError("chunk_size must be positive")
    parts = _chunks(n, chunk_size)
    if workers > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(lambda sc: _count_chunk(m, seed, *sc), parts))
    else:
        tallies = [_count_chunk(m, seed, start, count) for start, count in parts]
    total = np.sum(tallies, axis=0)
    counts = PopulationCounts(*(int(x) for x in total))
    return SimulatedCohort(counts=counts, seed=seed, n=n)


def observed_rows(c: SimulatedCohort, treat_probability: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Randomize treatment and reveal one potential outcome per person.

    People are laid out in type order (doomed, causal, preventive, immune);
    person ``i`` is treated when draw ``i`` of the ``"assign"`` stream falls
    below ``treat_probability``. Returns ``(a, y)`` as int8 arrays.
    """
    if not 0 < treat_probability < 1:
        raise ValueError(f"treat_probability must lie strictly in (0, 1), got {treat_probability!r}")
    sizes = [c.counts.as_dict()[name] for name in _TYPE_ORDER]
    codes = np.repeat(np.arange(4), sizes)
    y0_of = np.array([TYPE_OUTCOMES[t][0] for t in _TYPE_ORDER], dtype=np.int8)
    y1_of = np.array([TYPE_OUTCOMES[t][1] for t in _TYPE_ORDER], dtype=np.int8)
    a = bernoulli(seed, "assign", 0, c.n, treat_probability).astype(np.int8)
    y = np.where(a == 1, y1_of[codes], y0_of[codes]).astype(np.int8)
    return a, y


def observed_table(c: SimulatedCohort, treat_probability: float, seed: int) -> TwoByTwoTable:
    a, y = observed_rows(c, treat_probability, seed)
    cells = np.bincount(2 * a.astype(np.int64) + y, minlength=4)
    return TwoByTwoTable(
        a1_y1=int(cells[3]), a1_y0=int(cells[2]), a0_y1=int(cells[1]), a0_y0=int(cells[0])
    )


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)

