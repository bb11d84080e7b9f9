import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relrisk import measures as M
from relrisk.counterfactual import (
    PopulationCounts,
    ResponseTypeDistribution,
    classify,
    enumerate_population,
    individuals,
    marginal_risks,
    monotonicity_check,
    proportion_harmed,
    proportion_prevented,
)
from relrisk.errors import EmptyPopulation, MonotonicityViolated, UndefinedMeasure

TOL = 1e-12


def dist(*p):
    return ResponseTypeDistribution(*p)


def simplex_grid(step_count=20):
    """All 4-part compositions of ``step_count``, scaled to probabilities."""
    for a in range(step_count + 1):
        for b in range(step_count + 1 - a):
            for c in range(step_count + 1 - a - b):
                d = step_count - a - b - c
                yield ResponseTypeDistribution(a / step_count, b / step_count, c / step_count, d / step_count)


@pytest.mark.parametrize(
    "d, expected",
    [
        ((0.1, 0, 0.2, 0.7), (0.3, 0.1)),
        ((0.25, 0.25, 0.25, 0.25), (0.5, 0.5)),
        ((1, 0, 0, 0), (1.0, 1.0)),
    ],
)
def test_marginal_risks(d, expected):
    rp = marginal_risks(dist(*d))
    assert (rp.p0, rp.p1) == pytest.approx(expected, abs=TOL)


def test_monotonicity_check():
    assert monotonicity_check(dist(0.1, 0, 0.2, 0.7), "no_causation")
    assert not monotonicity_check(dist(0.1, 0.05, 0.2, 0.65), "no_causation")
    assert monotonicity_check(dist(0.1, 0.05, 0, 0.85), "no_prevention")
    with pytest.raises(ValueError):
        monotonicity_check(dist(0.1, 0.05, 0, 0.85), "both")


def test_proportion_prevented_examples():
    assert proportion_prevented(dist(0.1, 0, 0.2, 0.7)) == pytest.approx(2 / 3, abs=TOL)
    assert proportion_prevented(dist(0.1, 0, 0.2, 0.7)) == pytest.approx(1 - 0.1 / 0.3, abs=TOL)
    assert proportion_prevented(dist(0.3, 0, 0, 0.7)) == 0.0
    with pytest.raises(MonotonicityViolated):
        proportion_prevented(dist(0.1, 0.1, 0.2, 0.6))
    with pytest.raises(UndefinedMeasure):
        proportion_prevented(dist(0, 0, 0, 1))


def test_proportion_harmed_examples():
    assert proportion_harmed(dist(0.2, 0.4, 0, 0.4)) == pytest.approx(0.5, abs=TOL)
    assert proportion_harmed(dist(0.2, 0, 0, 0.8)) == 0.0
    with pytest.raises(MonotonicityViolated):
        proportion_harmed(dist(0.2, 0.1, 0.1, 0.6))
    with pytest.raises(UndefinedMeasure):
        proportion_harmed(dist(1, 0, 0, 0))


def test_enumerate_population_examples():
    d = enumerate_population(PopulationCounts(1, 0, 2, 7))
    assert (d.doomed, d.causal, d.preventive, d.immune) == pytest.approx((0.1, 0, 0.2, 0.7), abs=TOL)
    assert enumerate_population(PopulationCounts(0, 0, 0, 10)) == dist(0, 0, 0, 1)
    with pytest.raises(EmptyPopulation):
        enumerate_population(PopulationCounts(0, 0, 0, 0))


def test_distribution_validation():
    with pytest.raises(ValueError):
        dist(0.5, 0.5, 0.5, 0)
    with pytest.raises(ValueError):
        dist(-0.1, 0.5, 0.3, 0.3)
    with pytest.raises(ValueError):
        PopulationCounts(1, -1, 0, 0)


def test_classify():
    assert [classify(*p) for p in [(1, 1), (0, 1), (1, 0), (0, 0)]] == ["doomed", "causal", "preventive", "immune"]
    with pytest.raises(ValueError):
        classify(2, 0)


def test_benefit_identity_on_simplex():
    checked = 0
    for d in simplex_grid():
        rp = marginal_risks(d)
        if d.causal != 0 or rp.p0 == 0:
            continue
        assert proportion_prevented(d) == pytest.approx(1 - M.risk_ratio(rp).value, abs=TOL)
        checked += 1
    assert checked == 230  # C(22, 2) - 1 compositions with causal = 0 and p0 > 0


def test_harm_identity_on_simplex():
    checked = 0
    for d in simplex_grid():
        rp = marginal_risks(d)
        if d.preventive != 0 or rp.p0 == 1:
            continue
        assert proportion_harmed(d) == pytest.approx(1 - M.survival_ratio(rp).value, abs=TOL)
        checked += 1
    assert checked == 230


def _ratio_candidates(d):
    """Every single-type prevalence divided by any group of types that contains it."""
    prevalences = {"doomed": d.doomed, "causal": d.causal, "preventive": d.preventive, "immune": d.immune}
    out = []
    names = list(prevalences)
    for t in names:
        others = [n for n in names if n != t]
        for k in range(len(others) + 1):
            for combo in itertools.combinations(others, k):
                denom = prevalences[t] + sum(prevalences[o] for o in combo)
                if denom > 0:
                    out.append(prevalences[t] / denom)
    return out


def test_relative_survival_increase_has_no_type_reading():
    # for a vaccine (no causal types), the relative increase in survival is
    # not any response-type share
    d = dist(0.1, 0, 0.2, 0.7)
    rp = marginal_risks(d)
    rel_increase = M.survival_ratio(rp).value - 1  # (0.9 - 0.7) / 0.7
    other = 1 - M.survival_ratio(rp).value
    for candidate in _ratio_candidates(d):
        assert abs(candidate - rel_increase) > 1e-6
        assert abs(candidate - other) > 1e-6


def test_relative_risk_increase_has_no_type_reading():
    d = dist(0.2, 0.4, 0, 0.4)
    rp = marginal_risks(d)
    rel_increase = M.risk_ratio(rp).value - 1  # (0.6 - 0.2) / 0.2 = 2
    for candidate in _ratio_candidates(d):
        assert abs(candidate - rel_increase) > 1e-6


@given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 12), st.integers(0, 12))
def test_enumeration_matches_direct_counting(nd, nc, np_, ni):
    counts = PopulationCounts(nd, nc, np_, ni)
    if counts.total == 0:
        return
    people = individuals(counts)
    y0 = sum(p[0] for p in people) / len(people)
    y1 = sum(p[1] for p in people) / len(people)
    rp = marginal_risks(enumerate_population(counts))
    assert rp.p0 == pytest.approx(y0, abs=TOL)
    assert rp.p1 == pytest.approx(y1, abs=TOL)
