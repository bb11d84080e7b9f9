import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relrisk import glmfit as G
from relrisk import measures as M
from relrisk.errors import CollinearDesign, EmptyMargin, NotConverged, SeparationDetected
from relrisk.glmfit import RegressionDataset, auto_link, fit_log_binomial, loglik_compare
from relrisk.measures import TwoByTwoTable


def two_group(table):
    return RegressionDataset.from_tables([(table, {})])


def central_difference(beta, X, y, w, h=1e-6):
    grad = np.empty_like(beta)
    for j in range(beta.size):
        e = np.zeros_like(beta)
        e[j] = h
        grad[j] = (G.loglik(beta + e, X, y, w) - G.loglik(beta - e, X, y, w)) / (2 * h)
    return grad


@pytest.fixture(scope="module")
def sp_data():
    return G.simulated_strata_dataset("sufficient-preventive", 0.3, [0.2, 0.6], 10**5, seed=2024)


@pytest.fixture(scope="module")
def sc_data():
    return G.simulated_strata_dataset("sufficient-causal", 0.3, [0.2, 0.6], 10**5, seed=2024)


def test_saturated_outcome_fit():
    fit = fit_log_binomial(two_group(TwoByTwoTable(30, 70, 60, 40)), "outcome")
    assert fit.converged
    assert fit.coefficients[0] == pytest.approx(math.log(0.6), abs=1e-8)
    assert fit.exposure_coefficient == pytest.approx(math.log(0.5), abs=1e-8)
    assert fit.effect_label == "adjusted RR"


def test_saturated_complement_fit():
    fit = fit_log_binomial(two_group(TwoByTwoTable(30, 70, 60, 40)), "complement")
    assert fit.exposure_coefficient == pytest.approx(math.log(1.75), abs=1e-8)
    assert fit.effect_label == "adjusted SR"


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 400), st.integers(5, 400), st.data())
def test_saturated_fit_reproduces_sample_ratios(n1, n0, data):
    k1 = data.draw(st.integers(1, n1 - 1))
    k0 = data.draw(st.integers(1, n0 - 1))
    table = TwoByTwoTable(k1, n1 - k1, k0, n0 - k0)
    rp = M.estimate_risks(table)
    d = two_group(table)
    assert fit_log_binomial(d, "outcome").exposure_effect == pytest.approx(M.risk_ratio(rp).value, rel=1e-8)
    assert fit_log_binomial(d, "complement").exposure_effect == pytest.approx(M.survival_ratio(rp).value, rel=1e-8)


def test_saturated_stratified_design():
    # two strata with full interaction are saturated too: each stratum's RR
    # is recovered by a stratum-specific exposure column
    t0, t1 = TwoByTwoTable(20, 80, 40, 60), TwoByTwoTable(30, 20, 45, 5)
    strata = [(t0, {"s": 0, "a_s": 0}), (t1, {"s": 1, "a_s": 0})]
    d = RegressionDataset.from_tables(strata, ["s", "a_s"])
    # fill the interaction column by hand: a * s
    d.x[:, 1] = d.a * d.x[:, 0]
    fit = fit_log_binomial(d, "outcome")
    assert fit.exposure_effect == pytest.approx(M.risk_ratio(M.estimate_risks(t0)).value, rel=1e-8)
    rr1 = math.exp(fit.coefficients[1] + fit.coefficients[3])
    assert rr1 == pytest.approx(M.risk_ratio(M.estimate_risks(t1)).value, rel=1e-8)


@pytest.mark.parametrize("level", G.REFERENCE_LEVELS)
def test_gradient_matches_finite_differences(level):
    d = two_group(TwoByTwoTable(30, 70, 60, 40))
    fit = fit_log_binomial(d, level)
    X, w = d.design(), d.weights
    y = d.y if level == "outcome" else 1 - d.y
    assert np.max(np.abs(fit.score)) < 1e-6
    fd = central_difference(fit.coefficients, X, y, w)
    # at the optimum both are ~0: compare on an absolute floor of 1
    assert np.all(np.abs(fd - fit.score) <= 1e-4 * np.maximum(1.0, np.abs(fit.score)))
    # away from the optimum the score is large and the relative check bites
    for shift in ([-0.1, 0.05], [0.02, -0.2], [-0.3, -0.1]):
        beta = fit.coefficients + np.array(shift)
        analytic = G.score(beta, X, y, w)
        fd = central_difference(beta, X, y, w)
        assert np.all(np.abs(fd - analytic) <= 1e-4 * np.abs(analytic))


def test_loglik_change_matches_difference():
    d = two_group(TwoByTwoTable(30, 70, 60, 40))
    X, y, w = d.design(), d.y, d.weights
    beta = np.array([-0.6, -0.5])
    delta = np.array([0.01, -0.03])
    direct = G.loglik(beta + delta, X, y, w) - G.loglik(beta, X, y, w)
    assert G.loglik_change(beta, delta, X, y, w) == pytest.approx(direct, rel=1e-9)


def test_likelihood_never_decreases(sp_data, sc_data):
    for d in (sp_data, sc_data):
        for level in G.REFERENCE_LEVELS:
            hist = fit_log_binomial(d, level).loglik_history
            assert all(b >= a for a, b in zip(hist, hist[1:]))


def test_label_swap_duality(sp_data):
    for d in (two_group(TwoByTwoTable(30, 70, 60, 40)), sp_data):
        a = fit_log_binomial(d, "complement")
        b = fit_log_binomial(d.flipped(), "outcome")
        assert np.allclose(a.coefficients, b.coefficients, atol=1e-10, rtol=0)


def test_fitted_means_valid(sp_data):
    fit = fit_log_binomial(sp_data, "outcome")
    mu = np.exp(sp_data.design() @ fit.coefficients)
    assert np.all(mu > 0) and np.all(mu <= 1)
    assert fit.max_fitted_probability == pytest.approx(mu.max())


def test_sufficient_preventive_strata(sp_data):
    fit = fit_log_binomial(sp_data, "outcome")
    assert fit.converged
    assert abs(fit.exposure_coefficient - math.log(0.7)) <= 3 * fit.std_errors[1]
    ll_out, ll_comp = loglik_compare(sp_data)
    assert ll_out >= ll_comp


def test_sufficient_causal_strata(sc_data):
    fit = fit_log_binomial(sc_data, "complement")
    assert abs(fit.exposure_coefficient - math.log(0.7)) <= 3 * fit.std_errors[1]
    ll_out, ll_comp = loglik_compare(sc_data)
    assert ll_comp >= ll_out


def test_loglik_compare_saturated_equal():
    ll_out, ll_comp = loglik_compare(two_group(TwoByTwoTable(30, 70, 60, 40)))
    assert ll_out == pytest.approx(ll_comp, abs=1e-9)


@pytest.mark.parametrize(
    "table, level",
    [
        (TwoByTwoTable(30, 70, 60, 40), "outcome"),
        (TwoByTwoTable(60, 40, 20, 80), "complement"),
        (TwoByTwoTable(40, 60, 40, 60), "outcome"),
    ],
)
def test_auto_link(table, level):
    assert auto_link(two_group(table)).reference_level == level


def test_auto_link_on_simulated_causal(sc_data):
    assert auto_link(sc_data).reference_level == "complement"


def test_collinear_design():
    d = two_group(TwoByTwoTable(30, 70, 60, 40))
    d2 = RegressionDataset(d.a, d.y, d.a.reshape(-1, 1), d.weights, ["copy_of_a"])
    with pytest.raises(CollinearDesign):
        fit_log_binomial(d2)


def test_separation_all_events():
    # every exposed person has the outcome: the RR MLE puts mu = 1 on the boundary
    d = two_group(TwoByTwoTable(50, 0, 20, 30))
    with pytest.raises(SeparationDetected):
        fit_log_binomial(d, "outcome")


def test_separation_no_events():
    d = two_group(TwoByTwoTable(0, 50, 20, 30))
    with pytest.raises(SeparationDetected):
        fit_log_binomial(d, "outcome")


def test_not_converged_warns(monkeypatch):
    monkeypatch.setattr(G, "MAX_ITER", 1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fit = fit_log_binomial(two_group(TwoByTwoTable(30, 70, 60, 40)))
    assert not fit.converged
    assert any(issubclass(w.category, NotConverged) for w in caught)


def test_dataset_validation():
    with pytest.raises(EmptyMargin):
        RegressionDataset([1, 1], [0, 1])
    with pytest.raises(ValueError):
        RegressionDataset([0, 1], [0, 2])
    with pytest.raises(ValueError):
        RegressionDataset([0, 1], [0, 1], weights=[1, 0])
    with pytest.raises(ValueError):
        fit_log_binomial(two_group(TwoByTwoTable(1, 1, 1, 1)), "logit")


def test_csv_reader(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,y,site,female\n1,0,north,1\n0,1,south,0\n1,1,east,0\n0,0,north,1\n")
    d = RegressionDataset.from_csv(path)
    assert d.covariate_names == ["site=north", "site=south", "female"]
    assert d.x.shape == (4, 3)
    assert d.x[:, 0].tolist() == [1, 0, 0, 1]


def test_csv_individual_rows_match_weighted(tmp_path):
    table = TwoByTwoTable(30, 70, 60, 40)
    lines = ["a,y"] + ["1,1"] * 30 + ["1,0"] * 70 + ["0,1"] * 60 + ["0,0"] * 40
    path = tmp_path / "rows.csv"
    path.write_text("\n".join(lines) + "\n")
    a = fit_log_binomial(RegressionDataset.from_csv(path))
    b = fit_log_binomial(two_group(table))
    assert np.allclose(a.coefficients, b.coefficients, atol=1e-10)
    assert a.loglik == pytest.approx(b.loglik, abs=1e-8)


@pytest.mark.parametrize("text", ["x,y\n1,0\n", "a,y\n", "a,y\n1,2\n0,1\n", "a,y\n1,z\n0,1\n"])
def test_csv_malformed(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ValueError):
        RegressionDataset.from_csv(path)
