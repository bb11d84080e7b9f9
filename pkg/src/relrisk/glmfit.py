"""Log-binomial regression on the outcome or on its complement.

Fitting ``log Pr[Y=1] = X beta`` gives an exposure coefficient that
exponentiates to an adjusted risk ratio. Fitting the same model to ``1 - Y``
gives an adjusted survival ratio. :func:`auto_link` picks between the two
from the crude direction of effect: RR for exposures that lower risk, SR for
exposures that raise it.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CollinearDesign, EmptyMargin, NotConverged, SeparationDetected
from .measures import RiskPair, TwoByTwoTable

MU_MAX = 1 - 1e-10
COEF_TOL = 1e-10
LOGLIK_RTOL = 1e-12
MAX_ITER = 200
MAX_HALVINGS = 60
POLISH_STEPS = 3
# fitted means this close to 0 or 1 after convergence signal a boundary MLE
SEPARATION_EPS = 1e-8

REFERENCE_LEVELS = ("outcome", "complement")


@dataclass
class RegressionDataset:
    """Individual or aggregated rows of exposure ``a``, outcome ``y`` and indicator covariates.

    ``weights`` act as frequency weights, so a 2x2 table can be passed as
    four rows weighted by their counts.
    """

    a: np.ndarray
    y: np.ndarray
    x: np.ndarray = None
    weights: np.ndarray = None
    covariate_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float).ravel()
        self.y = np.asarray(self.y, dtype=float).ravel()
        n = self.a.size
        if self.y.size != n:
            raise ValueError("a and y must have the same length")
        if self.x is None:
            self.x = np.zeros((n, 0))
        self.x = np.asarray(self.x, dtype=float).reshape(n, -1)
        if self.weights is None:
            self.weights = np.ones(n)
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.weights.size != n:
            raise ValueError("weights must have one entry per row")
        if np.any(self.weights <= 0):
            raise ValueError("row weights must be positive")
        if not self.covariate_names:
            self.covariate_names = [f"x{j + 1}" for j in range(self.x.shape[1])]
        if len(self.covariate_names) != self.x.shape[1]:
            raise ValueError("one covariate name per column is required")
        for name, col in (("a", self.a), ("y", self.y)):
            if not np.all((col == 0) | (col == 1)):
                raise ValueError(f"column {name} must be 0/1")
        if not (np.any(self.a == 1) and np.any(self.a == 0)):
            raise EmptyMargin("need at least one exposed and one unexposed row")

    @property
    def n_rows(self) -> int:
        return self.a.size

    def design(self) -> np.ndarray:
        return np.column_stack([np.ones(self.n_rows), self.a, self.x])

    @property
    def coefficient_names(self) -> list[str]:
        return ["intercept", "exposure", *self.covariate_names]

    def flipped(self) -> "RegressionDataset":
        return RegressionDataset(self.a, 1 - self.y, self.x.copy(), self.weights.copy(), list(self.covariate_names))

    def crude_risks(self) -> RiskPair:
        w, a, y = self.weights, self.a, self.y
        n1, n0 = w[a == 1].sum(), w[a == 0].sum()
        if n1 == 0 or n0 == 0:
            raise EmptyMargin("an exposure arm has zero total weight")
        return RiskPair(p0=float((w * y)[a == 0].sum() / n0), p1=float((w * y)[a == 1].sum() / n1))

    @classmethod
    def from_tables(
        cls, strata: Iterable[tuple[TwoByTwoTable, dict]], covariate_names: Sequence[str] = ()
    ) -> "RegressionDataset":
        """Aggregate rows from one 2x2 table per covariate pattern."""
        names = list(covariate_names)
        a, y, x, w = [], [], [], []
        for table, covs in strata:
            row_x = [float(covs[name]) for name in names]
            for ai, yi, count in ((1, 1, table.a1_y1), (1, 0, table.a1_y0), (0, 1, table.a0_y1), (0, 0, table.a0_y0)):
                if count > 0:
                    a.append(ai)
                    y.append(yi)
                    x.append(row_x)
                    w.append(count)
        return cls(np.array(a), np.array(y), np.array(x).reshape(len(a), len(names)), np.array(w), names)

    @classmethod
    def from_csv(cls, path) -> "RegressionDataset":
        """Read a CSV with header ``a,y,...``.

        Extra columns are covariates: 0/1 columns are used as-is, anything
        else is dummy-coded against its first level in sorted order. A
        column called ``weight`` supplies row weights.
        """
        with open(Path(path), newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            if "a" not in header or "y" not in header:
                raise ValueError("CSV header must contain columns 'a' and 'y'")
            rows = list(reader)
        if not rows:
            raise ValueError("CSV has no data rows")

        def bits(name):
            try:
                vals = [int(r[name]) for r in rows]
            except (TypeError, ValueError):
                raise ValueError(f"column {name!r} must hold integers 0/1") from None
            if any(v not in (0, 1) for v in vals):
                raise ValueError(f"column {name!r} must hold only 0/1")
            return np.array(vals, dtype=float)

        a, y = bits("a"), bits("y")
        weights = None
        cols, names = [], []
        for name in header:
            if name in ("a", "y"):
                continue
            raw = [(r[name] or "").strip() for r in rows]
            if name == "weight":
                try:
                    weights = np.array([float(v) for v in raw])
                except ValueError:
                    raise ValueError("weight column must be numeric") from None
                continue
            if set(raw) <= {"0", "1"}:
                cols.append(np.array([float(v) for v in raw]))
                names.append(name)
                continue
            levels = sorted(set(raw))
            for level in levels[1:]:
                cols.append(np.array([1.0 if v == level else 0.0 for v in raw]))
                names.append(f"{name}={level}")
        x = np.column_stack(cols) if cols else np.zeros((len(rows), 0))
        return cls(a, y, x, weights, names)


@dataclass
class FitResult:
    reference_level: str
    coefficients: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    max_fitted_probability: float
    names: list[str] = field(default_factory=list)
    std_errors: Optional[np.ndarray] = None
    score: Optional[np.ndarray] = None
    loglik_history: list[float] = field(default_factory=list)
    min_fitted_probability: float = float("nan")

    @property
    def exposure_coefficient(self) -> float:
        return float(self.coefficients[1])

    @property
    def exposure_effect(self) -> float:
        return math.exp(self.exposure_coefficient)

    @property
    def effect_label(self) -> str:
        return "adjusted RR" if self.reference_level == "outcome" else "adjusted SR"

    def as_dict(self) -> dict:
        return {
            "reference_level": self.reference_level,
            "coefficients": dict(zip(self.names, map(float, self.coefficients))),
            "std_errors": None if self.std_errors is None else dict(zip(self.names, map(float, self.std_errors))),
            "exposure_effect": self.exposure_effect,
            "effect_label": self.effect_label,
            "loglik": self.loglik,
            "converged": self.converged,
            "iterations": self.iterations,
            "max_fitted_probability": self.max_fitted_probability,
        }


def loglik(beta: np.ndarray, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    """Binomial log-likelihood with mean ``exp(X beta)``; ``-inf`` outside the feasible region."""
    eta = X @ beta
    if np.any(eta >= 0):
        return -math.inf
    mu = np.exp(eta)
    return float(np.sum(w * np.where(y == 1, eta, np.log1p(-mu))))


def loglik_change(beta: np.ndarray, delta: np.ndarray, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    """``loglik(beta + delta) - loglik(beta)`` without cancellation.

    Each row contributes ``d`` (events) or ``log((1 - mu') / (1 - mu))``
    written as ``log1p(-mu * expm1(d) / (1 - mu))`` (non-events), where ``d``
    is the change in the linear predictor. Differencing two full
    log-likelihoods loses the sign of tiny gains near the optimum.
    """
    eta = X @ beta
    d = X @ delta
    if np.any(eta + d >= 0):
        return -math.inf
    mu = np.exp(eta)
    ratio = -mu * np.expm1(d) / (1 - mu)
    return float(np.sum(w * np.where(y == 1, d, np.log1p(ratio))))


def score(beta: np.ndarray, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    mu = np.exp(X @ beta)
    return X.T @ (w * (y - mu) / (1 - mu))


def _information(mu: np.ndarray, X: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Expected (Fisher) information; IRLS working weights ``w * mu / (1 - mu)``."""
    W = w * mu / (1 - mu)
    return X.T @ (X * W[:, None])


def _observed_information(mu: np.ndarray, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    # events contribute nothing: their log-likelihood is linear in eta
    W = w * (1 - y) * mu / (1 - mu) ** 2
    return X.T @ (X * W[:, None])


def _newton_step(beta, X, y, w) -> np.ndarray:
    """Observed-information step, falling back to Fisher scoring when singular.

    Fisher scoring converges only linearly under the log link; the observed
    information restores quadratic convergence near the optimum.
    """
    mu = np.exp(X @ beta)
    u = score(beta, X, y, w)
    H = _observed_information(mu, X, y, w)
    if np.linalg.matrix_rank(H) == H.shape[0]:
        step = np.linalg.solve(H, u)
        if np.all(np.isfinite(step)):
            return step
    return np.linalg.solve(_information(mu, X, w), u)


def _check_rank(X: np.ndarray):
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise CollinearDesign(f"design matrix with {X.shape[1]} columns has rank {np.linalg.matrix_rank(X)}")


def fit_log_binomial(d: RegressionDataset, reference_level: str = "outcome") -> FitResult:
    """Maximum-likelihood log-binomial fit by IRLS with step-halving.

    ``reference_level="complement"`` fits ``1 - y``, so the exponentiated
    exposure coefficient is a survival ratio. Steps are halved until every
    fitted mean stays at or below ``1 - 1e-10`` and the log-likelihood does
    not drop. Stops when coefficients move less than 1e-10 or the relative
    log-likelihood change is below 1e-12; after 200 iterations it warns with
    :class:`NotConverged` and returns ``converged=False``.
    """
    if reference_level not in REFERENCE_LEVELS:
        raise ValueError(f"reference_level must be one of {REFERENCE_LEVELS}, got {reference_level!r}")
    X = d.design()
    y = d.y if reference_level == "outcome" else 1 - d.y
    w = d.weights
    _check_rank(X)

    pbar = float(np.clip(np.sum(w * y) / np.sum(w), 1e-6, 1 - 1e-6))
    beta = np.zeros(X.shape[1])
    beta[0] = math.log(pbar)
    ll = loglik(beta, X, y, w)
    history = [ll]
    converged = False
    iterations = 0

    polish_left = POLISH_STEPS
    while iterations < MAX_ITER:
        iterations += 1
        step = _newton_step(beta, X, y, w)
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = beta + t * step
            if np.all(np.exp(X @ trial) <= MU_MAX):
                gain = loglik_change(beta, t * step, X, y, w)
                if gain >= 0:
                    break
            t *= 0.5
        else:
            # no ascent direction left at machine precision
            converged = converged or bool(np.max(np.abs(t * step)) < COEF_TOL)
            break
        ll_trial = ll + gain
        change = float(np.max(np.abs(trial - beta)))
        rel = gain / max(abs(ll), 1e-300)
        beta, ll = trial, ll_trial
        history.append(ll)
        if change < COEF_TOL:
            converged = True
            break
        if rel < LOGLIK_RTOL:
            # large samples flatten the likelihood; a few more Newton steps
            # bring the score down to round-off
            converged = True
            if polish_left == 0:
                break
            polish_left -= 1

    mu = np.exp(X @ beta)
    result = FitResult(
        reference_level=reference_level,
        coefficients=beta,
        loglik=loglik(beta, X, y, w),
        converged=converged,
        iterations=iterations,
        max_fitted_probability=float(mu.max()),
        names=d.coefficient_names,
        score=score(beta, X, y, w),
        loglik_history=history,
        min_fitted_probability=float(mu.min()),
    )
    try:
        result.std_errors = np.sqrt(np.diag(np.linalg.inv(_information(mu, X, w))))
    except np.linalg.LinAlgError:
        result.std_errors = None

    if not converged:
        warnings.warn(
            f"log-binomial fit ({reference_level}) did not converge in {MAX_ITER} iterations",
            NotConverged,
            stacklevel=2,
        )
    elif mu.max() >= 1 - SEPARATION_EPS or mu.min() <= SEPARATION_EPS:
        raise SeparationDetected(
            f"fitted means pinned at the boundary (min={mu.min():.3g}, max={mu.max():.12g}); "
            "the maximum-likelihood estimate lies on the edge of the parameter space"
        )
    return result


def auto_link(d: RegressionDataset) -> FitResult:
    """Fit on the outcome if the crude risk does not rise with exposure, else on its complement."""
    crude = d.crude_risks()
    level = "outcome" if crude.p1 <= crude.p0 else "complement"
    return fit_log_binomial(d, level)


def loglik_compare(d: RegressionDataset) -> tuple[float, float]:
    """Maximized log-likelihoods of the main-effects fit on each reference level."""
    return fit_log_binomial(d, "outcome").loglik, fit_log_binomial(d, "complement").loglik


def simulated_strata_dataset(
    pattern,
    q: float,
    baseline_risks: Sequence[float],
    n_per_stratum: int,
    seed: int,
    treat_probability: float = 0.5,
) -> RegressionDataset:
    """Randomized-trial data from a switch model, one stratum per background risk.

    Stratum ``k`` is simulated with seed ``seed + k`` and enters the design as
    indicator columns ``stratum=k`` (stratum 0 is the reference).
    """
    from .switchmodel import SwitchModel, observed_table, simulate_cohort

    k = len(baseline_risks)
    names = [f"stratum={j}" for j in range(1, k)]
    strata = []
    for j, r in enumerate(baseline_risks):
        cohort = simulate_cohort(SwitchModel(pattern, q, r), n_per_stratum, seed + j)
        table = observed_table(cohort, treat_probability, seed + j)
        strata.append((table, {name: float(name == f"stratum={j}") for name in names}))
    return RegressionDataset.from_tables(strata, names)
