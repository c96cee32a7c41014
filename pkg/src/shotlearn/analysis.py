"""Closed-form risk-bound curves, budget allocation, and bias-variance splits.

The learner's explicit-risk guarantee decomposes into five error sources:
approximation (``eps1``, with envelope ``M``), two data-sampling terms,
a complexity term, and a label-sampling term that is the only one helped
by extra shots.  With all leading constants set to one the bound is

    L*Delta*sqrt(eps1) + L*Delta*M*eps2 + L*B*Delta*eps3
        + L*B*eps4 + Delta^2*eps5,

    eps2 = (log(1/delta)/n1)^(1/4),        eps3 = sqrt(1/n1),
    eps4 = sqrt(sigma_bar*log(1/delta)/(n1*ns)),
    eps5 = sqrt(log(1/delta)/n1).

With zero approximation error it collapses to three constants,

    c1*sqrt(1/n1) + c2*sqrt(1/(n1*ns)) + c3*sqrt(1/n1),

and under a fixed measurement budget ``ntot = n*(ns + gamma)`` (each
parameter change costing ``gamma`` extra shots) the optimal shot count is
``ns* = (c2*gamma/(c1 + c3))^(2/3)``.  These are curve shapes for study,
not certified numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .learner import TrainedHypothesis, predict, target_values


class InfeasibleBudgetError(ValueError):
    """The measurement budget cannot fund at least one training point."""


class DegenerateConstantsError(ValueError):
    """Constants make the requested closed form undefined."""


@dataclass(frozen=True)
class BoundConstants:
    """Inputs of the closed-form risk bounds.

    ``c1, c2, c3`` drive the three-term simplified bound and the budget
    trade-off; the remaining fields parameterize the full five-term bound
    (``L`` link Lipschitz constant, ``B`` weight-norm budget, ``Delta``
    observable norm, ``sigma_bar`` mean single-shot variance, ``delta``
    failure probability, ``eps1``/``M`` approximation error and envelope,
    ``D`` sampled-frequency count for the ridge-baseline bound, ``gamma``
    per-parameter-change shot penalty).
    """

    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    L: float = 1.0
    B: float = 1.0
    Delta: float = 1.0
    sigma_bar: float = 1.0
    delta: float = 0.01
    eps1: float = 0.0
    M: float = 0.0
    D: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        for name in ("c1", "c2", "c3", "L", "B", "Delta", "sigma_bar", "eps1", "M", "D", "gamma"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")


def simplified_constants(c: BoundConstants) -> tuple[float, float, float]:
    """(c1, c2, c3) that make the three-term bound match the full bound.

    Exactly the coefficients left by the full bound at ``eps1 = M = 0``:
    ``c1 = L*B*Delta``, ``c2 = L*B*sqrt(sigma_bar*log(1/delta))``,
    ``c3 = Delta^2*sqrt(log(1/delta))``.
    """
    lg = math.log(1.0 / c.delta)
    return (
        c.L * c.B * c.Delta,
        c.L * c.B * math.sqrt(c.sigma_bar * lg),
        c.Delta**2 * math.sqrt(lg),
    )


def risk_bound_asymmetry(c: BoundConstants, n1: int, ns: int) -> float:
    """Three-constant bound ``c1/sqrt(n1) + c2/sqrt(n1*ns) + c3/sqrt(n1)``.

    For fixed ``n1`` the bound saturates at ``(c1 + c3)/sqrt(n1)`` as
    ``ns`` grows, while it vanishes as ``n1`` grows at any fixed ``ns``.
    """
    if n1 < 1 or ns < 1:
        raise ValueError("n1 and ns must be >= 1")
    return (c.c1 + c.c3) * math.sqrt(1.0 / n1) + c.c2 * math.sqrt(1.0 / (n1 * ns))


@dataclass(frozen=True)
class FullBound:
    """Value and per-error-source breakdown of the five-term bound."""

    total: float
    terms: dict = field(default_factory=dict)
    eps: dict = field(default_factory=dict)


def risk_bound_full(c: BoundConstants, n1: int, ns: int) -> FullBound:
    """Five-term bound with its component breakdown (unit leading constants)."""
    if n1 < 1 or ns < 1:
        raise ValueError("n1 and ns must be >= 1")
    lg = math.log(1.0 / c.delta)
    eps = {
        "eps1": c.eps1,
        "eps2": (lg / n1) ** 0.25,
        "eps3": math.sqrt(1.0 / n1),
        "eps4": math.sqrt(c.sigma_bar * lg / (n1 * ns)),
        "eps5": math.sqrt(lg / n1),
    }
    terms = {
        "approximation": c.L * c.Delta * math.sqrt(c.eps1),
        "approximation_sampling": c.L * c.Delta * c.M * eps["eps2"],
        "learnability": c.L * c.B * c.Delta * eps["eps3"],
        "label_sampling": c.L * c.B * eps["eps4"],
        "data_sampling": c.Delta**2 * eps["eps5"],
    }
    return FullBound(total=sum(terms.values()), terms=terms, eps=eps)


def budget_bound(c: BoundConstants, ntot: int, ns: int) -> float:
    """Three-term bound under the budget ``n1 = ntot / (ns + gamma)``."""
    if ns < 1:
        raise ValueError("ns must be >= 1")
    if ntot < ns + c.gamma:
        raise InfeasibleBudgetError(f"budget {ntot} cannot fund one point at ns={ns}")
    ratio = (ns + c.gamma) / ntot
    return (c.c1 + c.c3) * math.sqrt(ratio) + c.c2 * math.sqrt(ratio / ns)


def optimal_shots(c: BoundConstants, ntot: int | None = None):
    """Continuous minimizer ``ns* = (c2*gamma/(c1 + c3))^(2/3)`` of the budget bound.

    With ``ntot`` supplied, also returns ``n1* = ntot / (ns* + gamma)``
    (infinite when both ``ns*`` and ``gamma`` vanish).  Experiment code
    clamps ``ns*`` to ``max(1, round(ns*))`` before use.
    """
    if c.c1 + c.c3 <= 0.0:
        raise DegenerateConstantsError("c1 + c3 must be positive")
    ns_star = (c.c2 * c.gamma / (c.c1 + c.c3)) ** (2.0 / 3.0)
    if ntot is None:
        return ns_star
    n1_star = ntot / (ns_star + c.gamma) if ns_star + c.gamma > 0.0 else math.inf
    return ns_star, n1_star


def clamp_shots(ns_star: float) -> int:
    """Integer shot count actually usable for ``ns*``: at least one."""
    return max(1, int(math.floor(ns_star + 0.5)))


def erm_bound(c: BoundConstants, n1: int) -> float:
    """Ridge-baseline bound ``eps1 + D^2 * sqrt(log(1/delta)/n1)``.

    The frequency count enters quadratically here versus linearly in the
    link-composed learner's bound: dropping the link can square the data
    requirement.
    """
    if n1 < 1:
        raise ValueError("n1 must be >= 1")
    return c.eps1 + c.D**2 * math.sqrt(math.log(1.0 / c.delta) / n1)


def allocate_budget(ntot: int, ns: int, gamma: float, train_fraction: float) -> tuple[int, int]:
    """Split a measurement budget into training and validation point counts.

    ``n = floor(ntot / (ns + gamma))`` points are affordable; the
    validation share is ``n2 = max(1, round((1 - train_fraction) * n))``
    (half away from zero) and ``n1 = n - n2``.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    if ns < 1:
        raise ValueError("ns must be >= 1")
    if gamma < 0.0:
        raise ValueError("gamma must be >= 0")
    n = int(math.floor(ntot / (ns + gamma)))
    n2 = max(1, int(math.floor((1.0 - train_fraction) * n + 0.5)))
    n1 = n - n2
    if n1 < 1:
        raise InfeasibleBudgetError(
            f"budget {ntot} at ns={ns}, gamma={gamma} leaves no training points"
        )
    return n1, n2


@dataclass(frozen=True)
class BiasVarianceReport:
    """Ensemble decomposition: mean explicit risk = bias_sq + variance."""

    bias_sq: float
    variance: float
    mean_explicit_risk: float
    ensemble_size: int
    shots: int = 0


def ensemble_predictions(ensemble, test_xs) -> np.ndarray:
    """Prediction matrix, one row per ensemble member."""
    return np.stack([predict(h, test_xs) for h in ensemble])


def bias_variance(
    ensemble: list[TrainedHypothesis] | np.ndarray,
    target,
    test_xs,
    shots: int = 0,
) -> BiasVarianceReport:
    """Split ensemble-averaged explicit risk into squared bias plus variance.

    ``ensemble`` is a sequence of hypotheses or a ready prediction matrix
    of shape ``(ensemble, len(test_xs))``.  With ``hbar`` the pointwise
    ensemble-mean prediction: bias_sq averages ``(hbar - f)^2`` over the
    test points, variance averages ``(h_s - hbar)^2`` over points and
    members, and the two sum to the ensemble-mean explicit risk exactly
    (up to float roundoff).
    """
    test_xs = np.asarray(test_xs, dtype=float)
    if test_xs.size == 0:
        raise ValueError("test_xs is empty")
    preds = (
        np.asarray(ensemble, dtype=float)
        if isinstance(ensemble, np.ndarray)
        else ensemble_predictions(ensemble, test_xs)
    )
    if preds.ndim != 2 or preds.shape[0] < 2:
        raise ValueError("ensemble must contain at least two models")
    if preds.shape[1] != test_xs.size:
        raise ValueError("prediction matrix does not match test_xs")
    f_test = target_values(target, test_xs)
    hbar = preds.mean(axis=0)
    return BiasVarianceReport(
        bias_sq=float(np.mean((hbar - f_test) ** 2)),
        variance=float(np.mean((preds - hbar) ** 2)),
        mean_explicit_risk=float(np.mean((preds - f_test) ** 2)),
        ensemble_size=preds.shape[0],
        shots=shots,
    )


def bootstrap_mean_ci(
    values,
    n_boot: int = 1000,
    alpha: float = 0.05,
    seed: int = 0,
) -> tuple[float, float, float]:
    """(mean, lo, hi) percentile bootstrap interval for the mean."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("need at least two values")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, values.size, size=(n_boot, values.size))
    means = values[idx].mean(axis=1)
    lo, hi = np.quantile(means, [alpha / 2.0, 1.0 - alpha / 2.0])
    return float(values.mean()), float(lo), float(hi)


def bootstrap_bias_variance_ci(
    preds: np.ndarray,
    f_test: np.ndarray,
    n_boot: int = 1000,
    alpha: float = 0.05,
    seed: int = 0,
) -> dict:
    """Percentile bootstrap intervals for bias_sq and variance.

    Resamples ensemble members (rows of ``preds``) with replacement and
    recomputes both statistics per resample.
    """
    preds = np.asarray(preds, dtype=float)
    f_test = np.asarray(f_test, dtype=float)
    rng = np.random.default_rng(seed)
    n_models = preds.shape[0]
    bias_boot = np.empty(n_boot)
    var_boot = np.empty(n_boot)
    for k in range(n_boot):
        sample = preds[rng.integers(0, n_models, size=n_models)]
        hbar = sample.mean(axis=0)
        bias_boot[k] = np.mean((hbar - f_test) ** 2)
        var_boot[k] = np.mean((sample - hbar) ** 2)
    quants = [alpha / 2.0, 1.0 - alpha / 2.0]
    hbar_full = preds.mean(axis=0)
    return {
        "bias_sq": float(np.mean((hbar_full - f_test) ** 2)),
        "bias_sq_ci": tuple(float(q) for q in np.quantile(bias_boot, quants)),
        "variance": float(np.mean((preds - hbar_full) ** 2)),
        "variance_ci": tuple(float(q) for q in np.quantile(var_boot, quants)),
    }
