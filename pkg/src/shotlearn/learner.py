"""Link functions, the iterative kernel learner, and the ridge baseline.

The iterative learner runs kernelized functional-gradient rounds

    alpha_i -> alpha_i + (rate / n) * (y_i - h(x_i)),
    h(x) = u(sum_i alpha_i k(x, x_i)),

records the validation empirical risk of the hypothesis after each round,
and returns the round minimizing it.  The composed link ``u`` keeps
predictions inside the label range and damps overfitting of noisy labels;
starting from zero provides implicit norm regularization.

When the feature dimension is small the same recursion is carried in
primal form ``w = sum_i alpha_i phi(x_i)`` (mathematically identical,
cost ``O(n * dim)`` per round instead of ``O(n^2)``).

The ridge baseline fits the identity-link model in closed form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .circuit import ReuploadingParams, eval_circuit
from .features import FeatureMap, feature_matrix, gram
from .fourier import FourierSeries, eval_series
from .sampling import LabeledDataset

log = logging.getLogger(__name__)

# Primal recursion is used when the feature dimension is at most this;
# beyond it the dual recursion needs the Gram matrix, which is only
# affordable up to DUAL_POINT_LIMIT training points.
PRIMAL_DIM_THRESHOLD = 4096
DUAL_POINT_LIMIT = 4096


def clip01(v):
    """Clamp to ``[0, 1]``: 0 below, identity inside, 1 above."""
    out = np.clip(v, 0.0, 1.0)
    return float(out) if np.ndim(v) == 0 else out


@dataclass(frozen=True)
class LinkFunction:
    """Non-decreasing Lipschitz output transform."""

    kind: str
    lipschitz: float = 1.0

    def __post_init__(self):
        if self.kind not in ("clip01", "identity"):
            raise ValueError(f"unknown link kind {self.kind!r}")

    def __call__(self, v):
        return clip01(v) if self.kind == "clip01" else v


CLIP01 = LinkFunction("clip01", 1.0)
IDENTITY = LinkFunction("identity", 1.0)


def link_by_name(name: str) -> LinkFunction:
    if name == "clip01":
        return CLIP01
    if name == "identity":
        return IDENTITY
    raise ValueError(f"unknown link kind {name!r}")


@dataclass(frozen=True)
class TrainedHypothesis:
    """A trained model: feature map, link, and one of two weight forms.

    Exactly one of ``weights`` (primal) and ``alphas``/``support_xs``
    (dual) is populated.  ``selected_iteration`` is the 1-based round
    whose hypothesis is stored (0 for closed-form fits); ``history`` holds
    the per-round validation risks it was selected from.  ``val_fallback``
    flags that no validation data was available and the last round was
    kept.
    """

    feature_map: FeatureMap
    link: LinkFunction
    weights: np.ndarray | None = None
    alphas: np.ndarray | None = None
    support_xs: np.ndarray | None = None
    selected_iteration: int = 0
    history: np.ndarray | None = None
    val_fallback: bool = False

    def __post_init__(self):
        primal = self.weights is not None
        dual = self.alphas is not None and self.support_xs is not None
        if primal == dual:
            raise ValueError("exactly one of primal weights and dual alphas must be set")


def predict(hyp: TrainedHypothesis, x):
    """Evaluate the hypothesis at scalar or array ``x``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if hyp.weights is not None:
        raw = feature_matrix(hyp.feature_map, xs) @ hyp.weights
    else:
        raw = gram(hyp.feature_map, xs, hyp.support_xs) @ hyp.alphas
    out = hyp.link(raw)
    return float(out[0]) if np.ndim(x) == 0 else out


def alphatron_train(
    train: LabeledDataset,
    val: LabeledDataset,
    fmap: FeatureMap,
    link: LinkFunction = CLIP01,
    rate: float | None = None,
    iters: int = 50,
    primal_threshold: int = PRIMAL_DIM_THRESHOLD,
) -> TrainedHypothesis:
    """Run ``iters`` update rounds and keep the best round on validation.

    ``rate`` defaults to ``1 / link.lipschitz``.  The hypothesis recorded
    for round ``t`` is the one after ``t`` updates; ties in validation
    risk resolve to the earliest round.  An empty validation set falls
    back to the final round and sets ``val_fallback``.
    """
    n = len(train)
    if n == 0:
        raise ValueError("training set is empty")
    if rate is None:
        rate = 1.0 / link.lipschitz
    if rate <= 0.0:
        raise ValueError("rate must be positive")
    if iters < 1:
        raise ValueError("iters must be >= 1")

    y = train.ys
    use_primal = fmap.dimension <= primal_threshold
    if not use_primal and n > DUAL_POINT_LIMIT:
        raise ValueError(
            f"dual training with {n} points needs an {n}x{n} Gram matrix; "
            f"use a feature map of dimension <= {primal_threshold} (primal form)"
        )
    have_val = len(val) > 0
    if not have_val:
        log.warning("empty validation set: keeping the final round")

    history = np.full(iters, np.nan)
    if use_primal:
        phi_train = feature_matrix(fmap, train.xs)
        phi_val = feature_matrix(fmap, val.xs) if have_val else None
        w = np.zeros(fmap.dimension)
        snapshots = np.empty((iters, fmap.dimension))
        for t in range(iters):
            resid = y - link(phi_train @ w)
            w = w + (rate / n) * (phi_train.T @ resid)
            snapshots[t] = w
            if have_val:
                history[t] = np.mean((link(phi_val @ w) - val.ys) ** 2)
    else:
        k_train = gram(fmap, train.xs)
        k_val = gram(fmap, val.xs, train.xs) if have_val else None
        alpha = np.zeros(n)
        snapshots = np.empty((iters, n))
        for t in range(iters):
            resid = y - link(k_train @ alpha)
            alpha = alpha + (rate / n) * resid
            snapshots[t] = alpha
            if have_val:
                history[t] = np.mean((link(k_val @ alpha) - val.ys) ** 2)

    selected = int(np.argmin(history)) + 1 if have_val else iters
    if use_primal:
        return TrainedHypothesis(
            feature_map=fmap,
            link=link,
            weights=snapshots[selected - 1],
            selected_iteration=selected,
            history=history,
            val_fallback=not have_val,
        )
    return TrainedHypothesis(
        feature_map=fmap,
        link=link,
        alphas=snapshots[selected - 1],
        support_xs=train.xs,
        selected_iteration=selected,
        history=history,
        val_fallback=not have_val,
    )


def erm_fit(train: LabeledDataset, fmap: FeatureMap, reg: float) -> TrainedHypothesis:
    """Closed-form ridge fit of the identity-link model.

    Minimizes ``mean((<w, phi(x_i)> - y_i)^2) + reg * ||w||^2 / n`` via the
    normal equations.  At ``reg = 0`` with rank-deficient features the
    smallest-norm solution is returned (pseudo-inverse behaviour).
    """
    if len(train) == 0:
        raise ValueError("training set is empty")
    if reg < 0.0:
        raise ValueError("reg must be >= 0")
    phi_train = feature_matrix(fmap, train.xs)
    if reg > 0.0:
        a = phi_train.T @ phi_train + reg * np.eye(fmap.dimension)
        w = np.linalg.solve(a, phi_train.T @ train.ys)
    else:
        w = np.linalg.lstsq(phi_train, train.ys, rcond=None)[0]
    return TrainedHypothesis(feature_map=fmap, link=IDENTITY, weights=w)


def erm_fit_validated(
    train: LabeledDataset,
    val: LabeledDataset,
    fmap: FeatureMap,
    c_grid,
) -> tuple[TrainedHypothesis, float]:
    """Ridge fit with the regularization strength picked on validation.

    Fits every value in ``c_grid`` and keeps the one with the lowest
    validation empirical risk, ties to the earliest grid entry.
    """
    c_grid = list(c_grid)
    if not c_grid:
        raise ValueError("c_grid is empty")
    if len(val) == 0:
        raise ValueError("validation set is empty")
    phi_val = feature_matrix(fmap, val.xs)
    best: tuple[float, TrainedHypothesis, float] | None = None
    for c in c_grid:
        hyp = erm_fit(train, fmap, c)
        risk = float(np.mean((phi_val @ hyp.weights - val.ys) ** 2))
        if best is None or risk < best[0]:
            best = (risk, hyp, c)
    return best[1], best[2]


@dataclass(frozen=True)
class RiskReport:
    """Squared-error summaries of one hypothesis.

    ``explicit`` compares against the exact target, ``empirical`` and
    ``implicit`` against shot-noisy labels (``implicit`` being the
    estimate of the population quantity), and ``noise_floor`` is the
    label noise itself, ``mean((f(x_i) - y_i)^2)``.  Fields that need a
    noisy test set are None when it is not supplied.
    """

    explicit: float
    implicit: float | None = None
    empirical: float | None = None
    noise_floor: float | None = None


def target_values(target, xs):
    """Ground-truth values at ``xs`` for a circuit, series, or callable target."""
    if isinstance(target, ReuploadingParams):
        return eval_circuit(target, xs)
    if isinstance(target, FourierSeries):
        return eval_series(target, xs)
    if callable(target):
        return np.asarray(target(np.asarray(xs, dtype=float)), dtype=float)
    raise TypeError(f"unsupported target type {type(target).__name__}")


def estimate_risks(
    hyp: TrainedHypothesis,
    target,
    test_xs,
    test_noisy: LabeledDataset | None = None,
) -> RiskReport:
    """Risk estimates of ``hyp`` on a test grid and optional noisy test set."""
    test_xs = np.asarray(test_xs, dtype=float)
    if test_xs.size == 0:
        raise ValueError("test_xs is empty")
    f_test = target_values(target, test_xs)
    explicit = float(np.mean((predict(hyp, test_xs) - f_test) ** 2))
    if test_noisy is None:
        return RiskReport(explicit=explicit)
    preds = predict(hyp, test_noisy.xs)
    f_noisy = target_values(target, test_noisy.xs)
    empirical = float(np.mean((preds - test_noisy.ys) ** 2))
    noise_floor = float(np.mean((f_noisy - test_noisy.ys) ** 2))
    return RiskReport(
        explicit=explicit,
        implicit=empirical,
        empirical=empirical,
        noise_floor=noise_floor,
    )


def save_model(hyp: TrainedHypothesis, path, map_ref: str = "") -> None:
    """Write weights (or alphas with support points) plus metadata."""
    form = "primal" if hyp.weights is not None else "dual"
    lines = [
        f"# form = {form}",
        f"# link = {hyp.link.kind}",
        f"# selected_iteration = {hyp.selected_iteration}",
        f"# map = {map_ref}",
    ]
    if form == "primal":
        lines.append("index,value")
        lines.extend(f"{i},{v:.17g}" for i, v in enumerate(hyp.weights))
    else:
        lines.append("index,alpha,x")
        lines.extend(
            f"{i},{a:.17g},{x:.17g}"
            for i, (a, x) in enumerate(zip(hyp.alphas, hyp.support_xs))
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path, fmap: FeatureMap) -> TrainedHypothesis:
    """Read a model written by :func:`save_model`; the map is supplied by the caller."""
    form = None
    link_kind = "clip01"
    selected = 0
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line.startswith("# form"):
                form = line.partition("=")[2].strip()
            elif line.startswith("# link"):
                link_kind = line.partition("=")[2].strip()
            elif line.startswith("# selected_iteration"):
                selected = int(line.partition("=")[2])
            elif not line or line.startswith("#") or line.startswith("index"):
                continue
            else:
                rows.append([float(v) for v in line.split(",")[1:]])
    if form == "primal":
        return TrainedHypothesis(
            feature_map=fmap,
            link=link_by_name(link_kind),
            weights=np.array([r[0] for r in rows]),
            selected_iteration=selected,
        )
    if form == "dual":
        return TrainedHypothesis(
            feature_map=fmap,
            link=link_by_name(link_kind),
            alphas=np.array([r[0] for r in rows]),
            support_xs=np.array([r[1] for r in rows]),
            selected_iteration=selected,
        )
    raise ValueError(f"model file missing form metadata: {path}")
