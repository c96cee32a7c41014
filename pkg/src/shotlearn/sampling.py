"""Finite-shot label generation.

Measuring the circuit at input ``x`` yields eigenvalue samples of the
readout observable; averaging ``shots`` of them gives an unbiased label
with conditional variance ``var(outcome) / shots``.  For the projector
readout the outcomes are Bernoulli(f(x)) in {0, 1}.

Draw rule (shared by both samplers so matched seeds give matched draws):
one uniform ``u`` per shot, mapped through the inverse CDF of the outcome
distribution with ties broken toward the lower index and zero-probability
outcomes skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import ReuploadingParams, eval_circuit

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class EigenDistribution:
    """Eigenvalues of an observable and their measurement probabilities."""

    eigenvalues: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float)
        prob = np.array(self.probabilities, dtype=float)
        if lam.ndim != 1 or lam.shape != prob.shape or lam.size < 1:
            raise ValueError("eigenvalues and probabilities must be equal-length 1-D arrays")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(prob))):
            raise ValueError("entries must be finite")
        if prob.min() < 0.0 or abs(prob.sum() - 1.0) > _PROB_TOL:
            raise ValueError("probabilities must be non-negative and sum to 1")
        lam.setflags(write=False)
        prob.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "probabilities", prob)


@dataclass(frozen=True)
class LabeledDataset:
    """Inputs with shot-averaged labels.

    ``shots`` is the number of measurements averaged per label; 0 marks
    exact (noise-free) labels constructed directly from the target.
    ``seed`` records the integer stream the dataset was drawn from, when
    known, so it can be rebuilt bit-identically.
    """

    xs: np.ndarray
    ys: np.ndarray
    shots: int
    seed: int | None = None

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        ys = np.array(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape:
            raise ValueError("xs and ys must be equal-length 1-D arrays")
        if xs.size and (xs.min() < 0.0 or xs.max() >= 2.0 * np.pi):
            raise ValueError("inputs must lie in [0, 2*pi)")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("entries must be finite")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return self.xs.size


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_mean_label(p, shots: int, rng):
    """Average of ``shots`` Bernoulli(p) outcomes.

    ``p`` may be a scalar or an array (one independent empirical mean per
    entry).  Values outside ``[0, 1]`` by more than 1e-12 raise; closer
    excursions are clipped before sampling.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p_arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p_arr)):
        raise ValueError("probabilities must be finite")
    if p_arr.min() < -_PROB_TOL or p_arr.max() > 1.0 + _PROB_TOL:
        raise ValueError("probability outside [0, 1] beyond tolerance")
    p_clip = np.clip(p_arr, 0.0, 1.0)

    us = _as_rng(rng).random(p_arr.shape + (shots,))
    # Inverse CDF for outcomes {0, 1} with masses {1-p, p}: outcome 1 iff
    # u > 1-p; at p == 1 the zero outcome has no mass and is skipped.
    hits = us > (1.0 - p_clip)[..., None]
    if np.any(p_clip == 1.0):
        hits = hits | (p_clip == 1.0)[..., None]
    means = hits.mean(axis=-1)
    return float(means) if p_arr.ndim == 0 else means


def sample_eigen_label(dist: EigenDistribution, shots: int, rng) -> float:
    """Average of ``shots`` eigenvalue draws from ``dist``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    cum = np.cumsum(dist.probabilities)
    cum[-1] = 1.0  # guard accumulated rounding at the top
    us = _as_rng(rng).random(shots)
    idx = np.searchsorted(cum, us, side="left")
    positive = np.flatnonzero(dist.probabilities > 0.0)
    # Remap any index that landed on a zero-mass outcome (u hit a flat
    # stretch of the CDF) to the next outcome with positive mass; indices
    # past the last positive outcome (rounding sliver below 1) map to it.
    pos = np.minimum(np.searchsorted(positive, idx, side="left"), positive.size - 1)
    return float(dist.eigenvalues[positive[pos]].mean())


def build_dataset(params: ReuploadingParams, n: int, shots: int, rng) -> LabeledDataset:
    """Draw ``n`` uniform inputs and their shot-averaged labels.

    ``rng`` may be an integer seed (recorded on the dataset) or a
    ``numpy.random.Generator`` (seed recorded as None).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    seed = int(rng) if not isinstance(rng, np.random.Generator) else None
    gen = _as_rng(rng)
    xs = gen.uniform(0.0, 2.0 * np.pi, size=n)
    ps = eval_circuit(params, xs) if n else np.empty(0)
    ys = sample_mean_label(ps, shots, gen) if n else np.empty(0)
    return LabeledDataset(xs=xs, ys=np.asarray(ys, dtype=float), shots=shots, seed=seed)


def exact_dataset(target_values, xs: np.ndarray) -> LabeledDataset:
    """Noise-free dataset with labels ``target_values(xs)`` (shots = 0)."""
    xs = np.asarray(xs, dtype=float)
    return LabeledDataset(xs=xs, ys=np.asarray(target_values(xs), dtype=float), shots=0)


def save_dataset(dataset: LabeledDataset, path, target_ref: str = "") -> None:
    """Write `x,ybar` CSV with seed/shots/target metadata lines."""
    lines = [
        f"# seed = {'' if dataset.seed is None else dataset.seed}",
        f"# shots = {dataset.shots}",
        f"# target = {target_ref}",
        "x,ybar",
    ]
    for x, y in zip(dataset.xs, dataset.ys):
        lines.append(f"{x:.17g},{y:.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path) -> LabeledDataset:
    seed: int | None = None
    shots = 0
    xs: list[float] = []
    ys: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line.startswith("# seed"):
                value = line.partition("=")[2].strip()
                seed = int(value) if value else None
            elif line.startswith("# shots"):
                shots = int(line.partition("=")[2])
            elif not line or line.startswith("#") or line.startswith("x,"):
                continue
            else:
                x, y = line.split(",")
                xs.append(float(x))
                ys.append(float(y))
    return LabeledDataset(xs=np.array(xs), ys=np.array(ys), shots=shots, seed=seed)
