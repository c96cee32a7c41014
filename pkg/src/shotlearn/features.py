"""Trigonometric feature maps and their kernels.

A map over frequencies ``w_1..w_F`` sends ``x`` to the normalized vector
``(1, cos(w_1 x), sin(w_1 x), ...) / sqrt(block_count)`` where
``block_count`` counts the frequency pairs plus one for the constant slot.
Every map has unit norm pointwise, so the induced kernel satisfies
``k(x, x) = 1``.  Frequencies may be the full band ``1..d`` (truncated
maps) or a random multiset drawn from a series' coefficient-power
distribution (randomized subsampling of a large spectrum).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import FourierSeries, spectrum_distribution

KINDS = ("full", "truncated", "rff")


@dataclass(frozen=True)
class FeatureMap:
    kind: str
    frequencies: np.ndarray
    includes_constant: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        freqs = np.array(self.frequencies, dtype=np.int64)
        if freqs.ndim != 1 or freqs.size < 1 or freqs.min() < 1:
            raise ValueError("frequencies must be a non-empty 1-D array of positive integers")
        freqs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)

    @property
    def block_count(self) -> int:
        """Frequency pairs plus one if the constant slot is present."""
        return self.frequencies.size + int(self.includes_constant)

    @property
    def dimension(self) -> int:
        return 2 * self.frequencies.size + int(self.includes_constant)


def truncated_map(d: int) -> FeatureMap:
    """Map over the full band ``1..d`` plus the constant slot."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return FeatureMap(kind="truncated", frequencies=np.arange(1, d + 1))


def full_map(series: FourierSeries) -> FeatureMap:
    """Map covering every frequency of ``series``."""
    return FeatureMap(kind="full", frequencies=np.arange(1, series.degree + 1))


def sample_rff_map(series: FourierSeries, d_rff: int, rng) -> FeatureMap:
    """Draw ``d_rff`` frequencies i.i.d. (with replacement) from the series spectrum.

    Sampling weight of frequency ``w`` is ``a_w^2 + b_w^2`` normalized; the
    constant slot is always included.  Duplicates are kept as duplicates —
    the ``1/sqrt(block_count)`` normalization accounts for multiplicity.
    """
    if d_rff < 1:
        raise ValueError("d_rff must be >= 1")
    probs = spectrum_distribution(series)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    freqs = gen.choice(np.arange(1, series.degree + 1), size=d_rff, replace=True, p=probs)
    return FeatureMap(kind="rff", frequencies=freqs)


def feature_matrix(fmap: FeatureMap, xs) -> np.ndarray:
    """Stacked feature vectors, shape ``(len(xs), fmap.dimension)``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ang = np.outer(xs, fmap.frequencies)
    out = np.empty((xs.size, fmap.dimension))
    offset = 0
    if fmap.includes_constant:
        out[:, 0] = 1.0
        offset = 1
    out[:, offset::2] = np.cos(ang)
    out[:, offset + 1 :: 2] = np.sin(ang)
    out /= np.sqrt(fmap.block_count)
    return out


def phi(fmap: FeatureMap, x: float) -> np.ndarray:
    """Feature vector of a single input."""
    return feature_matrix(fmap, x)[0]


def kernel(fmap: FeatureMap, x: float, x2: float) -> float:
    """Inner product of the feature vectors of ``x`` and ``x2``."""
    return float(phi(fmap, x) @ phi(fmap, x2))


def gram(fmap: FeatureMap, xs, xs2=None) -> np.ndarray:
    """Kernel matrix between two point sets (the second defaults to the first)."""
    f1 = feature_matrix(fmap, xs)
    f2 = f1 if xs2 is None else feature_matrix(fmap, xs2)
    return f1 @ f2.T


def series_to_weights(series: FourierSeries, fmap: FeatureMap) -> np.ndarray:
    """Weight vector that reproduces ``series`` through ``fmap``.

    Exact whenever the map's frequencies cover the series support (and the
    constant slot is present when ``c0 != 0``); frequencies the map lacks
    are simply dropped.  Duplicated frequencies split their coefficient
    across the duplicate slots.
    """
    scale = np.sqrt(fmap.block_count)
    counts: dict[int, int] = {}
    for w in fmap.frequencies:
        counts[int(w)] = counts.get(int(w), 0) + 1
    weights = np.zeros(fmap.dimension)
    offset = 0
    if fmap.includes_constant:
        weights[0] = scale * series.c0
        offset = 1
    for j, w in enumerate(fmap.frequencies):
        w = int(w)
        if w <= series.degree:
            weights[offset + 2 * j] = scale * series.a[w - 1] / counts[w]
            weights[offset + 2 * j + 1] = scale * series.b[w - 1] / counts[w]
    return weights


def weight_norm_budget(series: FourierSeries, fmap: FeatureMap) -> float:
    """Default weight-norm budget for a known target series.

    ``sqrt(block_count)`` times the L1 mass of the coefficients — an upper
    bound on the 2-norm of :func:`series_to_weights`.
    """
    l1 = abs(series.c0) + np.abs(series.a).sum() + np.abs(series.b).sum()
    return float(np.sqrt(fmap.block_count) * l1)


def save_map(fmap: FeatureMap, path) -> None:
    """Write the sampled frequencies plus kind/constant metadata."""
    lines = [
        f"# kind = {fmap.kind}",
        f"# includes_constant = {str(fmap.includes_constant).lower()}",
        "omega",
    ]
    lines.extend(str(int(w)) for w in fmap.frequencies)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_map(path) -> FeatureMap:
    kind = None
    includes_constant = True
    freqs: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line.startswith("# kind"):
                kind = line.partition("=")[2].strip()
            elif line.startswith("# includes_constant"):
                includes_constant = line.partition("=")[2].strip() == "true"
            elif not line or line.startswith("#") or line == "omega":
                continue
            else:
                freqs.append(int(line))
    if kind is None:
        raise ValueError(f"map file missing kind metadata: {path}")
    return FeatureMap(kind=kind, frequencies=np.array(freqs), includes_constant=includes_constant)
