"""Trigonometric-polynomial form of circuit functions.

A depth-``L`` re-uploading circuit evaluates to
``c0 + sum_w a_w cos(w x) + b_w sin(w x)`` with integer frequencies
``w = 1..L``.  This module extracts those coefficients from a circuit by
discrete Fourier transform, evaluates the series, and exposes the
coefficient-power distribution used to subsample frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import ReuploadingParams, eval_circuit

_ZERO_SNAP = 1e-12
_IMAG_TOL = 1e-10


class DegenerateSpectrumError(ValueError):
    """All non-constant coefficients vanish; no frequency distribution exists."""


@dataclass(frozen=True)
class FourierSeries:
    """Real trigonometric polynomial ``c0 + sum a_w cos(wx) + b_w sin(wx)``.

    ``a[k]`` and ``b[k]`` multiply frequency ``w = k + 1``; ``degree`` is the
    common length of the coefficient arrays.
    """

    c0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be 1-D arrays of identical length")
        if not (np.isfinite(self.c0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self) -> int:
        return self.a.size


def eval_series(series: FourierSeries, x):
    """Evaluate the series at scalar or array ``x``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    omegas = np.arange(1, series.degree + 1)
    ang = np.outer(xs, omegas)
    vals = series.c0 + np.cos(ang) @ series.a + np.sin(ang) @ series.b
    return float(vals[0]) if np.ndim(x) == 0 else vals


def extract_series(params: ReuploadingParams, degree: int | None = None) -> FourierSeries:
    """Coefficients of the circuit's trigonometric polynomial.

    Evaluates the circuit on ``4 * degree + 4`` equispaced points (an
    oversampled grid; ``2 * degree + 1`` would suffice) and reads the
    coefficients off the DFT.  ``degree`` defaults to ``params.layers``,
    the exact polynomial degree of the circuit; passing a larger value
    exposes the (numerically zero) tail coefficients.
    """
    if degree is None:
        degree = params.layers
    if degree < 1:
        raise ValueError("degree must be >= 1")
    m = 4 * degree + 4
    xs = 2.0 * np.pi * np.arange(m) / m
    vals = eval_circuit(params, xs)
    coeffs = np.fft.rfft(vals) / m

    c0 = float(coeffs[0].real)
    a = 2.0 * coeffs[1 : degree + 1].real
    b = -2.0 * coeffs[1 : degree + 1].imag
    a[np.abs(a) < _ZERO_SNAP] = 0.0
    b[np.abs(b) < _ZERO_SNAP] = 0.0
    if abs(c0) < _ZERO_SNAP:
        c0 = 0.0
    return FourierSeries(c0=c0, a=a, b=b)


def series_from_samples(xs: np.ndarray, values: np.ndarray, degree: int) -> FourierSeries:
    """Fit a degree-``degree`` series to equispaced samples over one period.

    ``xs`` must be ``2*pi*k/m`` for ``k = 0..m-1`` with ``m >= 2*degree + 1``;
    imaginary DFT residues above 1e-10 indicate aliasing and raise.
    """
    m = xs.size
    if m < 2 * degree + 1:
        raise ValueError("need at least 2*degree + 1 samples")
    expected = 2.0 * np.pi * np.arange(m) / m
    if not np.allclose(xs, expected, atol=1e-12, rtol=0.0):
        raise ValueError("samples must sit on the canonical equispaced grid")
    coeffs = np.fft.rfft(np.asarray(values, dtype=float)) / m
    tail = np.abs(coeffs[degree + 1 :])
    if tail.size and tail.max() > _IMAG_TOL:
        raise ValueError("spectral tail above tolerance; increase degree")
    return FourierSeries(
        c0=float(coeffs[0].real),
        a=2.0 * coeffs[1 : degree + 1].real,
        b=-2.0 * coeffs[1 : degree + 1].imag,
    )


def spectrum_distribution(series: FourierSeries) -> np.ndarray:
    """Probability of each frequency ``w = 1..degree``.

    ``p(w)`` is the squared coefficient magnitude ``a_w^2 + b_w^2``
    normalized over all non-constant frequencies; the constant term is
    handled separately by the feature maps.
    """
    power = series.a**2 + series.b**2
    total = power.sum()
    if series.degree == 0 or total <= 0.0:
        raise DegenerateSpectrumError("series has no non-constant coefficients")
    return power / total


def save_series(series: FourierSeries, path) -> None:
    """Write `omega,a,b` CSV with the constant term as a metadata line."""
    lines = [f"# c0 = {series.c0:.17g}", "omega,a,b"]
    for k in range(series.degree):
        lines.append(f"{k + 1},{series.a[k]:.17g},{series.b[k]:.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_series(path) -> FourierSeries:
    c0 = None
    rows: list[tuple[int, float, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line.startswith("# c0"):
                c0 = float(line.partition("=")[2])
            elif not line or line.startswith("#") or line.startswith("omega"):
                continue
            else:
                w, a, b = line.split(",")
                rows.append((int(w), float(a), float(b)))
    if c0 is None:
        raise ValueError(f"series file missing c0 metadata: {path}")
    rows.sort()
    if [w for w, _, _ in rows] != list(range(1, len(rows) + 1)):
        raise ValueError(f"series file has gaps in frequencies: {path}")
    return FourierSeries(
        c0=c0,
        a=np.array([a for _, a, _ in rows]),
        b=np.array([b for _, _, b in rows]),
    )
