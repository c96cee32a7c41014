"""Exact statevector evaluation of a single-qubit data re-uploading circuit.

The circuit alternates a data-encoding rotation ``RX(x)`` with trainable
rotations ``Rot(t1, t2, t3) = RZ(t3) @ RY(t2) @ RZ(t1)`` (layer 1 applied
first) and is read out as the probability of returning to the initial
state, so its output lies in ``[0, 1]``.  Gate convention:
``R_P(a) = exp(-i * a * P / 2)`` for ``P`` in ``{X, Y, Z}``.

A circuit of depth ``layers`` realizes a trigonometric polynomial of degree
``layers`` in ``x`` and serves as the exact ground truth that shot-noisy
labels are sampled from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class ReuploadingParams:
    """Angle tensor of a depth-``layers`` re-uploading circuit.

    Parameters
    ----------
    layers : int
        Number of data-encoding repetitions, at least 1.
    angles : ndarray, shape (layers + 1, 3)
        Rotation angles in radians; row ``l`` parameterizes the trainable
        rotation applied after the ``l``-th encoding gate (row 0 before the
        first one).
    seed : int or None
        Seed the angles were drawn from, kept for replay; None for
        externally supplied angles.
    """

    layers: int
    angles: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")
        angles = np.array(self.angles, dtype=float)
        if angles.shape != (self.layers + 1, 3):
            raise ValueError(
                f"angles must have shape {(self.layers + 1, 3)}, got {angles.shape}"
            )
        if not np.all(np.isfinite(angles)):
            raise ValueError("angles must be finite")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)


def _check_finite(*angles: float) -> None:
    for a in angles:
        if not np.isfinite(a):
            raise ValueError(f"angle must be finite, got {a}")


def rx(angle: float) -> np.ndarray:
    """Rotation ``exp(-i * angle * X / 2)`` as a 2x2 complex matrix."""
    _check_finite(angle)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(angle: float) -> np.ndarray:
    """Rotation ``exp(-i * angle * Y / 2)``."""
    _check_finite(angle)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(angle: float) -> np.ndarray:
    """Rotation ``exp(-i * angle * Z / 2)``."""
    _check_finite(angle)
    p = np.exp(-1j * angle / 2)
    return np.array([[p, 0], [0, np.conj(p)]])


def rot(theta1: float, theta2: float, theta3: float) -> np.ndarray:
    """Universal single-qubit rotation ``RZ(theta3) @ RY(theta2) @ RZ(theta1)``."""
    _check_finite(theta1, theta2, theta3)
    return rz(theta3) @ ry(theta2) @ rz(theta1)


def random_params(layers: int, seed: int) -> ReuploadingParams:
    """Draw circuit angles i.i.d. uniform on ``[0, 2*pi)`` from ``seed``."""
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(layers + 1, 3))
    return ReuploadingParams(layers=layers, angles=angles, seed=seed)


def eval_circuit(params: ReuploadingParams, x):
    """Probability of measuring the initial state after the circuit.

    Parameters
    ----------
    params : ReuploadingParams
    x : float or array_like
        Input angle(s) in radians.

    Returns
    -------
    float or ndarray
        ``|<0| Rot(theta^{L+1}) prod_l [RX(x) Rot(theta^l)] |0>|^2``,
        clamped to ``[0, 1]`` after a 1e-12 tolerance check.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(xs)):
        raise ValueError("inputs must be finite")
    rots = [rot(*row) for row in params.angles]

    state = np.zeros((xs.size, 2), dtype=complex)
    state[:, 0] = 1.0
    c, s = np.cos(xs / 2), np.sin(xs / 2)
    enc = np.empty((xs.size, 2, 2), dtype=complex)
    enc[:, 0, 0] = c
    enc[:, 0, 1] = -1j * s
    enc[:, 1, 0] = -1j * s
    enc[:, 1, 1] = c

    for layer in range(params.layers):
        state = state @ rots[layer].T
        state = np.einsum("nij,nj->ni", enc, state)
    state = state @ rots[params.layers].T

    prob = np.abs(state[:, 0]) ** 2
    if prob.min() < -_PROB_TOL or prob.max() > 1.0 + _PROB_TOL:
        raise ValueError("circuit probability outside [0, 1] beyond tolerance")
    prob = np.clip(prob, 0.0, 1.0)
    return float(prob[0]) if np.isscalar(x) or np.ndim(x) == 0 else prob


def save_params(params: ReuploadingParams, path) -> None:
    """Write a plain-text key-value target file (round-trip exact)."""
    lines = [f"layers = {params.layers}"]
    if params.seed is not None:
        lines.append(f"seed = {params.seed}")
    for i, row in enumerate(params.angles):
        lines.append(f"angles[{i}] = " + " ".join(f"{v:.17g}" for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_params(path) -> ReuploadingParams:
    """Read a target file written by :func:`save_params`."""
    layers = None
    seed = None
    rows: dict[int, list[float]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "layers":
                layers = int(value)
            elif key == "seed":
                seed = int(value)
            elif key.startswith("angles[") and key.endswith("]"):
                rows[int(key[7:-1])] = [float(v) for v in value.split()]
            else:
                raise ValueError(f"unrecognized key in target file: {key!r}")
    if layers is None or len(rows) != layers + 1:
        raise ValueError(f"malformed target file: {path}")
    angles = np.array([rows[i] for i in range(layers + 1)], dtype=float)
    return ReuploadingParams(layers=layers, angles=angles, seed=seed)
