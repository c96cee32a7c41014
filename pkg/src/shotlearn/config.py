"""Experiment configuration: defaults, config-file parsing, CLI overrides.

Config files are flat ``key = value`` text: one assignment per line,
``#`` comments, comma-separated lists, ``true``/``false`` booleans.
Precedence is defaults < config file < command-line flags.  Grid fields
left unset fall back to per-command profiles: a quick smoke profile by
default, the full study grids under ``--paper-scale``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace


class ConfigError(Exception):
    """Bad configuration file or option values (CLI exit code 2)."""


# Regularization grid searched by the ridge baseline.
RIDGE_C_GRID = [
    0.006, 0.015, 0.03, 0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 5.0, 8.0,
    16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0,
]

# Full-study grids (mirroring the numerical study this harness reproduces)
# and reduced smoke grids used for quick runs and CI.
PROFILES = {
    "paper": {
        "sweep-asymmetry": dict(
            n1_grid=[8, 12, 20, 40, 60, 80, 160, 240],
            ns_grid=[1, 5, 10, 25, 50, 75, 100, 200],
            replicas=5,
        ),
        "single-shot-scaling": dict(
            n1_grid=[40, 800, 24000],
            n2_grid=[10, 200, 600],
            replicas=5,
        ),
        "bias-variance": dict(
            n1_grid=[40],
            d_grid=list(range(1, 11)),
            ns_grid=[1, 10, 100],
            replicas=20,
        ),
        "tradeoff": dict(
            gamma_grid=[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            ns_grid=list(range(1, 26)),
            replicas=60,
        ),
        "bounds": dict(
            n1_grid=[8, 12, 20, 40, 60, 80, 160, 240],
            ns_grid=[1, 5, 10, 25, 50, 75, 100, 200],
            gamma_grid=[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
        ),
        "learn": dict(n1_grid=[240], ns_grid=[1], replicas=1),
    },
    "smoke": {
        "sweep-asymmetry": dict(
            n1_grid=[8, 40],
            ns_grid=[1, 10],
            replicas=2,
        ),
        "single-shot-scaling": dict(
            n1_grid=[40, 200],
            n2_grid=[10, 50],
            replicas=2,
        ),
        "bias-variance": dict(
            n1_grid=[40],
            d_grid=[2, 10],
            ns_grid=[1, 100],
            replicas=4,
        ),
        "tradeoff": dict(
            gamma_grid=[0.0, 5.0],
            ns_grid=[1, 5, 25],
            replicas=2,
        ),
        "bounds": dict(
            n1_grid=[8, 12, 20, 40, 60, 80, 160, 240],
            ns_grid=[1, 5, 10, 25, 50, 75, 100, 200],
            gamma_grid=[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
        ),
        "learn": dict(n1_grid=[240], ns_grid=[1], replicas=1),
    },
}

_INT_LIST = ("n1_grid", "ns_grid", "n2_grid", "d_grid")
_FLOAT_LIST = ("gamma_grid", "c_grid")


@dataclass(frozen=True)
class ExperimentConfig:
    """One run's knobs; grid fields set to None take the profile default."""

    target_file: str | None = None
    layers: int = 10
    seed: int = 16
    n1_grid: list[int] | None = None
    ns_grid: list[int] | None = None
    n2_grid: list[int] | None = None
    d_grid: list[int] | None = None
    replicas: int | None = None
    d: int = 10
    link: str = "clip01"
    rate: float | None = None
    iters: int = 50
    test_points: int = 500
    gamma_grid: list[float] | None = None
    ntot: int = 600
    train_fraction: float = 0.8
    c_grid: list[float] = field(default_factory=lambda: list(RIDGE_C_GRID))
    out_dir: str = "out"
    paper_scale: bool = False
    jobs: int = 1
    plot: bool = True
    # Constants feeding the bound curves.
    bound_delta: float = 0.01
    bound_sigma: float = 1.0
    bound_lipschitz: float = 1.0
    bound_weight_norm: float = 1.0
    bound_observable: float = 1.0

    def validate(self) -> None:
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.replicas is not None and self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if self.link not in ("clip01", "identity"):
            raise ConfigError(f"unknown link {self.link!r}")
        if self.iters < 1:
            raise ConfigError("iters must be >= 1")
        if self.test_points < 1:
            raise ConfigError("test_points must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie in (0, 1)")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        for name in _INT_LIST + _FLOAT_LIST:
            value = getattr(self, name)
            if value is not None and len(value) == 0:
                raise ConfigError(f"{name} must be non-empty when given")

    def grids_for(self, command: str) -> "ExperimentConfig":
        """Fill unset grid fields from the command's profile."""
        profile = PROFILES["paper" if self.paper_scale else "smoke"].get(command, {})
        updates = {
            key: value
            for key, value in profile.items()
            if getattr(self, key, None) is None
        }
        return replace(self, **updates) if updates else self


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_LIST:
        return [int(v.strip()) for v in raw.split(",") if v.strip()]
    if key in _FLOAT_LIST:
        return [float(v.strip()) for v in raw.split(",") if v.strip()]
    if key in ("paper_scale", "plot"):
        if raw.lower() not in ("true", "false"):
            raise ConfigError(f"{key} must be true or false, got {raw!r}")
        return raw.lower() == "true"
    if key in ("target_file", "out_dir", "link"):
        return raw
    if key in ("rate", "train_fraction") or key.startswith("bound_"):
        return float(raw)
    return int(raw)


def parse_config_file(path) -> dict:
    """Read a flat key=value file into an override dict."""
    overrides: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            overrides[key] = _parse_value(key, value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return overrides


def build_config(file_path=None, cli_overrides: dict | None = None) -> ExperimentConfig:
    """Merge defaults, an optional config file, and CLI overrides."""
    values: dict = {}
    if file_path is not None:
        values.update(parse_config_file(file_path))
    for key, value in (cli_overrides or {}).items():
        if value is not None:
            values.update({key: value})
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg
