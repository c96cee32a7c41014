"""Experiment drivers behind the CLI subcommands.

Each driver expands its grids into independent cells, runs them (serially
or on a worker pool), and yields CSV rows in deterministic cell order.
Cell seeds derive from the master seed and the cell's grid values, never
from execution order, so serial and parallel runs emit identical bytes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (
    BoundConstants,
    InfeasibleBudgetError,
    allocate_budget,
    bias_variance,
    budget_bound,
    optimal_shots,
    risk_bound_asymmetry,
    simplified_constants,
)
from .circuit import ReuploadingParams, eval_circuit, load_params, random_params, save_params
from .config import ConfigError, ExperimentConfig
from .features import truncated_map
from .fourier import extract_series, save_series
from .learner import (
    alphatron_train,
    erm_fit_validated,
    estimate_risks,
    link_by_name,
    predict,
    save_model,
)
from .sampling import build_dataset
from .seeding import STREAM_TEST, STREAM_TRAIN, STREAM_VALIDATION, cell_seed

log = logging.getLogger(__name__)

# Per-command tags keeping cell seed streams disjoint across commands.
TAG_ASYMMETRY = 1
TAG_SINGLE_SHOT = 2
TAG_BIAS_VARIANCE = 3
TAG_TRADEOFF = 4
TAG_LEARN = 5


@dataclass
class Table:
    """One CSV output: file name, header, and row iterable."""

    name: str
    header: list[str]
    rows: object


def evaluation_grid(n: int) -> np.ndarray:
    """Equispaced evaluation grid on ``[0, 2*pi)``."""
    return np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)


def resolve_target(cfg: ExperimentConfig) -> ReuploadingParams:
    """Load the configured target circuit, or generate it from the seed."""
    if cfg.target_file is not None:
        return load_params(cfg.target_file)
    return random_params(cfg.layers, cfg.seed)


def companion_validation_size(n1: int, train_fraction: float) -> int:
    """Validation size keeping ``n1 : n2 = train_fraction : 1 - train_fraction``."""
    return max(1, int(math.floor(n1 * (1.0 - train_fraction) / train_fraction + 0.5)))


def _gamma_key(gamma: float) -> int:
    # Integer encoding of a penalty value for use in seed keys.
    return int(round(gamma * 10**6))


def _map_cells(worker, argslist, jobs: int):
    if jobs <= 1 or len(argslist) <= 1:
        for args in argslist:
            yield worker(args)
        return
    chunksize = max(1, len(argslist) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(worker, argslist, chunksize=chunksize)


def _risk_cell(args: dict):
    """Train one replica and score it on the supplied test grid."""
    params = ReuploadingParams(layers=args["layers"], angles=args["angles"])
    fmap = truncated_map(args["d"])
    train = build_dataset(params, args["n1"], args["ns"], args["seed_train"])
    val = build_dataset(params, args["n2"], args["ns"], args["seed_val"])
    hyp = alphatron_train(
        train,
        val,
        fmap,
        link_by_name(args["link"]),
        rate=args["rate"],
        iters=args["iters"],
    )
    preds = predict(hyp, args["test_xs"])
    risk = float(np.mean((preds - args["f_test"]) ** 2))
    return risk, hyp.selected_iteration, (preds if args["want_preds"] else None)


def _bv_cell(args: dict):
    """Train paired link/no-link ensembles on shared datasets for one (d, ns)."""
    params = ReuploadingParams(layers=args["layers"], angles=args["angles"])
    fmap = truncated_map(args["d"])
    master, d, ns = args["master"], args["d"], args["ns"]
    clip_preds = []
    erm_preds = []
    for rep in range(args["replicas"]):
        train = build_dataset(
            params, args["n1"], ns,
            cell_seed(master, TAG_BIAS_VARIANCE, d, ns, rep, STREAM_TRAIN),
        )
        val = build_dataset(
            params, args["n2"], ns,
            cell_seed(master, TAG_BIAS_VARIANCE, d, ns, rep, STREAM_VALIDATION),
        )
        clip_hyp = alphatron_train(
            train, val, fmap, link_by_name("clip01"),
            rate=args["rate"], iters=args["iters"],
        )
        clip_preds.append(predict(clip_hyp, args["test_xs"]))
        erm_hyp, _ = erm_fit_validated(train, val, fmap, args["c_grid"])
        erm_preds.append(predict(erm_hyp, args["test_xs"]))
    return np.stack(clip_preds), np.stack(erm_preds)


def run_sweep_asymmetry(cfg: ExperimentConfig) -> list[Table]:
    cfg = cfg.grids_for("sweep-asymmetry")
    params = resolve_target(cfg)
    xs = evaluation_grid(cfg.test_points)
    f_test = eval_circuit(params, xs)

    cells = []
    argslist = []
    for n1 in cfg.n1_grid:
        n2 = companion_validation_size(n1, cfg.train_fraction)
        for ns in cfg.ns_grid:
            for rep in range(cfg.replicas):
                cells.append((n1, ns, rep))
                argslist.append(dict(
                    layers=params.layers, angles=params.angles,
                    d=cfg.d, link=cfg.link, rate=cfg.rate, iters=cfg.iters,
                    n1=n1, n2=n2, ns=ns,
                    seed_train=cell_seed(cfg.seed, TAG_ASYMMETRY, n1, ns, rep, STREAM_TRAIN),
                    seed_val=cell_seed(cfg.seed, TAG_ASYMMETRY, n1, ns, rep, STREAM_VALIDATION),
                    test_xs=xs, f_test=f_test, want_preds=False,
                ))

    def rows():
        for (n1, ns, rep), (risk, selected, _) in zip(
            cells, _map_cells(_risk_cell, argslist, cfg.jobs)
        ):
            yield (n1, ns, rep, risk, selected)

    return [Table(
        "asymmetry.csv",
        ["n1", "ns", "replica", "explicit_risk", "selected_iteration"],
        rows(),
    )]


def run_single_shot_scaling(cfg: ExperimentConfig) -> list[Table]:
    cfg = cfg.grids_for("single-shot-scaling")
    if cfg.n2_grid is not None and len(cfg.n2_grid) != len(cfg.n1_grid):
        raise ConfigError("n2_grid must match n1_grid in length")
    params = resolve_target(cfg)
    xs = evaluation_grid(cfg.test_points)
    f_test = eval_circuit(params, xs)

    risk_rows = []
    pred_rows = []
    for i, n1 in enumerate(cfg.n1_grid):
        n2 = (
            cfg.n2_grid[i]
            if cfg.n2_grid is not None
            else companion_validation_size(n1, cfg.train_fraction)
        )
        argslist = [dict(
            layers=params.layers, angles=params.angles,
            d=cfg.d, link=cfg.link, rate=cfg.rate, iters=cfg.iters,
            n1=n1, n2=n2, ns=1,
            seed_train=cell_seed(cfg.seed, TAG_SINGLE_SHOT, n1, rep, STREAM_TRAIN),
            seed_val=cell_seed(cfg.seed, TAG_SINGLE_SHOT, n1, rep, STREAM_VALIDATION),
            test_xs=xs, f_test=f_test, want_preds=True,
        ) for rep in range(cfg.replicas)]
        risks = []
        preds = []
        for risk, _, pred in _map_cells(_risk_cell, argslist, cfg.jobs):
            risks.append(risk)
            preds.append(pred)
        preds = np.stack(preds)
        risk_rows.append((n1, float(np.mean(risks)), float(np.std(risks, ddof=1))))
        mean_pred = preds.mean(axis=0)
        std_pred = preds.std(axis=0, ddof=1)
        pred_rows.extend(
            (n1, float(x), float(f), float(m), float(s))
            for x, f, m, s in zip(xs, f_test, mean_pred, std_pred)
        )

    return [
        Table("single_shot.csv", ["n1", "mean_risk", "std_risk"], risk_rows),
        Table(
            "single_shot_predictions.csv",
            ["n1", "x", "f_true", "mean_prediction", "std_prediction"],
            pred_rows,
        ),
    ]


def run_bias_variance(cfg: ExperimentConfig) -> list[Table]:
    cfg = cfg.grids_for("bias-variance")
    params = resolve_target(cfg)
    xs = evaluation_grid(cfg.test_points)
    f_test = eval_circuit(params, xs)
    n1 = cfg.n1_grid[0] if cfg.n1_grid else 40
    n2 = companion_validation_size(n1, cfg.train_fraction)
    if cfg.replicas < 2:
        raise ConfigError("bias-variance needs at least 2 replicas")

    cells = [(d, ns) for d in cfg.d_grid for ns in cfg.ns_grid]
    argslist = [dict(
        layers=params.layers, angles=params.angles,
        d=d, ns=ns, n1=n1, n2=n2,
        replicas=cfg.replicas, master=cfg.seed,
        rate=cfg.rate, iters=cfg.iters, c_grid=list(cfg.c_grid),
        test_xs=xs,
    ) for d, ns in cells]

    def rows():
        for (d, ns), (clip_preds, erm_preds) in zip(
            cells, _map_cells(_bv_cell, argslist, cfg.jobs)
        ):
            for link_kind, preds in (("clip01", clip_preds), ("identity", erm_preds)):
                report = bias_variance(preds, params, xs, shots=ns)
                yield (
                    d, ns, link_kind,
                    report.bias_sq, report.variance, report.mean_explicit_risk,
                )

    return [Table(
        "bias_variance.csv",
        ["d", "ns", "link", "bias_sq", "variance", "mean_explicit_risk"],
        rows(),
    )]


def run_tradeoff(cfg: ExperimentConfig) -> list[Table]:
    cfg = cfg.grids_for("tradeoff")
    params = resolve_target(cfg)
    xs = evaluation_grid(cfg.test_points)
    f_test = eval_circuit(params, xs)

    cells = []
    argslist = []
    for gamma in cfg.gamma_grid:
        for ns in cfg.ns_grid:
            try:
                n1, n2 = allocate_budget(cfg.ntot, ns, gamma, cfg.train_fraction)
            except InfeasibleBudgetError as exc:
                log.info("skipping gamma=%s ns=%s: %s", gamma, ns, exc)
                continue
            for rep in range(cfg.replicas):
                key = (_gamma_key(gamma), ns, rep)
                cells.append((gamma, ns, n1, n2, rep))
                argslist.append(dict(
                    layers=params.layers, angles=params.angles,
                    d=cfg.d, link=cfg.link, rate=cfg.rate, iters=cfg.iters,
                    n1=n1, n2=n2, ns=ns,
                    seed_train=cell_seed(cfg.seed, TAG_TRADEOFF, *key, STREAM_TRAIN),
                    seed_val=cell_seed(cfg.seed, TAG_TRADEOFF, *key, STREAM_VALIDATION),
                    test_xs=xs, f_test=f_test, want_preds=False,
                ))

    def rows():
        for (gamma, ns, n1, n2, rep), (risk, _, _) in zip(
            cells, _map_cells(_risk_cell, argslist, cfg.jobs)
        ):
            yield (gamma, ns, n1, n2, rep, risk)

    return [Table(
        "tradeoff.csv",
        ["gamma", "ns", "n1", "n2", "replica", "explicit_risk"],
        rows(),
    )]


BUDGET_NS_GRID = list(range(1, 26))


def run_bounds(cfg: ExperimentConfig) -> list[Table]:
    budget_ns = cfg.ns_grid if cfg.ns_grid is not None else BUDGET_NS_GRID
    cfg = cfg.grids_for("bounds")
    base = BoundConstants(
        L=cfg.bound_lipschitz,
        B=cfg.bound_weight_norm,
        Delta=cfg.bound_observable,
        sigma_bar=cfg.bound_sigma,
        delta=cfg.bound_delta,
    )
    c1, c2, c3 = simplified_constants(base)

    asym_rows = []
    constants = BoundConstants(c1=c1, c2=c2, c3=c3, delta=cfg.bound_delta)
    for n1 in cfg.n1_grid:
        for ns in cfg.ns_grid:
            asym_rows.append((n1, ns, risk_bound_asymmetry(constants, n1, ns)))

    budget_rows = []
    for gamma in cfg.gamma_grid:
        cg = BoundConstants(c1=c1, c2=c2, c3=c3, delta=cfg.bound_delta, gamma=gamma)
        ns_star = optimal_shots(cg)
        for ns in budget_ns:
            budget_rows.append((gamma, ns, budget_bound(cg, cfg.ntot, ns), ns_star))

    return [
        Table("bounds_asymmetry.csv", ["n1", "ns", "bound"], asym_rows),
        Table("bounds_budget.csv", ["gamma", "ns", "bound", "ns_star"], budget_rows),
    ]


def run_learn(cfg: ExperimentConfig, out_dir) -> list[Table]:
    """Single training run: model file, risk report, and fit curve."""
    cfg = cfg.grids_for("learn")
    params = resolve_target(cfg)
    n1 = cfg.n1_grid[0]
    ns = cfg.ns_grid[0]
    n2 = companion_validation_size(n1, cfg.train_fraction)
    fmap = truncated_map(cfg.d)
    train = build_dataset(params, n1, ns, cell_seed(cfg.seed, TAG_LEARN, n1, ns, STREAM_TRAIN))
    val = build_dataset(params, n2, ns, cell_seed(cfg.seed, TAG_LEARN, n1, ns, STREAM_VALIDATION))
    hyp = alphatron_train(
        train, val, fmap, link_by_name(cfg.link), rate=cfg.rate, iters=cfg.iters
    )
    xs = evaluation_grid(cfg.test_points)
    noisy = build_dataset(
        params, cfg.test_points, ns, cell_seed(cfg.seed, TAG_LEARN, n1, ns, STREAM_TEST)
    )
    report = estimate_risks(hyp, params, xs, noisy)
    save_model(hyp, out_dir / "model.csv", map_ref=f"truncated:{cfg.d}")

    preds = predict(hyp, xs)
    f_test = eval_circuit(params, xs)
    return [
        Table(
            "learn_risks.csv",
            ["n1", "n2", "ns", "link", "selected_iteration",
             "explicit", "implicit", "empirical", "noise_floor"],
            [(n1, n2, ns, cfg.link, hyp.selected_iteration,
              report.explicit, report.implicit, report.empirical, report.noise_floor)],
        ),
        Table(
            "learn_predictions.csv",
            ["x", "f_true", "prediction"],
            [(float(x), float(f), float(p)) for x, f, p in zip(xs, f_test, preds)],
        ),
    ]


def run_target(cfg: ExperimentConfig, out_dir) -> list:
    """Generate (or copy through) a target circuit and its coefficient file."""
    params = resolve_target(cfg)
    series = extract_series(params)
    params_path = out_dir / "target_params.txt"
    series_path = out_dir / "target_series.csv"
    save_params(params, params_path)
    save_series(series, series_path)
    return [params_path, series_path]
