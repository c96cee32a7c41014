"""Command-line experiment harness.

Subcommands: ``target``, ``learn``, ``sweep-asymmetry``,
``single-shot-scaling``, ``bias-variance``, ``tradeoff``, ``bounds``.
Every command is a pure function of (config, seed): rerunning with the
same inputs reproduces every CSV byte for byte.  Outputs are UTF-8 CSV
with LF line endings and a mandatory header row; report commands also
render a PNG of the same rows unless ``--no-plot`` is given.

Exit codes: 0 success, 2 configuration error, 3 infeasible experiment.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import experiments
from .analysis import InfeasibleBudgetError
from .config import ConfigError, build_config

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    try:  # numpy scalars
        import numpy as np

        if isinstance(value, np.integer):
            return str(int(value))
        if isinstance(value, np.floating):
            return repr(float(value))
    except ImportError:  # pragma: no cover
        pass
    return str(value)


def write_table(table: experiments.Table, out_dir: Path) -> list:
    """Write one CSV, flushing per row; returns the materialized rows."""
    path = out_dir / table.name
    materialized = []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([_format_value(v) for v in row])
            fh.flush()
            materialized.append(row)
    log.info("wrote %s (%d rows)", path, len(materialized))
    return materialized


def _render(command: str, tables: dict, out_dir: Path) -> None:
    from . import plotting  # deferred: matplotlib import is slow

    if command == "sweep-asymmetry":
        plotting.plot_asymmetry(tables["asymmetry.csv"], out_dir / "asymmetry.png")
    elif command == "single-shot-scaling":
        plotting.plot_single_shot(
            tables["single_shot.csv"],
            tables["single_shot_predictions.csv"],
            out_dir / "single_shot.png",
        )
    elif command == "bias-variance":
        plotting.plot_bias_variance(tables["bias_variance.csv"], out_dir / "bias_variance.png")
    elif command == "tradeoff":
        plotting.plot_tradeoff(tables["tradeoff.csv"], out_dir / "tradeoff.png")
    elif command == "bounds":
        plotting.plot_bounds(
            tables["bounds_asymmetry.csv"],
            tables["bounds_budget.csv"],
            out_dir / "bounds.png",
        )
    elif command == "learn":
        plotting.plot_learn(tables["learn_predictions.csv"], out_dir / "learn.png")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotlearn",
        description="Experiment harness for learning circuit functions from shot-noisy labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, default=None, help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--paper-scale", action="store_true", default=None,
                       help="use the full study grids instead of the smoke profile")
        p.add_argument("--jobs", type=int, default=None, help="worker processes for cells")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
        p.add_argument("--target-file", type=Path, default=None,
                       help="target circuit file (otherwise generated from the seed)")

    for name, help_text in (
        ("target", "generate a target circuit and its coefficient file"),
        ("learn", "single training run with a risk report"),
        ("sweep-asymmetry", "explicit risk over the (n1, ns) grid"),
        ("single-shot-scaling", "risk scaling in n1 at a single shot per label"),
        ("bias-variance", "bias/variance of ensembles, with and without the link"),
        ("tradeoff", "risk under a fixed measurement budget"),
        ("bounds", "closed-form bound curves"),
    ):
        p = sub.add_parser(name, help=help_text)
        add_common(p)
        if name == "target":
            p.add_argument("--layers", type=int, default=None, help="circuit depth")
        if name in ("learn", "sweep-asymmetry", "single-shot-scaling", "tradeoff"):
            p.add_argument("--d", type=int, default=None, help="hypothesis degree")
            p.add_argument("--link", choices=("clip01", "identity"), default=None)
        if name == "tradeoff":
            p.add_argument("--ntot", type=int, default=None, help="total measurement budget")
    return parser


_RUNNERS = {
    "sweep-asymmetry": experiments.run_sweep_asymmetry,
    "single-shot-scaling": experiments.run_single_shot_scaling,
    "bias-variance": experiments.run_bias_variance,
    "tradeoff": experiments.run_tradeoff,
    "bounds": experiments.run_bounds,
}


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)

    overrides = {
        "seed": args.seed,
        "out_dir": str(args.out) if args.out is not None else None,
        "paper_scale": args.paper_scale,
        "jobs": args.jobs,
        "target_file": str(args.target_file) if args.target_file is not None else None,
        "d": getattr(args, "d", None),
        "link": getattr(args, "link", None),
        "layers": getattr(args, "layers", None),
        "ntot": getattr(args, "ntot", None),
    }
    if args.no_plot:
        overrides["plot"] = False

    try:
        cfg = build_config(args.config, overrides)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        if args.command == "target":
            for path in experiments.run_target(cfg, out_dir):
                log.info("wrote %s", path)
            return EXIT_OK
        if args.command == "learn":
            tables = experiments.run_learn(cfg, out_dir)
        else:
            tables = _RUNNERS[args.command](cfg)
        written = {t.name: write_table(t, out_dir) for t in tables}
        if not any(written.values()):
            log.error("no feasible experiment cells; nothing to report")
            return EXIT_INFEASIBLE
        if cfg.plot:
            _render(args.command, written, out_dir)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except InfeasibleBudgetError as exc:
        log.error("infeasible experiment: %s", exc)
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
