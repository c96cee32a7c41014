"""Figure rendering for the experiment commands.

Each function takes the materialized CSV rows of one command and writes a
PNG next to the delimited output.  The CSV stays the canonical artifact;
figures are a convenience view of the same rows.
"""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_asymmetry(rows, path) -> None:
    """Mean explicit risk vs n1, one line per ns."""
    by_ns = defaultdict(lambda: defaultdict(list))
    for n1, ns, _rep, risk, _sel in rows:
        by_ns[ns][n1].append(risk)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for ns in sorted(by_ns):
        n1s = sorted(by_ns[ns])
        means = [np.mean(by_ns[ns][n1]) for n1 in n1s]
        ax.plot(n1s, means, marker="o", markersize=3, label=f"$N_s$={ns}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("training points $N_1$")
    ax.set_ylabel("explicit risk")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_single_shot(risk_rows, pred_rows, path) -> None:
    """Risk scaling and mean-predictor curves for single-shot labels."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    n1s = [r[0] for r in risk_rows]
    means = [r[1] for r in risk_rows]
    stds = [r[2] for r in risk_rows]
    ax1.errorbar(n1s, means, yerr=stds, marker="o", capsize=3)
    ax1.set_xscale("log")
    ax1.set_yscale("log")
    ax1.set_xlabel("training points $N_1$")
    ax1.set_ylabel("explicit risk")

    by_n1 = defaultdict(list)
    for n1, x, f, m, s in pred_rows:
        by_n1[n1].append((x, f, m, s))
    first = True
    for n1 in sorted(by_n1):
        data = np.array(by_n1[n1])
        order = np.argsort(data[:, 0])
        x, f, m, s = data[order].T
        if first:
            ax2.plot(x, f, "k--", linewidth=1.2, label="target")
            first = False
        line, = ax2.plot(x, m, linewidth=1.0, label=f"$N_1$={n1}")
        ax2.fill_between(x, m - s, m + s, alpha=0.2, color=line.get_color())
    ax2.set_xlabel("$x$")
    ax2.set_ylabel("prediction")
    ax2.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bias_variance(rows, path) -> None:
    """Bias^2 and variance vs hypothesis degree, per shot count and link."""
    fig, (ax_b, ax_v) = plt.subplots(1, 2, figsize=(9.0, 3.6), sharex=True)
    series = defaultdict(list)
    for d, ns, link, bias_sq, variance, _risk in rows:
        series[(ns, link)].append((d, bias_sq, variance))
    for (ns, link) in sorted(series, key=lambda k: (k[0], k[1])):
        data = np.array(sorted(series[(ns, link)]), dtype=object)
        ds = [row[0] for row in data]
        style = "-" if link == "clip01" else "--"
        label = f"$N_s$={ns}, {link}"
        ax_b.plot(ds, [row[1] for row in data], style, marker="o", markersize=3, label=label)
        ax_v.plot(ds, [row[2] for row in data], style, marker="o", markersize=3, label=label)
    for ax, name in ((ax_b, "bias$^2$"), (ax_v, "variance")):
        ax.set_yscale("log")
        ax.set_xlabel("hypothesis degree $d$")
        ax.set_ylabel(name)
    ax_v.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_tradeoff(rows, path) -> None:
    """Mean explicit risk vs shots under a fixed budget, per penalty."""
    by_gamma = defaultdict(lambda: defaultdict(list))
    for gamma, ns, _n1, _n2, _rep, risk in rows:
        by_gamma[gamma][ns].append(risk)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for gamma in sorted(by_gamma):
        nss = sorted(by_gamma[gamma])
        means = [np.mean(by_gamma[gamma][ns]) for ns in nss]
        ax.plot(nss, means, marker="o", markersize=3, label=f"$\\gamma$={gamma:g}")
    ax.set_yscale("log")
    ax.set_xlabel("shots per point $N_s$")
    ax.set_ylabel("explicit risk")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bounds(asym_rows, budget_rows, path) -> None:
    """Bound curves: risk vs n1 per ns, and budget bound vs ns per gamma."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    by_ns = defaultdict(list)
    for n1, ns, bound in asym_rows:
        by_ns[ns].append((n1, bound))
    for ns in sorted(by_ns):
        data = sorted(by_ns[ns])
        ax1.plot([d[0] for d in data], [d[1] for d in data], marker="o",
                 markersize=3, label=f"$N_s$={ns}")
    ax1.set_xscale("log")
    ax1.set_yscale("log")
    ax1.set_xlabel("training points $N_1$")
    ax1.set_ylabel("risk bound")
    ax1.legend(fontsize=7, ncol=2)

    by_gamma = defaultdict(list)
    stars = {}
    for gamma, ns, bound, ns_star in budget_rows:
        by_gamma[gamma].append((ns, bound))
        stars[gamma] = ns_star
    for gamma in sorted(by_gamma):
        data = sorted(by_gamma[gamma])
        line, = ax2.plot([d[0] for d in data], [d[1] for d in data],
                         label=f"$\\gamma$={gamma:g}")
        ax2.axvline(max(1.0, stars[gamma]), color=line.get_color(),
                    linestyle=":", linewidth=0.8)
    ax2.set_xlabel("shots per point $N_s$")
    ax2.set_ylabel("risk bound")
    ax2.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_learn(pred_rows, path) -> None:
    """Fitted hypothesis against the exact target."""
    data = np.array(pred_rows, dtype=float)
    order = np.argsort(data[:, 0])
    x, f, p = data[order].T
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(x, f, "k--", linewidth=1.2, label="target")
    ax.plot(x, p, linewidth=1.0, label="hypothesis")
    ax.set_xlabel("$x$")
    ax.set_ylabel("value")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
