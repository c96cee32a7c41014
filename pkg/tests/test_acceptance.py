"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Statistical criteria run at fixed seeds (the package default master seed)
so every run is deterministic; trend checks use bootstrap confidence
intervals with 1000 resamples.
"""

import csv
import time

import numpy as np
import pytest

import shotlearn as sl
from shotlearn.analysis import (
    bootstrap_bias_variance_ci,
    bootstrap_mean_ci,
    clamp_shots,
)
from shotlearn.cli import EXIT_OK, main
from shotlearn.config import RIDGE_C_GRID, ExperimentConfig
from shotlearn.experiments import (
    TAG_ASYMMETRY,
    _bv_cell,
    run_bounds,
    run_sweep_asymmetry,
    run_single_shot_scaling,
    run_tradeoff,
    evaluation_grid,
)
from shotlearn.features import feature_matrix, full_map, gram, kernel
from shotlearn.learner import alphatron_train, erm_fit, predict
from shotlearn.sampling import LabeledDataset, build_dataset, exact_dataset, sample_mean_label

MASTER = ExperimentConfig().seed


def _report(num, desc, ok, elapsed, limit):
    verdict = "PASS" if (ok and elapsed < limit) else "FAIL"
    print(f"[criterion {num:2d}] {verdict} ({elapsed:.2f}s / limit {limit:.0f}s): {desc}",
          flush=True)
    assert ok, f"criterion {num} failed: {desc}"
    assert elapsed < limit, f"criterion {num} exceeded its runtime limit"


@pytest.fixture(scope="module")
def bv_ensembles():
    """Shared link / no-link ensembles at d=10, n1=40, 20 replicas."""
    params = sl.random_params(10, seed=MASTER)
    xs = evaluation_grid(500)
    start = time.perf_counter()
    out = {}
    for ns in (1, 100):
        clip_preds, erm_preds = _bv_cell(dict(
            layers=params.layers, angles=params.angles,
            d=10, ns=ns, n1=40, n2=10,
            replicas=20, master=MASTER,
            rate=None, iters=50, c_grid=list(RIDGE_C_GRID),
            test_xs=xs,
        ))
        out[ns] = (clip_preds, erm_preds)
    build_time = time.perf_counter() - start
    return out, sl.eval_circuit(params, xs), build_time


def test_criterion_01_fourier_round_trip():
    start = time.perf_counter()
    xs = np.linspace(0.0, 2.0 * np.pi, 500, endpoint=False)
    ok = True
    for seed in range(10):
        params = sl.random_params(10, seed=seed)
        series = sl.extract_series(params)
        gap = np.abs(sl.eval_series(series, xs) - sl.eval_circuit(params, xs)).max()
        wide = sl.extract_series(params, degree=20)
        tail = max(np.abs(wide.a[10:]).max(), np.abs(wide.b[10:]).max())
        ok = ok and gap < 1e-9 and tail < 1e-9
    _report(1, "Fourier round-trip and degree bound for 10 seeded targets",
            ok, time.perf_counter() - start, 1.0)


def test_criterion_02_sampler_laws():
    start = time.perf_counter()
    reps = 10**6
    ok = True
    for i, shots in enumerate((1, 4, 16)):
        rng = np.random.default_rng(1000 + i)
        means = sample_mean_label(np.full(reps, 0.5), shots, rng)
        sigma = np.sqrt(0.25 / (shots * reps))
        expected_var = 0.25 / shots
        ok = ok and abs(means.mean() - 0.5) < 3.0 * sigma
        ok = ok and abs(np.var(means) - expected_var) < 0.05 * expected_var
    _report(2, "shot-averaged labels: unbiased mean and variance law",
            ok, time.perf_counter() - start, 10.0)


def test_criterion_03_kernel_normalization_and_psd():
    start = time.perf_counter()
    params = sl.random_params(10, seed=MASTER)
    series = sl.extract_series(params)
    rng = np.random.default_rng(3)
    maps = [
        full_map(series),
        sl.truncated_map(10),
        sl.sample_rff_map(series, 15, np.random.default_rng(4)),
    ]
    ok = True
    xs1000 = rng.uniform(0.0, 2.0 * np.pi, size=1000)
    xs100 = rng.uniform(0.0, 2.0 * np.pi, size=100)
    for fmap in maps:
        diag = np.einsum("ij,ij->i", feature_matrix(fmap, xs1000), feature_matrix(fmap, xs1000))
        ok = ok and np.abs(diag - 1.0).max() < 1e-12
        ok = ok and np.linalg.eigvalsh(gram(fmap, xs100)).min() >= -1e-9
    _report(3, "kernel normalization k(x,x)=1 and PSD Gram for all map kinds",
            ok, time.perf_counter() - start, 30.0)


def test_criterion_04_bias_variance_identity():
    start = time.perf_counter()
    params = sl.random_params(10, seed=MASTER)
    xs = evaluation_grid(500)
    ensemble = []
    for rep in range(8):
        train = build_dataset(params, 40, 1, 7000 + rep)
        val = build_dataset(params, 10, 1, 8000 + rep)
        ensemble.append(alphatron_train(train, val, sl.truncated_map(10), sl.CLIP01, iters=50))
    report = sl.bias_variance(ensemble, params, xs, shots=1)
    ok = abs(report.mean_explicit_risk - (report.bias_sq + report.variance)) <= 1e-10
    _report(4, "ensemble risk splits exactly into bias^2 + variance",
            ok, time.perf_counter() - start, 30.0)


def test_criterion_05_learner_oracles():
    start = time.perf_counter()
    params = sl.random_params(10, seed=MASTER)
    fmap = sl.truncated_map(10)
    ok = True

    # zero-label fixed point, exact
    zeros = LabeledDataset(xs=np.linspace(0, 6, 20), ys=np.zeros(20), shots=1)
    val0 = LabeledDataset(xs=np.linspace(0, 6, 5), ys=np.zeros(5), shots=1)
    ok = ok and np.all(alphatron_train(zeros, val0, fmap, sl.CLIP01, iters=50).weights == 0.0)

    # single-point hand trace, exact
    one = LabeledDataset(xs=np.array([1.3]), ys=np.array([1.0]), shots=1)
    val1 = LabeledDataset(xs=np.array([2.0]), ys=np.array([1.0]), shots=1)
    traced = alphatron_train(one, val1, fmap, sl.CLIP01, rate=1.0, iters=3, primal_threshold=0)
    ok = ok and traced.alphas[0] == 1.0
    ok = ok and predict(traced, 0.4) == sl.clip01(kernel(fmap, 0.4, 1.3))

    # noiseless degree-1 recovery below 1e-3
    from shotlearn.circuit import ReuploadingParams

    p1 = ReuploadingParams(layers=1, angles=np.zeros((2, 3)))
    f1 = lambda xs: sl.eval_circuit(p1, xs)
    rng = np.random.default_rng(9)
    train = exact_dataset(f1, rng.uniform(0, 2 * np.pi, 200))
    val = exact_dataset(f1, rng.uniform(0, 2 * np.pi, 50))
    hyp = alphatron_train(train, val, sl.truncated_map(1), sl.CLIP01, rate=1.0, iters=50)
    grid = evaluation_grid(500)
    ok = ok and float(np.mean((predict(hyp, grid) - f1(grid)) ** 2)) < 1e-3

    # primal/dual agreement below 1e-10
    tr = build_dataset(params, 50, 2, 7100)
    va = build_dataset(params, 12, 2, 7200)
    primal = alphatron_train(tr, va, fmap, sl.CLIP01, iters=50)
    dual = alphatron_train(tr, va, fmap, sl.CLIP01, iters=50, primal_threshold=0)
    pts = np.random.default_rng(10).uniform(0, 2 * np.pi, 100)
    ok = ok and np.abs(predict(primal, pts) - predict(dual, pts)).max() < 1e-10

    _report(5, "learner oracles: fixed point, hand trace, noiseless recovery, primal=dual",
            ok, time.perf_counter() - start, 5.0)


def test_criterion_06_asymmetry_trend():
    start = time.perf_counter()
    cfg = ExperimentConfig(n1_grid=[8, 240], ns_grid=[1, 10, 100, 200], replicas=5)
    rows = list(run_sweep_asymmetry(cfg)[0].rows)
    risks = {}
    for n1, ns, _rep, risk, _sel in rows:
        risks.setdefault((n1, ns), []).append(risk)

    _, lo_small, _ = bootstrap_mean_ci(risks[(8, 1)])
    _, _, hi_large = bootstrap_mean_ci(risks[(240, 1)])
    ok = hi_large < lo_small

    drop_early = np.mean(risks[(8, 1)]) - np.mean(risks[(8, 10)])
    drop_late = np.mean(risks[(8, 100)]) - np.mean(risks[(8, 200)])
    ok = ok and drop_late < 0.2 * drop_early
    _report(6, "more points beat more shots; shot gains saturate at fixed n1",
            ok, time.perf_counter() - start, 120.0)


def test_criterion_07_single_shot_learnability():
    start = time.perf_counter()
    cfg = ExperimentConfig(n1_grid=[40, 24000], n2_grid=[10, 600], replicas=5)
    tables = run_single_shot_scaling(cfg)
    risk_rows = list(tables[0].rows)
    means = {n1: mean for n1, mean, _std in risk_rows}
    ok = means[24000] < 0.1 * means[40]
    _report(7, "single-shot labels suffice at large n1 (mean risk < 10% of n1=40)",
            ok, time.perf_counter() - start, 300.0)


def test_criterion_08_shot_dependent_bias_variance(bv_ensembles):
    ensembles, f_test, build_time = bv_ensembles
    start = time.perf_counter()
    ci_1 = bootstrap_bias_variance_ci(ensembles[1][0], f_test)
    ci_100 = bootstrap_bias_variance_ci(ensembles[100][0], f_test)
    ok = ci_100["bias_sq_ci"][1] < ci_1["bias_sq_ci"][0]
    ok = ok and ci_100["variance_ci"][1] < ci_1["variance_ci"][0]
    _report(8, "bias^2 and variance both shrink from 1 shot to 100 shots",
            ok, build_time + time.perf_counter() - start, 180.0)


def test_criterion_09_link_function_variance_suppression(bv_ensembles):
    ensembles, f_test, build_time = bv_ensembles
    start = time.perf_counter()
    clip_ci = bootstrap_bias_variance_ci(ensembles[1][0], f_test)
    erm_ci = bootstrap_bias_variance_ci(ensembles[1][1], f_test)
    ok = erm_ci["variance_ci"][0] > clip_ci["variance_ci"][1]
    b_clip, b_erm = clip_ci["bias_sq"], erm_ci["bias_sq"]
    ok = ok and abs(b_clip - b_erm) <= 0.5 * max(b_clip, b_erm)
    _report(9, "dropping the link inflates variance; biases agree within 50%",
            ok, build_time + time.perf_counter() - start, 180.0)


def test_criterion_10_budget_tradeoff():
    start = time.perf_counter()
    cfg = ExperimentConfig(gamma_grid=[0.0, 5.0], ns_grid=list(range(1, 26)), replicas=10)
    rows = list(run_tradeoff(cfg)[0].rows)
    means = {}
    for gamma, ns, _n1, _n2, _rep, risk in rows:
        means.setdefault((gamma, ns), []).append(risk)
    curves = {}
    for (gamma, ns), values in means.items():
        curves.setdefault(gamma, {})[ns] = float(np.mean(values))
    ok = min(curves[0.0], key=curves[0.0].get) == 1
    ok = ok and min(curves[5.0], key=curves[5.0].get) > 1

    bound_rows = list(run_bounds(ExperimentConfig())[1].rows)
    by_gamma = {}
    stars = {}
    for gamma, ns, bound, ns_star in bound_rows:
        by_gamma.setdefault(gamma, {})[ns] = bound
        stars[gamma] = ns_star
    for gamma in (0.0, 1.0, 2.0, 3.0, 4.0, 5.0):
        argmin = min(by_gamma[gamma], key=by_gamma[gamma].get)
        ok = ok and abs(argmin - clamp_shots(stars[gamma])) <= 1
    _report(10, "budget: 1 shot optimal at zero penalty; bound argmin matches closed form",
            ok, time.perf_counter() - start, 300.0)


def test_criterion_11_bound_calculators():
    start = time.perf_counter()
    base = sl.BoundConstants(L=1.0, B=1.0, Delta=1.0, sigma_bar=1.0, delta=0.01)
    c1, c2, c3 = sl.simplified_constants(base)
    reduced = sl.BoundConstants(c1=c1, c2=c2, c3=c3)
    ok = True
    for n1 in (8, 100, 600):
        for ns in (1, 10, 100):
            full = sl.risk_bound_full(base, n1, ns).total
            simple = sl.risk_bound_asymmetry(reduced, n1, ns)
            ok = ok and abs(full - simple) <= 1e-12 * simple

    zero_gamma = sl.BoundConstants(c1=1.0, c2=1.0, c3=1.0, gamma=0.0)
    values = {ns: sl.budget_bound(zero_gamma, 600, ns) for ns in range(1, 26)}
    ok = ok and min(values, key=values.get) == 1

    rng = np.random.default_rng(7)
    for _ in range(50):
        cs = rng.uniform(0.05, 3.0, size=3)
        gamma = rng.uniform(0.0, 10.0)
        c = sl.BoundConstants(c1=cs[0], c2=cs[1], c3=cs[2], gamma=gamma)
        ns_star = sl.optimal_shots(c)
        grid = np.linspace(0.01, max(4.0 * ns_star, 8.0), 100001)
        curve = (cs[0] + cs[2]) * np.sqrt(grid + gamma) + cs[1] * np.sqrt((grid + gamma) / grid)
        ok = ok and abs(grid[int(np.argmin(curve))] - ns_star) <= (grid[1] - grid[0]) + 1e-12
    _report(11, "bound calculators: reduction, zero-penalty minimum, closed-form optimum",
            ok, time.perf_counter() - start, 60.0)


def test_criterion_12_cli_determinism(tmp_path):
    start = time.perf_counter()
    commands = ["target", "learn", "sweep-asymmetry", "single-shot-scaling",
                "bias-variance", "tradeoff", "bounds"]
    ok = True
    for command in commands:
        out1 = tmp_path / command / "run1"
        out2 = tmp_path / command / "run2"
        for out in (out1, out2):
            ok = ok and main([command, "--out", str(out), "--no-plot"]) == EXIT_OK
        names1 = sorted(p.name for p in out1.glob("*.csv"))
        names2 = sorted(p.name for p in out2.glob("*.csv"))
        ok = ok and names1 == names2 and len(names1) > 0
        for name in names1:
            ok = ok and (out1 / name).read_bytes() == (out2 / name).read_bytes()
    _report(12, "every CLI command reruns to byte-identical CSV",
            ok, time.perf_counter() - start, 300.0)


def test_acceptance_csv_rows_parse_as_numbers(tmp_path):
    # schema sanity shared by the acceptance runs: every emitted CSV parses
    assert main(["tradeoff", "--out", str(tmp_path), "--no-plot"]) == EXIT_OK
    with open(tmp_path / "tradeoff.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows
    for row in rows:
        float(row["explicit_risk"])
        int(row["replica"])
