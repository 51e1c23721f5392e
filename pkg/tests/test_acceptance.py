"""Acceptance suite: one PASS/FAIL line per criterion (see the terminal summary).

Run with ``pytest tests/test_acceptance.py -v``.  Each test prints its line,
records it for the summary section, and then asserts it.
"""
import dataclasses
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from slrr import geometry, pipeline
from slrr.clustering import clustering_accuracy
from slrr.features import Histogram, to_sqrt_density
from slrr.gram import build_geodesic_weights, build_gram, build_tangent_factors
from slrr.solver import SolverConfig, SolverState, objective, solve, solve_grams, svt_step
from slrr.synth import SynthSpec, generate

from oracles import nuclear_prox_optimality, projected_subgradient, random_orthant, random_sphere

LAM, NU, SIGMA = 0.1, 0.01, 1.0
CONFIG = SolverConfig(lam=LAM, nu=NU, sigma=SIGMA)
SYNTH = dict(k=3, m=9, spread=0.05, min_sep=0.8)


def _sphere_ds(data):
    return pipeline.Dataset("sphere", data.points, data.labels)


def test_c01_geometry_roundtrip(criterion):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_rt = worst_norm = 0.0
    for m in (2, 9, 49):
        X = random_sphere(rng, 10_000, m + 1)
        G = rng.standard_normal((10_000, m + 1))
        G -= np.einsum("ij,ij->i", G, X)[:, None] * X
        G /= np.linalg.norm(G, axis=1, keepdims=True)
        G *= rng.uniform(0, np.pi / 2, (10_000, 1))
        for x, g in zip(X, G):
            p = geometry.SpherePoint(x)
            v = geometry.TangentVector(p, g)
            y = geometry.exp_map(v)
            back = geometry.log_map(p, y)
            worst_rt = max(worst_rt, float(np.abs(back.vec - v.vec).max()))
            ref = np.arccos(np.clip(x @ y.coords, -1.0, 1.0))
            worst_norm = max(worst_norm, abs(back.norm - ref))
    elapsed = time.perf_counter() - t0
    ok = worst_rt <= 1e-9 and worst_norm <= 1e-9 and elapsed < 5.0
    criterion(1, ok, f"max roundtrip err {worst_rt:.2e}, max |norm - arccos| {worst_norm:.2e}, "
                     f"{elapsed:.2f}s (limits 1e-9, 1e-9, 5s)")


def test_c02_gram_psd(criterion):
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    worst_eig = worst_fac = 0.0
    for trial in range(100):
        n = int(rng.integers(2, 51))
        d = int(rng.integers(2, 22))
        X = random_orthant(rng, n, d) if trial % 2 else random_sphere(rng, n, d)
        V = build_tangent_factors(X)
        Q = build_gram(V)
        ev = np.linalg.eigvalsh(Q)
        scale = np.maximum(ev[:, -1], 1e-300)
        worst_eig = max(worst_eig, float(np.max(-ev[:, 0] / scale)))
        ref = np.matmul(V.transpose(0, 2, 1), V)
        num = np.linalg.norm(Q - ref, axis=(1, 2))
        den = np.maximum(np.linalg.norm(Q, axis=(1, 2)), 1e-300)
        worst_fac = max(worst_fac, float(np.max(num / den)))
    elapsed = time.perf_counter() - t0
    ok = worst_eig <= 1e-8 and worst_fac <= 1e-10 and elapsed < 30.0
    criterion(2, ok, f"worst -min/max eig {worst_eig:.2e}, worst factor residual {worst_fac:.2e}, "
                     f"{elapsed:.2f}s (limits 1e-8, 1e-10, 30s)")


def test_c03_quadratic_form(criterion):
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(2, 8))
        X = random_orthant(rng, n, d)
        Q = build_gram(build_tangent_factors(X), threads=1)
        w = rng.standard_normal(n)
        w = w - (w.sum() - 1.0) / n
        i = int(rng.integers(n))
        tangent = sum(w[j] * geometry.log_map(X[i], X[j]).vec for j in range(n))
        lhs = float(w @ Q[i] @ w)
        worst = max(worst, abs(lhs - tangent @ tangent) / (1.0 + lhs))
    criterion(3, worst <= 1e-8, f"worst scaled gap {worst:.2e} (limit 1e-8)")


def test_c04_svt_prox(criterion):
    rng = np.random.default_rng(404)
    worst_opt = 0.0
    beaten = 0
    for _ in range(200):
        n = int(rng.integers(2, 21))
        A = rng.standard_normal((n, n)) * rng.uniform(0.1, 3.0)
        tau = float(rng.uniform(0.01, 2.0))
        # with W = 0 and G = -A, mu = 1 the step is prox_{tau ||.||_*}(A)
        W = svt_step(SolverState(np.zeros((n, n)), np.zeros(n), 1.0), -A, 1.0, tau)
        res, znorm = nuclear_prox_optimality(W, A, tau, 1e-10)
        worst_opt = max(worst_opt, res, znorm - 1.0)

        def prox_obj(M):
            return (0.5 * np.sum((M - A) ** 2, axis=(-2, -1))
                    + tau * np.linalg.svd(M, compute_uv=False).sum(axis=-1))

        P = rng.uniform(-1e-2, 1e-2, (10_000, n, n))
        if prox_obj(W + P).min() < prox_obj(W) - 1e-12:
            beaten += 1
    ok = worst_opt <= 1e-8 and beaten == 0
    criterion(4, ok, f"worst optimality residual {worst_opt:.2e}, instances beaten by a "
                     f"perturbation {beaten}/200 (limits 1e-8, 0)")


def test_c05_solver_convergence(criterion):
    t0 = time.perf_counter()
    big = generate(SynthSpec(n_per=30, seed=0, **SYNTH))
    res = solve(big.points, dataclasses.replace(CONFIG, max_iters=500))
    small = generate(SynthSpec(n_per=4, seed=0, **SYNTH))
    X = small.points
    Q = build_gram(build_tangent_factors(X))
    gw = build_geodesic_weights(X, SIGMA)
    f = objective(solve_grams(Q, gw, CONFIG).W, Q, gw, LAM, NU)
    best, _ = projected_subgradient(Q, gw, LAM, NU, steps=1_000_000)
    rel = abs(f - best) / abs(best)
    elapsed = time.perf_counter() - t0
    ok = res.converged and res.violation < 1e-8 and rel <= 1e-3 and elapsed < 120.0
    criterion(5, ok, f"n=90: violation {res.violation:.2e} after {res.iterations} iterations; "
                     f"n=12: rel gap to subgradient oracle {rel:.2e}; {elapsed:.1f}s "
                     f"(limits 1e-8 in 500 its, 1e-3, 120s)")


def test_c06_init_independence(criterion):
    rng = np.random.default_rng(606)
    worst = 0.0
    for t in range(20):
        n = int(rng.integers(6, 31))
        X = random_orthant(rng, n, int(rng.integers(3, 12)))
        Q = build_gram(build_tangent_factors(X))
        gw = build_geodesic_weights(X, SIGMA)
        a = solve_grams(Q, gw, CONFIG)
        b = solve_grams(Q, gw, dataclasses.replace(CONFIG, w_init="random", seed=t))
        fa = objective(a.W, Q, gw, LAM, NU)
        fb = objective(b.W, Q, gw, LAM, NU)
        worst = max(worst, abs(fa - fb) / abs(fa))
    criterion(6, worst <= 1e-3, f"worst relative objective gap {worst:.2e} (limit 1e-3)")


def test_c07_end_to_end_clustering(criterion):
    t0 = time.perf_counter()
    prop, raw = [], []
    for seed in range(10):
        data = generate(SynthSpec(n_per=30, seed=seed, **SYNTH))
        ds = _sphere_ds(data)
        for method, acc in (("proposed", prop), ("ncut-raw", raw)):
            out = pipeline.cluster(ds, method, 3, CONFIG, seed=seed)
            acc.append(clustering_accuracy(out.labels, data.labels))
    elapsed = time.perf_counter() - t0
    mp, mr = float(np.mean(prop)), float(np.mean(raw))
    ok = mp >= 0.95 and mp >= mr and elapsed < 300.0
    criterion(7, ok, f"proposed mean {mp:.4f}, ncut-raw mean {mr:.4f}, {elapsed:.1f}s "
                     f"(need proposed >= 0.95 and >= ncut-raw, < 300s)")


def test_c08_noise_trend(criterion):
    accs = {}
    for seed in range(5):
        data = generate(SynthSpec(n_per=30, seed=seed, **SYNTH))
        ds = _sphere_ds(data)
        out = pipeline.cluster(ds, "proposed", 3, CONFIG, seed=seed)
        accs.setdefault(("proposed", None), []).append(clustering_accuracy(out.labels, data.labels))
        for snr in (0.8, 3.2, 12.8):
            noisy = pipeline.corrupt(ds, snr, seed)
            for method in ("proposed", "sc"):
                out = pipeline.cluster(noisy, method, 3, CONFIG, seed=seed)
                accs.setdefault((method, snr), []).append(
                    clustering_accuracy(out.labels, data.labels))
    mean = {key: float(np.mean(v)) for key, v in accs.items()}
    low_ok = mean[("proposed", 0.8)] >= mean[("sc", 0.8)]
    high_gap = abs(mean[("proposed", 12.8)] - mean[("proposed", None)])
    table = ", ".join(f"{m}@{s}={mean[(m, s)]:.3f}" for s in (0.8, 3.2, 12.8) for m in ("proposed", "sc"))
    criterion(8, low_ok and high_gap <= 0.05,
              f"snr 0.8: proposed {mean[('proposed', 0.8)]:.4f} vs sc {mean[('sc', 0.8)]:.4f}; "
              f"|acc(12.8) - clean| {high_gap:.4f} (limit 0.05); {table}")


def test_c09_feature_pipeline(criterion):
    rng = np.random.default_rng(909)
    worst = 0.0
    negative = 0
    for _ in range(10_000):
        bins = int(rng.integers(1, 40))
        counts = rng.integers(0, 50, bins).astype(float)
        counts[rng.integers(bins)] += 1.0
        p = to_sqrt_density(Histogram(counts, np.arange(bins + 1))).coords
        worst = max(worst, abs(float(np.linalg.norm(p)) - 1.0))
        negative += int(np.any(p < 0))
    ex = to_sqrt_density(Histogram([1, 3], [0, 1, 2])).coords
    ex_err = float(np.abs(ex - [0.5, np.sqrt(0.75)]).max())
    ok = worst <= geometry.UNIT_TOL and negative == 0 and ex_err <= 1e-15
    criterion(9, ok, f"worst |norm - 1| {worst:.2e}, negative outputs {negative}, "
                     f"(1,3) example error {ex_err:.1e} (limit 1e-15)")


def _run_cli(args, threads, cwd):
    env = dict(os.environ, SLRR_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "slrr.cli", *args], cwd=cwd, env=env,
                          capture_output=True, text=True, check=False)


def test_c10_determinism(criterion, tmp_path):
    data = tmp_path / "synth.csv"
    assert _run_cli(["synth", "--seed", "3", "--out", str(data)], 1, tmp_path).returncode == 0
    blobs = {}
    codes = []
    for threads in (1, 8):
        for run in range(2):
            tag = f"t{threads}r{run}"
            r1 = _run_cli(["cluster", str(data), "--k", "3", "--seed", "5",
                           "--out", f"labels_{tag}.csv", "--results", f"res_{tag}.json"],
                          threads, tmp_path)
            r2 = _run_cli(["noise-sweep", str(data), "--k", "3", "--seed", "5",
                           "--snr", "0.8", "--snr", "12.8", "--trials", "2",
                           "--out", f"sweep_{tag}.csv"], threads, tmp_path)
            codes += [r1.returncode, r2.returncode]
            for stem in ("labels", "res", "sweep"):
                ext = "json" if stem == "res" else "csv"
                blobs.setdefault(stem, set()).add((tmp_path / f"{stem}_{tag}.{ext}").read_bytes())
    identical = all(len(v) == 1 for v in blobs.values())
    ok = identical and all(c == 0 for c in codes)
    criterion(10, ok, f"distinct outputs per artifact {dict((k, len(v)) for k, v in blobs.items())}, "
                      f"exit codes {sorted(set(codes))} (need 1 each, all 0)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
