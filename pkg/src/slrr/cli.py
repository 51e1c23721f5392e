"""Command-line driver.

Exit codes: 0 ok, 1 I/O error, 2 invalid input, 3 solver did not converge,
4 degenerate clustering result.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from . import formats, pipeline
from .clustering import clustering_accuracy
from .classify import accuracy
from .errors import AntipodalError, DegenerateAffinityError, DimensionError
from .features import derive_seed, snr_from_db
from .gram import thread_count
from .pipeline import FeatureSpec
from .solver import SolverConfig, solve
from .synth import SynthSpec, generate

log = logging.getLogger("slrr")

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_DEGENERATE = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


def _add_data_args(p):
    p.add_argument("input", help="CSV dataset or SLRR binary matrix")
    p.add_argument("--kind", choices=pipeline.KINDS,
                   help="raw values, histogram counts, or sphere points (default: from file, else raw)")
    p.add_argument("--bins", type=int, default=6, help="histogram bins per axis (default 6)")
    p.add_argument("--dims", type=int, default=1, help="raw values form DIMS-vectors (default 1)")
    p.add_argument("--smooth", type=float, default=0.0, help="pseudo-count added to every bin")
    p.add_argument("--seed", type=int, default=0)


def _add_solver_args(p):
    p.add_argument("--lambda", dest="lam", type=float, default=0.1, help="nuclear-norm weight")
    p.add_argument("--nu", type=float, default=0.01, help="geodesic ℓ1 weight")
    p.add_argument("--sigma", type=float, default=1.0, help="distance scale of the ℓ1 weights")
    p.add_argument("--mu-factor", type=float, default=1.0)
    p.add_argument("--forbid-diagonal", action="store_true")
    p.add_argument("--eps", type=float, default=1e-8, help="constraint tolerance")
    p.add_argument("--max-iters", type=int, default=1000)


def _solver_config(a) -> SolverConfig:
    try:
        return SolverConfig(lam=a.lam, nu=a.nu, sigma=a.sigma, mu_factor=a.mu_factor,
                            forbid_diagonal=a.forbid_diagonal, eps=a.eps,
                            max_iters=a.max_iters, seed=a.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc


def _feature_spec(a) -> FeatureSpec:
    if a.bins < 1 or a.dims < 1 or a.smooth < 0:
        raise CliError("--bins and --dims must be >= 1 and --smooth >= 0", EXIT_INVALID)
    return FeatureSpec(bins=a.bins, dims=a.dims, alpha=a.smooth)


def _load(a) -> pipeline.Dataset:
    try:
        ds = formats.read_dataset(a.input, a.kind)
    except OSError as exc:
        raise CliError(f"cannot read {a.input}: {exc}", EXIT_IO) from exc
    except ValueError as exc:
        raise CliError(f"{a.input}: {exc}", EXIT_INVALID) from exc
    if ds.kind == "sphere":
        try:
            pipeline.validate_sphere_rows(ds.values)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_INVALID) from exc
    if ds.kind == "raw" and ds.values.shape[1] % a.dims:
        raise CliError(f"{ds.values.shape[1]} values per row not divisible by --dims", EXIT_INVALID)
    if len(ds) < 2:
        raise CliError("need at least two samples", EXIT_INVALID)
    return ds


def _effective_config(a, ds, cfg, fs, **extra):
    d = {"solver": cfg.to_dict(), "features": dataclasses.asdict(fs),
         "kind": ds.kind, "input": str(a.input)}
    d.update(extra)
    return d


def cmd_fit(a) -> int:
    ds = _load(a)
    cfg = _solver_config(a)
    fs = _feature_spec(a)
    X = pipeline.sphere_features(ds, fs)
    res = solve(X, cfg)
    formats.write_matrix(a.out, res.W)
    if a.trace:
        formats.write_trace(a.trace, res.trace)
    log.info("%d iterations, violation %.3g, converged=%s",
             res.iterations, res.violation, res.converged)
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _check_labels(ds, need_classes=1):
    if ds.labels is None:
        raise CliError("input has no label column", EXIT_INVALID)
    if np.unique(ds.labels).size < need_classes:
        raise CliError(f"need at least {need_classes} classes", EXIT_INVALID)


def cmd_cluster(a) -> int:
    ds = _load(a)
    cfg = _solver_config(a)
    fs = _feature_spec(a)
    if not 1 <= a.k <= len(ds):
        raise CliError(f"--k must be in [1, {len(ds)}]", EXIT_INVALID)
    out = pipeline.cluster(ds, a.method, a.k, cfg, fs, seed=a.seed, affinity=a.affinity)
    with open(a.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "label"])
        for sid, lab in zip(ds.ids, out.labels):
            w.writerow([sid, int(lab)])
    if a.results:
        acc = None if ds.labels is None else clustering_accuracy(out.labels, ds.labels)
        formats.write_json(a.results, {
            "method": a.method, "k": a.k, "accuracy": acc, "seed": a.seed,
            "converged": out.converged,
            "config": _effective_config(a, ds, cfg, fs, affinity=a.affinity)})
    return EXIT_OK if out.converged else EXIT_NOT_CONVERGED


def cmd_classify(a) -> int:
    ds = _load(a)
    _check_labels(ds, 2)
    cfg = _solver_config(a)
    fs = _feature_spec(a)
    if not 0 < a.split <= 1:
        raise CliError("--split must be in (0, 1]", EXIT_INVALID)
    train, test = pipeline.split_indices(ds.labels, a.split, a.seed)
    if not 1 <= a.k <= len(train):
        raise CliError(f"--k must be in [1, {len(train)}]", EXIT_INVALID)
    methods = a.method or list(pipeline.CLASSIFY_METHODS)
    results, ok = {}, True
    for m in methods:
        tr_pred, te_pred, conv = pipeline.classify_split(ds, m, train, test, cfg, fs, a.k)
        ok &= conv
        results[m] = {
            "train_accuracy": accuracy(tr_pred, ds.labels[train]),
            "test_accuracy": accuracy(te_pred, ds.labels[test]) if len(test) else None,
            "converged": conv,
        }
    payload = {"methods": results, "seed": a.seed, "k": a.k, "split": a.split,
               "n_train": int(len(train)), "n_test": int(len(test)),
               "config": _effective_config(a, ds, cfg, fs)}
    if a.results:
        formats.write_json(a.results, payload)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def _sweep_trial(ds, task, method, snr, trial, a, cfg, fs):
    noise_seed = derive_seed(a.seed, f"{snr!r}/{trial}")
    noisy = pipeline.corrupt(ds, snr, noise_seed) if np.isfinite(snr) else ds
    run_seed = a.seed + trial
    if task == "cluster":
        out = pipeline.cluster(noisy, method, a.k, cfg, fs, seed=run_seed, threads=1)
        return clustering_accuracy(out.labels, ds.labels)
    train, test = pipeline.split_indices(ds.labels, a.split, run_seed)
    _, pred, _ = pipeline.classify_split(noisy, method, train, test, cfg, fs, a.neighbors, threads=1)
    return accuracy(pred, ds.labels[test])


def cmd_noise_sweep(a) -> int:
    ds = _load(a)
    _check_labels(ds, 2 if a.task == "classify" else 1)
    cfg = _solver_config(a)
    fs = _feature_spec(a)
    snrs = [snr_from_db(s) if a.snr_db else s for s in (a.snr or [0.8, 1.6, 3.2, 6.4, 12.8])]
    if any(not s > 0 for s in snrs):
        raise CliError("SNR values must be positive", EXIT_INVALID)
    methods = a.method or (["proposed", "sc", "gncut"] if a.task == "cluster"
                           else ["proposed", "sc", "gknn"])
    allowed = pipeline.CLUSTER_METHODS if a.task == "cluster" else pipeline.CLASSIFY_METHODS
    bad = [m for m in methods if m not in allowed]
    if bad:
        raise CliError(f"methods {bad} are not valid for task {a.task}", EXIT_INVALID)
    if a.task == "cluster" and not (a.k is not None and 1 <= a.k <= len(ds)):
        raise CliError(f"--k must be in [1, {len(ds)}]", EXIT_INVALID)
    if a.trials < 1:
        raise CliError("--trials must be >= 1", EXIT_INVALID)

    jobs = [(m, s, t) for m in methods for s in snrs for t in range(a.trials)]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        accs = list(pool.map(lambda j: _sweep_trial(ds, a.task, *j, a, cfg, fs), jobs))
    rows = sorted(zip(jobs, accs), key=lambda r: (r[0][0], r[0][1], r[0][2]))
    with open(a.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "snr", "trial", "accuracy"])
        for (m, s, t), acc in rows:
            w.writerow([m, formats.fmt(s), t, formats.fmt(acc)])
    return EXIT_OK


def cmd_synth(a) -> int:
    try:
        spec = SynthSpec(k=a.k, n_per=a.n_per, m=a.m, spread=a.spread,
                         min_sep=a.min_sep, seed=a.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc
    s = generate(spec)
    formats.write_dataset(a.out, pipeline.Dataset("sphere", s.points, s.labels))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slrr", description="Low-rank representation on the sphere of square-root densities.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="solve for the coefficient matrix W")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--out", default="w.csv", help="W output (.csv, or .slrr for binary)")
    p.add_argument("--trace", help="per-iteration trace, JSON lines")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cluster", help="subspace clustering with Ncut")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument("--method", choices=pipeline.CLUSTER_METHODS, default="proposed")
    p.add_argument("--affinity", choices=("abs", "wtw"), default="abs")
    p.add_argument("--out", default="labels.csv")
    p.add_argument("--results", default="results.json")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser(
        "classify", help="nearest-neighbour classification",
        description="LRR-based methods solve W jointly over train and test rows "
                    "(transductive) and classify test columns by kNN over train columns.")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--method", action="append", choices=pipeline.CLASSIFY_METHODS,
                   help="repeatable; default: all methods")
    p.add_argument("--split", type=float, default=0.8, help="training fraction per class")
    p.add_argument("--k", type=int, default=1, help="neighbours")
    p.add_argument("--results", help="JSON output (default: stdout)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("noise-sweep", help="accuracy under additive Gaussian noise")
    _add_data_args(p)
    _add_solver_args(p)
    p.add_argument("--task", choices=("cluster", "classify"), default="cluster")
    p.add_argument("--method", action="append", help="repeatable")
    p.add_argument("--snr", type=float, action="append", help="repeatable; linear power ratio")
    p.add_argument("--snr-db", action="store_true", help="read --snr values as decibels")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--k", type=int, help="clusters (required for the cluster task)")
    p.add_argument("--neighbors", type=int, default=1, help="kNN neighbours (classify task)")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--out", default="sweep.csv")
    p.set_defaults(func=cmd_noise_sweep)

    p = sub.add_parser("synth", help="generate a planted-cluster dataset")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n-per", type=int, default=30)
    p.add_argument("--m", type=int, default=9)
    p.add_argument("--spread", type=float, default=0.05)
    p.add_argument("--min-sep", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="synth.csv")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        # single-threaded BLAS keeps results independent of SLRR_THREADS
        with threadpool_limits(limits=1):
            return a.func(a)
    except CliError as exc:
        print(f"slrr: {exc}", file=sys.stderr)
        return exc.code
    except DegenerateAffinityError as exc:
        print(f"slrr: degenerate result: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (AntipodalError, DimensionError, ValueError) as exc:
        print(f"slrr: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"slrr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
