"""Linearized augmented-Lagrangian solver for low-rank representation on S^m.

The problem is

    min_W  1/2 sum_i w_i^T Q_i w_i + lam ||W||_* + nu sum_i sum_{j != i} g_ji |W_ji|
    s.t.   sum_j W_ji = 1  for every column i,

where ``w_i`` is column ``i`` of ``W``.  Each iteration linearizes the smooth
part of the augmented Lagrangian at the current iterate, takes one singular
value thresholding step, and then updates the multipliers and the penalty.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionError, SvdFailure
from .gram import (
    N_MAX,
    build_euclidean_factors,
    build_geodesic_weights,
    build_gram,
    build_tangent_factors,
    lipschitz_bound,
    unit_weights,
)
from .geometry import as_data_matrix

log = logging.getLogger(__name__)

RANK_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the solver.

    ``mu_rule`` picks the linearization weight.  The default ``"lipschitz"``
    uses ``mu_factor * (n * beta + L_Q)``, a majorizer of the smooth part of
    the augmented Lagrangian (the penalty Hessian ``beta 11^T`` has norm
    ``n beta``).  A callable ``f(n, beta, L_Q)`` may be given instead.
    ``w_init`` is ``"uniform"``, ``"random"`` (a random feasible matrix drawn
    from ``seed``) or an explicit ``(n, n)`` array.
    """

    lam: float = 0.1
    nu: float = 0.0
    sigma: float = 1.0
    beta0: float = 1e-6
    beta_max: float = 1e10
    rho: float = 1.1
    eps: float = 1e-8
    max_iters: int = 1000
    mu_rule: object = "lipschitz"
    mu_factor: float = 1.0
    forbid_diagonal: bool = False
    w_init: object = "uniform"
    seed: int = 0
    geometry: str = "sphere"
    n_max: int = N_MAX

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("lam must be nonnegative")
        if not self.nu >= 0:
            raise ValueError("nu must be nonnegative")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 < self.beta0 <= self.beta_max:
            raise ValueError("need 0 < beta0 <= beta_max")
        if not self.rho > 1:
            raise ValueError("rho must exceed 1")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be a positive integer")
        if self.mu_rule != "lipschitz" and not callable(self.mu_rule):
            raise ValueError("mu_rule must be 'lipschitz' or a callable")
        if not self.mu_factor > 0:
            raise ValueError("mu_factor must be positive")
        if self.geometry not in ("sphere", "euclidean"):
            raise ValueError("geometry must be 'sphere' or 'euclidean'")
        if isinstance(self.w_init, str) and self.w_init not in ("uniform", "random"):
            raise ValueError("w_init must be 'uniform', 'random' or an array")

    def to_dict(self):
        d = dataclasses.asdict(self)
        if not isinstance(self.w_init, str):
            d["w_init"] = "array"
        if callable(self.mu_rule):
            d["mu_rule"] = "custom"
        return d


@dataclass
class SolverState:
    W: np.ndarray
    y: np.ndarray
    beta: float
    iter: int = 0


@dataclass(frozen=True)
class IterRecord:
    iter: int
    objective: float
    violation: float
    rank: int
    beta: float
    mu: float


@dataclass
class SolveResult:
    """Outcome of :func:`solve`.

    Non-convergence is reported through ``converged`` rather than raised, so
    the iterate (the most feasible one seen) and the trace survive.
    """

    W: np.ndarray
    trace: list = field(default_factory=list)
    converged: bool = False
    y: np.ndarray | None = None
    lipschitz: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def violation(self) -> float:
        return constraint_violation(self.W)


def constraint_violation(W) -> float:
    """max_i |sum_j W_ji - 1|."""
    return float(np.max(np.abs(np.asarray(W).sum(axis=0) - 1.0)))


def _check_dims(W, grams, gw=None):
    n = W.shape[0]
    if W.ndim != 2 or W.shape != (n, n):
        raise DimensionError(f"W must be square, got {W.shape}")
    if grams.shape != (n, n, n):
        raise DimensionError(f"grams must have shape {(n, n, n)}, got {grams.shape}")
    if gw is not None and gw.shape != (n, n):
        raise DimensionError(f"weights must have shape {(n, n)}, got {gw.shape}")


def _svd(A):
    try:
        return np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc


def objective(W, grams, gw, lam, nu) -> float:
    """Value of the constrained objective at ``W`` (constraint not included)."""
    W = np.asarray(W, dtype=float)
    grams = np.asarray(grams, dtype=float)
    gw = np.asarray(gw, dtype=float)
    _check_dims(W, grams, gw)
    quad = kernels.quad_form_sum(np.ascontiguousarray(grams), W)
    nuc = float(np.linalg.svd(W, compute_uv=False).sum()) if lam else 0.0
    l1 = float(np.sum(gw * np.abs(W))) if nu else 0.0
    return 0.5 * quad + lam * nuc + nu * l1


def gradient_F(state: SolverState, grams, gw, nu) -> np.ndarray:
    """Gradient of the linearized part (smooth terms plus ℓ1 subgradient).

    Column ``i`` is ``Q_i w_i + nu s_i + (y_i + beta (sum_j W_ji - 1)) 1`` with
    ``(s_i)_j = g_ji sign(W_ji)`` and ``sign(0) = 0``.
    """
    W = np.asarray(state.W, dtype=float)
    _check_dims(W, grams, gw)
    out = np.empty_like(W)
    kernels.gradient(grams, W, np.ascontiguousarray(state.y, dtype=float),
                     float(state.beta), float(nu), np.ascontiguousarray(gw), out)
    return out


def _threshold(A, tau):
    U, s, Vt = _svd(A)
    s = np.maximum(s - tau, 0.0)
    r = int(np.count_nonzero(s))
    W = (U[:, :r] * s[:r]) @ Vt[:r]
    return W, s


def svt_step(state: SolverState, G, mu, lam, forbid_diagonal=False) -> np.ndarray:
    """Singular value thresholding of ``A = W - G / mu`` at level ``lam / mu``.

    The result minimizes ``mu/2 ||W - A||_F^2 + lam ||W||_*``.  With
    ``forbid_diagonal`` the diagonal is zeroed afterwards.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    A = state.W - np.asarray(G) / mu
    W, _ = _threshold(A, lam / mu)
    if forbid_diagonal:
        np.fill_diagonal(W, 0.0)
    return W


def update_multipliers(state: SolverState, rho=1.1, beta_max=1e10) -> SolverState:
    """Dual ascent on the column-sum constraints, then grow the penalty."""
    viol = state.W.sum(axis=0) - 1.0
    return SolverState(
        W=state.W,
        y=state.y + state.beta * viol,
        beta=min(rho * state.beta, beta_max),
        iter=state.iter + 1,
    )


def initial_w(n, w_init="uniform", seed=0) -> np.ndarray:
    if isinstance(w_init, str):
        if w_init == "uniform":
            return np.full((n, n), 1.0 / n)
        if w_init == "random":
            R = np.random.default_rng(seed).random((n, n)) + 0.05
            return R / R.sum(axis=0)
        raise ValueError(f"unknown w_init {w_init!r}")
    W = np.array(w_init, dtype=float)
    if W.shape != (n, n):
        raise DimensionError(f"w_init must have shape {(n, n)}, got {W.shape}")
    return W


def _mu(config, n, beta, L):
    if callable(config.mu_rule):
        return float(config.mu_rule(n, beta, L))
    return config.mu_factor * (n * beta + L)


def solve_grams(grams, gw, config: SolverConfig) -> SolveResult:
    """Run the ALM loop on precomputed ``Q_i`` stack and ℓ1 weights."""
    grams = np.ascontiguousarray(grams, dtype=float)
    gw = np.ascontiguousarray(gw, dtype=float)
    n = grams.shape[0]
    W0 = initial_w(n, config.w_init, config.seed)
    _check_dims(W0, grams, gw)
    L = lipschitz_bound(grams)
    lam, nu = config.lam, config.nu

    state = SolverState(W=W0, y=np.zeros(n), beta=config.beta0)
    trace = []
    best_W, best_viol = W0, np.inf
    converged = False
    for it in range(int(config.max_iters)):
        mu = _mu(config, n, state.beta, L)
        G = gradient_F(state, grams, gw, nu)
        A = state.W - G / mu
        W, s = _threshold(A, lam / mu)
        if config.forbid_diagonal:
            np.fill_diagonal(W, 0.0)
            s = np.linalg.svd(W, compute_uv=False)
        if not np.all(np.isfinite(W)):
            log.warning("non-finite iterate at iteration %d; stopping", it)
            break
        beta_used = state.beta
        state = update_multipliers(SolverState(W, state.y, state.beta, state.iter),
                                   config.rho, config.beta_max)
        viol = constraint_violation(W)
        obj = 0.5 * kernels.quad_form_sum(grams, W) + lam * float(s.sum())
        if nu:
            obj += nu * float(np.sum(gw * np.abs(W)))
        rank = int(np.count_nonzero(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
        trace.append(IterRecord(it + 1, obj, viol, rank, beta_used, mu))
        if viol <= best_viol:
            best_W, best_viol = W, viol
        if viol < config.eps:
            converged = True
            break

    if not converged:
        log.info("not converged after %d iterations (violation %.3g)",
                 len(trace), best_viol)
    W_out = state.W if converged else best_W
    return SolveResult(W=W_out, trace=trace, converged=converged, y=state.y, lipschitz=L)


def problem_terms(data, config: SolverConfig, threads=None):
    """Build ``(grams, weights)`` for ``data`` under ``config.geometry``."""
    if config.geometry == "sphere":
        X = as_data_matrix(data)
        V = build_tangent_factors(X, n_max=config.n_max, threads=threads)
        gw = build_geodesic_weights(X, config.sigma)
    else:
        X = np.asarray(data, dtype=float)
        V = build_euclidean_factors(X, n_max=config.n_max, threads=threads)
        gw = unit_weights(X.shape[0])
    return build_gram(V, threads=threads), gw


def solve(data, config: SolverConfig | None = None, threads=None) -> SolveResult:
    """Compute the low-rank representation of ``data``.

    Parameters
    ----------
    data : sequence of SpherePoint or array of shape (n, d)
        Points on the unit sphere (rows); any real vectors when
        ``config.geometry == "euclidean"``.
    config : SolverConfig, optional

    Returns
    -------
    SolveResult
        ``W`` has column ``i`` equal to the representation of point ``i``.
    """
    config = config or SolverConfig()
    grams, gw = problem_terms(data, config, threads)
    return solve_grams(grams, gw, config)
