"""Half-quadratic weighted tensor-ring recovery (ADMM with truncated SVDs).

Solves  min_X  sum_k delta(rank(X_<k,d>) <= r_k) + lambda * sum W * f(X - M)
by alternating the HQ weight refresh, per-unfolding rank projections, a
closed-form blend for X and dual ascent.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .loss import AdaptiveC, Estimator, weight_tensor
from .tensor import tr_fold, tr_unfold


class DivergenceError(ArithmeticError):
    """Non-finite values appeared in the iterate; ``report`` holds the history so far."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class SolverConfig:
    mu0: float = 1e-4
    lambda_factor: float = 2.0
    lambda_mode: str = "factor"  # "factor": lambda = lambda_factor * mu * N; "absolute": lambda = lambda_factor
    alpha: float = 1.1
    d: int | None = None  # None -> ceil(N / 2)
    ranks: tuple[int, ...] | None = None
    epsilon: float = 1e-3
    max_iters: int = 300
    min_iters: int = 10
    estimator: str = "cauchy"
    adaptive: AdaptiveC = field(default_factory=AdaptiveC)
    robust: bool = True  # False forces Q = 1 (plain least-squares fit)
    betas: tuple[float, ...] | None = None  # inert under hard rank constraints

    def __post_init__(self):
        if not self.mu0 > 0:
            raise ValueError("mu0 must be positive")
        if not self.alpha >= 1:
            raise ValueError("alpha must be >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.lambda_mode not in ("factor", "absolute"):
            raise ValueError(f"unknown lambda_mode {self.lambda_mode!r}")
        if not self.lambda_factor > 0:
            raise ValueError("lambda must be positive")
        if self.max_iters < 1 or self.min_iters < 2:
            raise ValueError("need max_iters >= 1 and min_iters >= 2")
        if self.ranks is not None:
            object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
            if min(self.ranks) < 1:
                raise ValueError("ranks must be >= 1")
        Estimator(self.estimator)  # validates the family name

    def depth(self, ndim: int) -> int:
        d = math.ceil(ndim / 2) if self.d is None else self.d
        if not 1 <= d <= ndim:
            raise ValueError(f"unfolding depth {d} invalid for order {ndim}")
        return d

    def rank_vector(self, ndim: int) -> tuple[int, ...]:
        if self.ranks is None:
            raise ValueError("SolverConfig.ranks must be set")
        if len(self.ranks) == 1:
            return self.ranks * ndim
        if len(self.ranks) != ndim:
            raise ValueError(f"{len(self.ranks)} ranks given for an order-{ndim} tensor")
        return self.ranks

    def lam(self, mu: float, ndim: int) -> float:
        if self.lambda_mode == "absolute":
            return self.lambda_factor
        return self.lambda_factor * mu * ndim


@dataclass
class SolveReport:
    iterations: int = 0
    termination: str = ""
    c: list[float] = field(default_factory=list)
    mu: list[float] = field(default_factory=list)
    rel_change: list[float] = field(default_factory=list)
    x_norm: list[float] = field(default_factory=list)
    dual_residual: list[float] = field(default_factory=list)

    @property
    def final_rel_change(self) -> float:
        return self.rel_change[-1] if self.rel_change else float("nan")

    def stop_gap(self) -> float:
        """|relchange(t-1) - relchange(t)| at the last iteration."""
        if len(self.rel_change) < 2:
            return float("inf")
        return abs(self.rel_change[-2] - self.rel_change[-1])

    def to_text(self) -> str:
        lines = [
            f"iterations {self.iterations}",
            f"termination {self.termination}",
            f"final_rel_change {self.final_rel_change:.6e}",
            "iter c mu rel_change x_norm dual_residual",
        ]
        for t in range(self.iterations):
            lines.append(
                f"{t + 1} {self.c[t]:.6e} {self.mu[t]:.6e} {self.rel_change[t]:.6e} "
                f"{self.x_norm[t]:.6e} {self.dual_residual[t]:.6e}"
            )
        return "\n".join(lines) + "\n"


def truncated_svd(mat: np.ndarray, r: int) -> np.ndarray:
    """Best rank-r approximation (Eckart-Young); identity when r >= min(mat.shape)."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    mat = np.asarray(mat, dtype=np.float64)
    if r >= min(mat.shape):
        return mat.copy()
    u, s, vt = np.linalg.svd(mat, full_matrices=False)
    return (u[:, :r] * s[:r]) @ vt[:r]


def z_update(x: np.ndarray, g: Sequence[np.ndarray], mu: float, ranks: Sequence[int], d: int) -> list[np.ndarray]:
    z = []
    for k in range(x.ndim):
        target = x - g[k] / mu
        proj = truncated_svd(tr_unfold(target, k + 1, d), ranks[k])
        z.append(tr_fold(proj, x.shape, k + 1, d))
    return z


def blend_factor(w: np.ndarray, q: np.ndarray, mu: float, lam: float, n: int) -> np.ndarray:
    lwq = lam * w * q
    return lwq / (lwq + mu * n)


def x_update(z, g, q, w, m, mu: float, lam: float) -> np.ndarray:
    n = len(z)
    consensus = sum(zk + gk / mu for zk, gk in zip(z, g)) / n
    theta = blend_factor(w, q, mu, lam, n)
    return consensus + theta * (m - consensus)


def g_update(g, z, x, mu: float) -> list[np.ndarray]:
    return [gk + mu * (zk - x) for gk, zk in zip(g, z)]


def solve(m, w, cfg: SolverConfig, x0: np.ndarray | None = None) -> tuple[np.ndarray, SolveReport]:
    """Run HQWTRR on observations ``m`` with entry weights ``w`` in [0, 1].

    Entries with ``w == 0`` are treated as unobserved.  Returns the final
    iterate and a per-iteration report.
    """
    m = np.asarray(m, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if m.shape != w.shape:
        raise ValueError(f"shape mismatch: {m.shape} vs {w.shape}")
    if np.any(w < 0) or np.any(w > 1):
        raise ValueError("weights must lie in [0, 1]")
    n = m.ndim
    d = cfg.depth(n)
    ranks = cfg.rank_vector(n)
    support = w > 0
    has_support = bool(support.any())
    m = np.where(support, m, 0.0)
    est = Estimator(cfg.estimator, cfg.adaptive.c_min)

    x = np.zeros_like(m) if x0 is None else np.array(x0, dtype=np.float64)
    g = [np.zeros_like(m) for _ in range(n)]
    mu = cfg.mu0
    c = cfg.adaptive.c_min
    report = SolveReport()
    prev_norm = float(np.linalg.norm(x))

    for t in range(1, cfg.max_iters + 1):
        with np.errstate(over="ignore", invalid="ignore"):  # non-finite values are checked below
            resid = m - x
            if cfg.robust and has_support:
                c = cfg.adaptive(resid[support])
                q = weight_tensor(est.with_c(c), resid, support)
            else:
                q = support.astype(np.float64)
            z = z_update(x, g, mu, ranks, d)
            x_new = x_update(z, g, q, w, m, mu, cfg.lam(mu, n))
            g = g_update(g, z, x_new, mu)

        if not np.all(np.isfinite(x_new)):
            report.termination = "diverged"
            raise DivergenceError(f"non-finite iterate at iteration {t}", report)

        step = float(np.linalg.norm(x_new - x))
        rel = step / prev_norm if prev_norm > 0 else step
        x = x_new
        prev_norm = float(np.linalg.norm(x))

        report.iterations = t
        report.c.append(float(c))
        report.mu.append(mu)
        report.rel_change.append(rel)
        report.x_norm.append(prev_norm)
        report.dual_residual.append(max(float(np.linalg.norm(zk - x)) for zk in z))

        mu = cfg.mu0 * cfg.alpha ** t
        if t >= cfg.min_iters and report.stop_gap() < cfg.epsilon:
            report.termination = "converged"
            break
    else:
        report.termination = "max_iters"
    return x, report


def lemma1_check(b, c, r: int, tol: float = 1e-12) -> tuple[bool, bool]:
    """With A = P_r(B - C): (||A||^2 < ||B||^2, ||B - A||^2 <= 2 ||C||^2).

    The second test allows ``tol * ||B||^2`` of rounding slack so that the
    C = 0, rank(B) <= r case reads as the equality 0 <= 0.
    """
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if b.shape != c.shape:
        raise ValueError(f"shape mismatch: {b.shape} vs {c.shape}")
    a = truncated_svd(b - c, r)
    cond1 = np.sum(a * a) < np.sum(b * b)
    cond2 = np.sum((b - a) ** 2) <= 2 * np.sum(c * c) + tol * np.sum(b * b)
    return bool(cond1), bool(cond2)
