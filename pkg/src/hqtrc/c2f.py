"""Coarse-to-fine completion: global HQWTRR, then jittered patch refinement.

Spatial modes are the first two modes of the data tensor (I1 x I2 x n for
images, I1 x I2 x n x f for video).  Patch origins are 1-based and refer to
the unpadded image.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .hqwtrr import SolveReport, SolverConfig, solve
from .tensor import reshape


@dataclass(frozen=True)
class PatchPlan:
    m: int = 36
    o: int = 18
    l: int = 2
    sigma_w: float = 0.3
    w0: float = 0.2

    def __post_init__(self):
        if self.m < 1 or not 0 <= self.o < self.m:
            raise ValueError(f"need 0 <= o < m, got m={self.m}, o={self.o}")
        if self.l < 0:
            raise ValueError("jitter length must be >= 0")
        if not self.sigma_w > 0:
            raise ValueError("sigma_w must be positive")
        if not 0 <= self.w0 <= 1:
            raise ValueError("w0 must lie in [0, 1]")

    def origins(self, spatial_dims: Sequence[int]) -> list[tuple[int, int]]:
        return plan_patches(spatial_dims, self.m, self.o)


@dataclass(frozen=True)
class RankRule:
    """Equal-rank heuristic: global 0.2*sqrt(p*I1*I2), local 0.5*sqrt(p)*m*f^(1/3)."""

    global_coeff: float = 0.2
    local_coeff: float = 0.5

    def __post_init__(self):
        if not (self.global_coeff > 0 and self.local_coeff > 0):
            raise ValueError("rank coefficients must be positive")

    def global_rank(self, p: float, i1: int, i2: int) -> int:
        return max(1, int(math.floor(self.global_coeff * math.sqrt(p * i1 * i2) + 0.5)))

    def local_rank(self, p: float, m: int, frames: int = 1) -> int:
        return max(1, int(math.floor(self.local_coeff * math.sqrt(p) * m * frames ** (1 / 3) + 0.5)))


def pad_mirror(t: np.ndarray, l: int) -> np.ndarray:
    """Reflect ``l`` pixels on both spatial modes without repeating the edge pixel."""
    t = np.asarray(t, dtype=np.float64)
    if l < 0:
        raise ValueError("padding must be >= 0")
    if l == 0:
        return t.copy()
    if t.ndim < 2 or min(t.shape[:2]) < l + 1:
        raise ValueError(f"padding {l} too large for spatial dims {t.shape[:2]}")
    widths = [(l, l), (l, l)] + [(0, 0)] * (t.ndim - 2)
    return np.pad(t, widths, mode="reflect")


def unpad(t: np.ndarray, l: int) -> np.ndarray:
    if l == 0:
        return t
    return t[l:-l, l:-l, ...]


def _axis_origins(dim: int, m: int, o: int) -> list[int]:
    if m > dim:
        raise ValueError(f"patch size {m} exceeds dimension {dim}")
    stride = m - o
    out = list(range(1, dim - m + 2, stride))
    if out[-1] != dim - m + 1:
        out.append(dim - m + 1)
    return out


def plan_patches(spatial_dims: Sequence[int], m: int, o: int) -> list[tuple[int, ...]]:
    """1-based origins per axis with stride m - o, tail clamped; Cartesian product."""
    if not 0 <= o < m:
        raise ValueError(f"need 0 <= o < m, got m={m}, o={o}")
    axes = [_axis_origins(int(n), m, o) for n in spatial_dims]
    grid = np.meshgrid(*axes, indexing="ij")
    return [tuple(int(v) for v in pt) for pt in zip(*(g.ravel() for g in grid))]


def jitter_offsets(l: int) -> list[tuple[int, int]]:
    return [(dy, dx) for dy in range(-l, l + 1) for dx in range(-l, l + 1)]


def jitter_stack(padded: np.ndarray, origin: Sequence[int], m: int, l: int) -> np.ndarray:
    """Stack the (2l+1)^2 shifted m x m crops around a 1-based padded-frame origin.

    The shift index is the last mode, ordered row-major over (dy, dx).
    """
    padded = np.asarray(padded, dtype=np.float64)
    r0, c0 = origin[0] - 1, origin[1] - 1
    h, w = padded.shape[:2]
    if r0 - l < 0 or c0 - l < 0 or r0 + m + l > h or c0 + m + l > w:
        raise IndexError(f"jitter window of origin {tuple(origin)} leaves the padded extent {(h, w)}")
    slices = [padded[r0 + dy:r0 + dy + m, c0 + dx:c0 + dx + m, ...] for dy, dx in jitter_offsets(l)]
    return np.stack(slices, axis=-1)


def combine(s, s_hat, p_s) -> np.ndarray:
    s, s_hat, p_s = (np.asarray(a, dtype=np.float64) for a in (s, s_hat, p_s))
    if not s.shape == s_hat.shape == p_s.shape:
        raise ValueError(f"shape mismatch: {s.shape}, {s_hat.shape}, {p_s.shape}")
    return p_s * s + (1 - p_s) * s_hat


def confidence_weights(s_c, s_hat, p_s, sigma_w: float, w0: float) -> np.ndarray:
    """exp(-(S_c - S_hat)^2 / 2 sigma_w^2) on observed entries, ``w0`` elsewhere.

    ``sigma_w = inf`` gives weight 1 on observed entries.
    """
    if not sigma_w > 0:
        raise ValueError("sigma_w must be positive")
    s_c, s_hat, p_s = (np.asarray(a, dtype=np.float64) for a in (s_c, s_hat, p_s))
    diff = s_c - s_hat
    observed = np.exp(-(diff * diff) / (2 * sigma_w * sigma_w))
    return np.where(p_s != 0, observed, w0)


def aggregate(patches: Iterable[tuple[Sequence[int], np.ndarray]], shape: Sequence[int],
              border: int = 0, border_modes: int | None = None) -> np.ndarray:
    """Average overlapping blocks placed at 1-based origins, then strip ``border``.

    The border is removed from the first ``border_modes`` modes (default:
    all).  Blocks are accumulated in sorted origin order so the result does
    not depend on the order in which they were produced.
    """
    shape = tuple(shape)
    total = np.zeros(shape)
    count = np.zeros(shape)
    items = sorted(((tuple(o), np.asarray(b, dtype=np.float64)) for o, b in patches),
                   key=lambda item: item[0])
    for origin, block in items:
        region = tuple(slice(o - 1, o - 1 + n) for o, n in zip(origin, block.shape))
        total[region] += block
        count[region] += 1
    nb = len(shape) if border_modes is None else border_modes
    inner = tuple(slice(border, n - border) for n in shape[:nb])
    if np.any(count[inner] == 0):
        raise RuntimeError("patch plan left pixels uncovered")
    out = np.divide(total, count, out=np.zeros(shape), where=count > 0)
    return out[inner] if border else out


@dataclass
class C2FResult:
    output: np.ndarray
    global_estimate: np.ndarray
    global_report: SolveReport
    patch_reports: dict[tuple[int, int], SolveReport] = field(default_factory=dict)
    global_rank: int = 0
    local_rank: int = 0


def global_complete(m, mask, cfg: SolverConfig, rule: RankRule = RankRule(),
                    global_dims: Sequence[int] | None = None) -> tuple[np.ndarray, SolveReport, int]:
    """Single-stage HQTRC: HQWTRR with the binary mask as weights."""
    m = np.asarray(m, dtype=np.float64)
    mask = (np.asarray(mask) != 0).astype(np.float64)
    p = float(mask.mean())
    rank = cfg.ranks[0] if cfg.ranks else rule.global_rank(p, m.shape[0], m.shape[1])
    if global_dims:
        mm, ww = reshape(m, global_dims), reshape(mask, global_dims)
    else:
        mm, ww = m, mask
    gcfg = replace(cfg, ranks=(rank,), d=None if cfg.d is None else min(cfg.d, mm.ndim))
    x, report = solve(mm, ww, gcfg)
    return reshape(x, m.shape), report, rank


class PatchSolveError(RuntimeError):
    def __init__(self, origin, cause):
        super().__init__(f"patch refinement at origin {origin} failed: {cause}")
        self.origin = origin
        self.cause = cause


def run_c2f_detailed(m, mask, plan: PatchPlan = PatchPlan(), cfg: SolverConfig = SolverConfig(),
                     rule: RankRule = RankRule(), global_dims: Sequence[int] | None = None,
                     shifted_aggregation: bool = False, workers: int = 1,
                     order: Sequence[int] | None = None) -> C2FResult:
    """Global completion followed by weighted patch refinement and aggregation.

    ``order`` permutes the patch processing order (results are independent
    of it); ``workers > 1`` refines patches on a thread pool.
    """
    m = np.asarray(m, dtype=np.float64)
    mask = (np.asarray(mask) != 0).astype(np.float64)
    if m.shape != mask.shape or m.ndim < 3:
        raise ValueError("expected matching spatial-leading tensors of order >= 3")
    m = m * mask
    m_hat, greport, grank = global_complete(m, mask, cfg, rule, global_dims)

    l = plan.l
    m_pad, hat_pad, mask_pad = (pad_mirror(a, l) for a in (m, m_hat, mask))
    p = float(mask.mean())
    frames = int(np.prod(m.shape[3:])) if m.ndim > 3 else 1
    lrank = rule.local_rank(p, plan.m, frames)
    lcfg = replace(cfg, ranks=(lrank,), d=None)
    origins = plan.origins(m.shape[:2])
    if order is not None:
        origins = [origins[i] for i in order]

    def refine(origin):
        po = (origin[0] + l, origin[1] + l)
        s = jitter_stack(m_pad, po, plan.m, l)
        s_hat = jitter_stack(hat_pad, po, plan.m, l)
        p_s = jitter_stack(mask_pad, po, plan.m, l)
        s_c = combine(s, s_hat, p_s)
        w = confidence_weights(s_c, s_hat, p_s, plan.sigma_w, plan.w0)
        try:
            refined, rep = solve(s_c, w, lcfg)
        except (ArithmeticError, np.linalg.LinAlgError) as exc:
            raise PatchSolveError(origin, exc) from exc
        return origin, po, refined, rep

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(refine, origins))
    else:
        results = [refine(o) for o in origins]

    blocks = []
    center = len(jitter_offsets(l)) // 2
    for _, po, refined, _ in results:
        if shifted_aggregation:
            for j, (dy, dx) in enumerate(jitter_offsets(l)):
                blocks.append(((po[0] + dy, po[1] + dx, j), refined[..., j]))
        else:
            blocks.append(((po[0], po[1], center), refined[..., center]))
    out = _aggregate_spatial(blocks, m_pad.shape, l)
    return C2FResult(
        output=out,
        global_estimate=m_hat,
        global_report=greport,
        patch_reports={r[0]: r[3] for r in sorted(results, key=lambda r: r[0])},
        global_rank=grank,
        local_rank=lrank,
    )


def _aggregate_spatial(blocks, padded_shape, l):
    # third key component only disambiguates shifted slices for sorting
    keyed = sorted(blocks, key=lambda b: b[0])
    return aggregate(((o[:2] + (1,) * (len(padded_shape) - 2), b) for o, b in keyed),
                     padded_shape, l, border_modes=2)


def run_c2f(m, mask, plan: PatchPlan = PatchPlan(), cfg: SolverConfig = SolverConfig(),
            rule: RankRule = RankRule(), **kwargs) -> np.ndarray:
    return run_c2f_detailed(m, mask, plan, cfg, rule, **kwargs).output
