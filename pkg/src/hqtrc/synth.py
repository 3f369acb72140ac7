"""Ground-truth tensors built from tensor-ring cores."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrCores:
    """Cores U_k of shape (r_k, I_k, r_{k+1}) with r_{N+1} = r_1."""

    cores: tuple[np.ndarray, ...]

    def __post_init__(self):
        cores = tuple(np.asarray(c, dtype=np.float64) for c in self.cores)
        if not cores:
            raise ValueError("need at least one core")
        for k, c in enumerate(cores):
            if c.ndim != 3:
                raise ValueError(f"core {k + 1} is not third order: shape {c.shape}")
            nxt = cores[(k + 1) % len(cores)]
            if c.shape[2] != nxt.shape[0]:
                raise ValueError(
                    f"rank chain broken between core {k + 1} and core {(k + 1) % len(cores) + 1}: "
                    f"{c.shape[2]} != {nxt.shape[0]}"
                )
            if min(c.shape) < 1:
                raise ValueError(f"core {k + 1} has an empty mode")
        object.__setattr__(self, "cores", cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(c.shape[0] for c in self.cores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)


def tensor_from_cores(cores: TrCores | Sequence[np.ndarray]) -> np.ndarray:
    """Contract the ring: X[i1..iN] = Tr(U_1[:, i1, :] @ ... @ U_N[:, iN, :])."""
    if not isinstance(cores, TrCores):
        cores = TrCores(tuple(cores))
    acc = cores.cores[0]
    r1 = acc.shape[0]
    for core in cores.cores[1:]:
        merged = np.einsum("apb,bic->apic", acc, core)
        acc = merged.reshape(r1, -1, core.shape[2], order="F")
    flat = np.einsum("apa->p", acc)
    return flat.reshape(cores.dims, order="F")


def random_tr_tensor(dims: Sequence[int], ranks: Sequence[int], seed=0,
                     normalize: bool = True) -> tuple[np.ndarray, TrCores]:
    """Standard-normal cores; optionally rescaled so that max |entry| == 1.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if len(dims) != len(ranks):
        raise ValueError("dims and ranks must have the same length")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = len(dims)
    cores = TrCores(tuple(
        rng.standard_normal((ranks[k], dims[k], ranks[(k + 1) % n])) for k in range(n)
    ))
    x = tensor_from_cores(cores)
    if normalize:
        peak = np.max(np.abs(x))
        if peak > 0:
            x = x / peak
            # fold the scale into the first core so the cores still reproduce x
            first = cores.cores[0] / peak
            cores = TrCores((first,) + cores.cores[1:])
    return x, cores


def numerical_rank(mat: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Number of singular values above ``rel_tol * sigma_max``."""
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    s = np.linalg.svd(np.asarray(mat, dtype=np.float64), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
