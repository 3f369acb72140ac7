"""Dense tensor helpers and the circular tensor-ring unfolding.

Tensors are plain ``numpy.ndarray`` objects of dtype float64.  Whenever a
flat value sequence is involved (reshape, file I/O, unfoldings) the first
index varies fastest, i.e. numpy's Fortran ("F") order.  Mode numbers and
multi-indices in the public API are 1-based.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np


def as_tensor(x) -> np.ndarray:
    t = np.asarray(x, dtype=np.float64)
    if t.ndim == 0:
        raise ValueError("a tensor needs at least one mode")
    return t


def linear_index(dims: Sequence[int], index: Sequence[int]) -> int:
    """0-based flat position of a 1-based multi-index, first index fastest.

    >>> linear_index((2, 3, 4), (2, 3, 4))
    23
    """
    if len(dims) != len(index):
        raise ValueError(f"index {tuple(index)} has wrong length for dims {tuple(dims)}")
    pos, stride = 0, 1
    for i, n in zip(index, dims):
        if not 1 <= i <= n:
            raise IndexError(f"index {tuple(index)} out of bounds for dims {tuple(dims)}")
        pos += (i - 1) * stride
        stride *= n
    return pos


def _check_unfold(ndim: int, k: int, d: int) -> None:
    if not 1 <= k <= ndim:
        raise ValueError(f"start mode k={k} outside 1..{ndim}")
    if not 1 <= d <= ndim:
        raise ValueError(f"unfolding depth d={d} outside 1..{ndim}")


def ring_order(ndim: int, k: int) -> list[int]:
    """0-based mode order [k, ..., N, 1, ..., k-1] for a 1-based start mode."""
    return [(k - 1 + j) % ndim for j in range(ndim)]


def unfold_shape(dims: Sequence[int], k: int, d: int) -> tuple[int, int]:
    _check_unfold(len(dims), k, d)
    order = ring_order(len(dims), k)
    rows = int(np.prod([dims[j] for j in order[:d]], dtype=np.int64))
    cols = int(np.prod([dims[j] for j in order[d:]], dtype=np.int64))
    return rows, cols


def tr_unfold(x: np.ndarray, k: int, d: int) -> np.ndarray:
    """TR unfolding X_<k,d>: modes k..k+d-1 (circular) index the rows."""
    x = as_tensor(x)
    rows, cols = unfold_shape(x.shape, k, d)
    y = np.transpose(x, ring_order(x.ndim, k))
    return np.reshape(y, (rows, cols), order="F")


def tr_fold(mat: np.ndarray, dims: Sequence[int], k: int, d: int) -> np.ndarray:
    """Inverse of :func:`tr_unfold`."""
    dims = tuple(int(n) for n in dims)
    mat = np.asarray(mat, dtype=np.float64)
    expected = unfold_shape(dims, k, d)
    if mat.shape != expected:
        raise ValueError(f"matrix shape {mat.shape} does not match unfolding {expected} of {dims}")
    order = ring_order(len(dims), k)
    y = np.reshape(mat, [dims[j] for j in order], order="F")
    return np.transpose(y, np.argsort(order))


def reshape(x: np.ndarray, new_dims: Sequence[int]) -> np.ndarray:
    """Reshape keeping the first-index-fastest value sequence."""
    x = as_tensor(x)
    new_dims = tuple(int(n) for n in new_dims)
    if int(np.prod(new_dims, dtype=np.int64)) != x.size:
        raise ValueError(f"cannot reshape {x.shape} into {new_dims}")
    return np.reshape(x, new_dims, order="F")


def permute(x: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Mode permutation with a 1-based order; new mode j is old mode order[j]."""
    x = as_tensor(x)
    if sorted(order) != list(range(1, x.ndim + 1)):
        raise ValueError(f"{tuple(order)} is not a permutation of 1..{x.ndim}")
    return np.transpose(x, [o - 1 for o in order])


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def hadamard(a, b) -> np.ndarray:
    a, b = as_tensor(a), as_tensor(b)
    _same_shape(a, b)
    return a * b


def add(a, b) -> np.ndarray:
    a, b = as_tensor(a), as_tensor(b)
    _same_shape(a, b)
    return a + b


def sub(a, b) -> np.ndarray:
    a, b = as_tensor(a), as_tensor(b)
    _same_shape(a, b)
    return a - b


def scale(a, s: float) -> np.ndarray:
    return as_tensor(a) * float(s)


def frob_norm(a) -> float:
    return float(np.sqrt(np.sum(np.square(as_tensor(a)))))


def masked_fill(dest, src, mask) -> np.ndarray:
    """Copy of ``dest`` with entries taken from ``src`` wherever ``mask`` is nonzero."""
    dest, src, mask = as_tensor(dest), as_tensor(src), as_tensor(mask)
    _same_shape(dest, src)
    _same_shape(dest, mask)
    return np.where(mask != 0, src, dest)
