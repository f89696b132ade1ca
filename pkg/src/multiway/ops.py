"""Multilinear algebra primitives on dense float64 ndarrays.

Conventions used throughout the package:

* A tensor is an order-N ``numpy.ndarray``; modes are 0-based in code.
* The canonical linearization is column-major: the element at multi-index
  ``(i_0, ..., i_{N-1})`` sits at flat position ``i_0 + i_1*I_0 + i_2*I_0*I_1 + ...``
  (first mode varies fastest).  ``vectorize`` and the MWT1 file format both
  use this layout, so ``vectorize`` is a zero-copy view of an F-contiguous array.
* ``unfold(t, n)`` orders columns with lower modes varying fastest, which makes
  the Khatri-Rao factorization ``unfold(x, n) == B_n @ diag(w) @ kr(B_{N-1},...,
  skipping n, ..., B_0).T`` of a CP model hold exactly, and likewise the
  Kronecker factorization of a Tucker model.

All operations are pure functions of their inputs and safe to call
concurrently; randomness never enters this module.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .validation import check_matrix, check_mode, check_tensor, check_vector

__all__ = [
    "linear_index", "multi_index", "unfold", "fold", "vectorize",
    "mode_n_product", "multilinear_product", "kronecker", "khatri_rao",
    "khatri_rao_list", "outer", "frobenius_norm", "inner",
]


# ---------------------------------------------------------------------------
# canonical index map (the one place 0-based multi-indices meet flat positions)

def linear_index(idx: Sequence[int], shape: Sequence[int]) -> int:
    """Flat position of 0-based multi-index `idx` under the canonical layout."""
    if len(idx) != len(shape):
        raise ValueError("multi-index length does not match tensor order")
    pos = 0
    stride = 1
    for i, extent in zip(idx, shape):
        if not 0 <= i < extent:
            raise ValueError(f"index {i} out of range for extent {extent}")
        pos += i * stride
        stride *= extent
    return pos


def multi_index(pos: int, shape: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`linear_index`."""
    size = int(np.prod(shape))
    if not 0 <= pos < size:
        raise ValueError(f"flat position {pos} out of range for shape {tuple(shape)}")
    idx = []
    for extent in shape:
        idx.append(pos % extent)
        pos //= extent
    return tuple(idx)


# ---------------------------------------------------------------------------
# reshapes

def unfold(t: np.ndarray, mode: int) -> np.ndarray:
    """Mode-`mode` matricization with lower modes varying fastest along columns.

    The result has ``t.shape[mode]`` rows; column ``sum_k i_k * prod(I_m for
    m < k, m != mode)`` holds the fiber entry at the remaining indices.
    """
    t = check_tensor(t, require_finite=False)
    mode = check_mode(mode, t.ndim)
    return np.reshape(np.moveaxis(t, mode, 0), (t.shape[mode], -1), order="F")


def fold(m: np.ndarray, mode: int, shape: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild the tensor of `shape` from its unfolding."""
    m = check_matrix(m, require_finite=False)
    shape = tuple(int(s) for s in shape)
    mode = check_mode(mode, len(shape))
    rest = shape[:mode] + shape[mode + 1:]
    if m.shape[0] != shape[mode] or m.shape[1] != int(np.prod(rest, dtype=np.int64)):
        raise ValueError(
            f"matrix of shape {m.shape} is incompatible with folding "
            f"shape {shape} at mode {mode}"
        )
    t = np.reshape(m, (shape[mode],) + rest, order="F")
    return np.moveaxis(t, 0, mode)


def vectorize(t: np.ndarray) -> np.ndarray:
    """Canonical vectorization (first mode fastest); a view for F-contiguous input."""
    return np.reshape(np.asarray(t, dtype=np.float64), -1, order="F")


# ---------------------------------------------------------------------------
# products

def mode_n_product(t: np.ndarray, m: np.ndarray, mode: int) -> np.ndarray:
    """Contract mode `mode` of `t` with the columns of matrix `m`.

    Satisfies ``unfold(mode_n_product(t, m, n), n) == m @ unfold(t, n)``;
    products along distinct modes commute.
    """
    t = check_tensor(t, require_finite=False)
    m = check_matrix(m, require_finite=False)
    mode = check_mode(mode, t.ndim)
    if m.shape[1] != t.shape[mode]:
        raise ValueError(
            f"matrix has {m.shape[1]} columns but mode {mode} has extent {t.shape[mode]}"
        )
    out = np.tensordot(t, m, axes=(mode, 1))
    return np.moveaxis(out, -1, mode)


def multilinear_product(t: np.ndarray, factors: Sequence[np.ndarray | None]) -> np.ndarray:
    """Apply one matrix per mode (``None`` skips a mode); order-independent."""
    t = check_tensor(t, require_finite=False)
    if len(factors) != t.ndim:
        raise ValueError(f"expected {t.ndim} factors, got {len(factors)}")
    out = t
    for mode, m in enumerate(factors):
        if m is not None:
            out = mode_n_product(out, m, mode)
    return out


def kronecker(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product: entry ``(i*J0+j, k*J1+l) = a[i,k] * b[j,l]``."""
    return np.kron(check_matrix(a, require_finite=False), check_matrix(b, require_finite=False))


def khatri_rao(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Column-wise Kronecker product; column r is ``kron(a[:, r], b[:, r])``."""
    a = check_matrix(a, require_finite=False)
    b = check_matrix(b, require_finite=False)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column counts differ: {a.shape[1]} vs {b.shape[1]}")
    return (a[:, None, :] * b[None, :, :]).reshape(a.shape[0] * b.shape[0], a.shape[1])


def khatri_rao_list(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Left-associated Khatri-Rao product of two or more matrices."""
    if len(matrices) == 0:
        raise ValueError("need at least one matrix")
    return reduce(khatri_rao, matrices)


def outer(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Outer product of N >= 1 vectors: a rank-1 tensor of order N."""
    if len(vectors) == 0:
        raise ValueError("need at least one vector")
    vs = [check_vector(v, require_finite=False) for v in vectors]
    out = vs[0]
    for v in vs[1:]:
        out = np.multiply.outer(out, v)
    return out


# ---------------------------------------------------------------------------
# inner products and norms

def frobenius_norm(t: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(t, dtype=np.float64).ravel()))


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius inner product; shapes must match exactly."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))
