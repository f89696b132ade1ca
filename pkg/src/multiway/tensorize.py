"""Tensor constructors from lower-order data: Hankelization and quantized reshaping."""
from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .validation import check_vector

__all__ = ["hankelize", "hankel_tensorize", "dehankelize", "quantize"]


def hankelize(signal: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Arrange a length ``rows+cols-1`` signal into a Hankel matrix.

    ``H[i, j] = signal[i + j]`` (0-based), so every anti-diagonal is constant.
    A sampled exponential ``a * z**k`` produces a rank-1 Hankel matrix
    ``a * b b^T`` with ``b = (1, z, z**2, ...)``.
    """
    signal = check_vector(signal)
    if rows < 1 or cols < 1:
        raise ValueError("Hankel extents must be >= 1")
    if signal.size != rows + cols - 1:
        raise ValueError(
            f"signal length {signal.size} != rows + cols - 1 = {rows + cols - 1}"
        )
    return scipy.linalg.hankel(signal[:rows], signal[rows - 1:])


def hankel_tensorize(signals: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Stack per-channel Hankel matrices into an order-3 tensor.

    `signals` has one channel per row; slice ``t[:, :, k]`` is the Hankel
    matrix of channel k, i.e. ``t[i, j, k] = signals[k, i + j]``.
    """
    signals = np.atleast_2d(np.asarray(signals, dtype=np.float64))
    t = np.empty((rows, cols, signals.shape[0]))
    for k in range(signals.shape[0]):
        t[:, :, k] = hankelize(signals[k], rows, cols)
    return t


def dehankelize(h: np.ndarray) -> np.ndarray:
    """Recover a signal from an approximate Hankel matrix by anti-diagonal averaging."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2:
        raise ValueError("expected a matrix")
    i, j = np.indices(h.shape)
    diag = (i + j).ravel()
    sums = np.bincount(diag, weights=h.ravel())
    counts = np.bincount(diag)
    return sums / counts


def quantize(v: np.ndarray, base: int) -> np.ndarray:
    """Reshape a length ``base**L`` vector into an order-L tensor of extent `base`.

    Pure reshape under the canonical layout: mode k carries the k-th
    least-significant base-`base` digit of the 0-based position.
    """
    v = check_vector(v)
    if base < 2:
        raise ValueError("base must be >= 2")
    order = round(math.log(v.size, base))
    if base ** order != v.size:
        raise ValueError(f"length {v.size} is not a power of {base}")
    return v.reshape((base,) * order, order="F")
