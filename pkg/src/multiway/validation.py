"""Input validation helpers shared across the package."""
from __future__ import annotations

import numbers

import numpy as np


def check_tensor(x, min_order: int = 1, require_finite: bool = True) -> np.ndarray:
    """Coerce `x` to a float64 ndarray of order >= `min_order`."""
    t = np.asarray(x, dtype=np.float64)
    if t.ndim < min_order:
        raise ValueError(f"expected a tensor of order >= {min_order}, got order {t.ndim}")
    if t.ndim >= 1 and min(t.shape, default=1) < 1:
        raise ValueError("tensor extents must all be >= 1")
    if require_finite and not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite values")
    return t


def check_matrix(x, require_finite: bool = True) -> np.ndarray:
    """Coerce `x` to a 2-D float64 ndarray."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of order {m.ndim}")
    if require_finite and not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite values")
    return m


def check_vector(x, require_finite: bool = True) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64).reshape(-1)
    if require_finite and not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite values")
    return v


def check_mode(mode: int, order: int) -> int:
    """Validate a 0-based mode index against the tensor order."""
    if not isinstance(mode, numbers.Integral):
        raise TypeError(f"mode must be an integer, got {type(mode).__name__}")
    if not 0 <= mode < order:
        raise ValueError(f"mode {mode} out of range for an order-{order} tensor")
    return int(mode)


def check_rng(seed_or_rng) -> np.random.Generator:
    """Accept a seed, a Generator, or None (fresh entropy) and return a Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)
