"""Dense linear-algebra kernels used by every decomposition.

All factorizations delegate to LAPACK through numpy/scipy, which provides
backward-stable SVD (divide and conquer), Householder QR, and SVD-based
pseudo-inverses.  Routing every solver call through this module keeps the
numeric backend swappable in one place.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg


def svd(a: np.ndarray, full_matrices: bool = False):
    """Singular value decomposition, thin by default. Returns (U, s, Vt)."""
    return np.linalg.svd(np.asarray(a, dtype=np.float64), full_matrices=full_matrices)


def qr(a: np.ndarray):
    """Thin Householder QR. Returns (Q, R)."""
    return np.linalg.qr(np.asarray(a, dtype=np.float64))

def pinv(a: np.ndarray, rcond: float = 1e-12) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via SVD."""
    return np.linalg.pinv(np.asarray(a, dtype=np.float64), rcond=rcond)


def lstsq_qr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solve min ||a x - b|| through column-pivoted QR (LAPACK gelsy)."""
    x, *_ = scipy.linalg.lstsq(a, b, lapack_driver="gelsy")
    return x


def solve_gram(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve gram @ x = rhs for a symmetric positive semidefinite Gramian."""
    try:
        return np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        return pinv(gram) @ rhs


def sign_fix_columns(u: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry is positive.

    Makes SVD-derived bases deterministic; returns a new array.
    """
    u = np.array(u, dtype=np.float64, copy=True)
    if u.size == 0:
        return u
    lead = np.abs(u).argmax(axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def column_signs(u: np.ndarray) -> np.ndarray:
    """Signs of each column's largest-magnitude entry (zero maps to +1)."""
    lead = np.abs(u).argmax(axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def orth_leading(a: np.ndarray, k: int) -> np.ndarray:
    """Leading k left singular vectors of `a`, sign-fixed."""
    u, _, _ = svd(a, full_matrices=False)
    return sign_fix_columns(u[:, :k])


def subspace_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (radians, descending) between the column spaces of a and b."""
    return scipy.linalg.subspace_angles(a, b)
