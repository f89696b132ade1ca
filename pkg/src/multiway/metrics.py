"""Fit and recovery metrics: relative fit, PSNR, and squared angular error."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .ops import frobenius_norm

__all__ = [
    "MetricsReport", "FitTrace", "relative_fit", "compute_psnr", "compute_sae",
    "SAE_FLOOR_DB",
]

SAE_FLOOR_DB = -300.0


@dataclass
class MetricsReport:
    """Quality summary attached to CLI run manifests."""
    relative_fit: float
    residual_norm: float
    sae_db: float | None = None
    psnr_db: float | None = None

    def to_dict(self) -> dict:
        def _clean(x):
            if x is None or not math.isfinite(x):
                return None
            return float(x)
        return {
            "relative_fit": _clean(self.relative_fit),
            "residual_norm": _clean(self.residual_norm),
            "sae_db": _clean(self.sae_db),
            "psnr_db": _clean(self.psnr_db),
        }


@dataclass
class FitTrace:
    """Per-sweep fit history of an alternating fit."""
    fits: list[float] = field(default_factory=list)
    converged: bool = False
    n_sweeps: int = 0
    degenerate: bool = False

    @property
    def final_fit(self) -> float:
        return self.fits[-1] if self.fits else -np.inf


def relative_fit(reference: np.ndarray, estimate: np.ndarray) -> float:
    """1 - ||reference - estimate|| / ||reference|| (1 is a perfect fit)."""
    ref_norm = frobenius_norm(reference)
    resid = frobenius_norm(np.asarray(reference, dtype=np.float64)
                           - np.asarray(estimate, dtype=np.float64))
    if ref_norm == 0.0:
        return 1.0 if resid == 0.0 else -np.inf
    return 1.0 - resid / ref_norm


def compute_psnr(reference: np.ndarray, estimate: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB: 10*log10(peak^2 * n / sum((ref-est)^2))."""
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if reference.shape != estimate.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {estimate.shape}")
    rss = float(np.sum((reference - estimate) ** 2))
    if rss == 0.0:
        return math.inf
    peak = float(np.max(reference))
    return 10.0 * math.log10(peak ** 2 * reference.size / rss)


def compute_sae(true_vectors: np.ndarray, estimated_vectors: np.ndarray) -> float:
    """Average squared angular error between matched vector sets, in dB.

    Vectors are columns.  Each estimate is matched to a distinct true vector
    by the permutation minimizing the total squared sine of the principal
    angle (sign-invariant), then the mean squared sine is reported as
    ``10*log10(mean)``, floored at ``SAE_FLOOR_DB`` for exact recovery.
    """
    a = np.atleast_2d(np.asarray(true_vectors, dtype=np.float64))
    b = np.atleast_2d(np.asarray(estimated_vectors, dtype=np.float64))
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a, axis=0)
    nb = np.linalg.norm(b, axis=0)
    if np.any(na == 0) or np.any(nb == 0):
        raise ValueError("zero-norm vector")
    an = a / na
    bn = b / nb
    cos2 = (an.T @ bn) ** 2
    rows, cols = linear_sum_assignment(-cos2)
    # squared sine via rejection: accurate where 1 - cos^2 would cancel
    sin2 = [
        float(np.sum((an[:, i] - (an[:, i] @ bn[:, j]) * bn[:, j]) ** 2))
        for i, j in zip(rows, cols)
    ]
    mean_sin2 = float(np.mean(sin2))
    if mean_sin2 <= 10.0 ** (SAE_FLOOR_DB / 10.0):
        return SAE_FLOOR_DB
    return max(10.0 * math.log10(mean_sin2), SAE_FLOOR_DB)
