"""Blind source separation test bed: correlated short mixtures and baselines.

Generates five linear mixtures of a sine and an exponentially modulated sine
whose mixing vectors are unit norm with inner product 0.1, and compares PCA,
a fourth-order-cumulant ICA, CPD, Tucker, and rank-(2,2,1) BTD separations on
the Hankel tensor of the mixtures.
"""
from __future__ import annotations

import numpy as np

from . import linalg
from .btd import btd_ll1_als, extract_sources, mixing_matrix
from .cpd import cpd_als
from .metrics import compute_sae
from .tensorize import hankel_tensorize
from .tucker import hooi
from .validation import check_rng

__all__ = [
    "make_sources", "make_mixing", "make_mixture", "add_noise",
    "pca_mixing_estimate", "cumulant_ica", "run_shootout", "SHOOTOUT_METHODS",
]

SHOOTOUT_METHODS = ("pca", "ica", "cpd", "tkd", "btd")

_TIME_STEP = 1.0 / 180.0  # 60 samples leave the 3 Hz sine 1.7% short of a period


def make_sources(n_samples: int = 60) -> np.ndarray:
    """Two correlated sources sampled at t_k = k/180, one per row."""
    t = np.arange(n_samples) * _TIME_STEP
    s1 = np.sin(6 * np.pi * t)
    s2 = np.exp(10 * t) * np.sin(20 * np.pi * t)
    return np.vstack([s1, s2])


def make_mixing(n_channels: int = 5, inner: float = 0.1, rng=0) -> np.ndarray:
    """Random unit-norm mixing vectors a1, a2 with a1 . a2 = `inner`."""
    rng = check_rng(rng)
    a1 = rng.standard_normal(n_channels)
    a1 /= np.linalg.norm(a1)
    u = rng.standard_normal(n_channels)
    u -= (u @ a1) * a1
    u /= np.linalg.norm(u)
    a2 = inner * a1 + np.sqrt(1.0 - inner ** 2) * u
    return np.column_stack([a1, a2])


def make_mixture(n_samples: int = 60, n_channels: int = 5, rng=0):
    """Returns (mixtures, mixing, sources) with mixtures = mixing @ sources."""
    rng = check_rng(rng)
    sources = make_sources(n_samples)
    mixing = make_mixing(n_channels, rng=rng)
    return mixing @ sources, mixing, sources


def add_noise(x: np.ndarray, snr_db: float | None, rng) -> np.ndarray:
    """White Gaussian noise at the requested SNR; None or inf leaves x clean."""
    if snr_db is None or np.isinf(snr_db):
        return x.copy()
    rng = check_rng(rng)
    noise = rng.standard_normal(x.shape)
    signal_power = np.mean(x ** 2)
    noise_power = np.mean(noise ** 2)
    scale = np.sqrt(signal_power / (noise_power * 10.0 ** (snr_db / 10.0)))
    return x + scale * noise


def pca_mixing_estimate(x: np.ndarray, n_components: int) -> np.ndarray:
    """Leading left singular vectors of the (centered) mixtures."""
    centered = x - x.mean(axis=1, keepdims=True)
    return linalg.orth_leading(centered, n_components)


def _kurtosis_contrast(z: np.ndarray) -> float:
    k4 = np.mean(z ** 4, axis=1) - 3.0 * np.mean(z ** 2, axis=1) ** 2
    return float(np.sum(k4 ** 2))


def _best_rotation(pair: np.ndarray) -> float:
    """Angle in [-pi/4, pi/4) maximizing the fourth-order contrast of a 2-row pair."""
    thetas = np.linspace(-np.pi / 4, np.pi / 4, 721, endpoint=False)
    scores = np.empty_like(thetas)
    for i, th in enumerate(thetas):
        c, s = np.cos(th), np.sin(th)
        rot = np.array([[c, s], [-s, c]])
        scores[i] = _kurtosis_contrast(rot @ pair)
    best = int(np.argmax(scores))
    # parabolic refinement around the grid maximum
    lo, hi = best - 1, (best + 1) % len(thetas)
    y0, y1, y2 = scores[lo], scores[best], scores[hi]
    denom = y0 - 2 * y1 + y2
    step = thetas[1] - thetas[0]
    offset = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom * step
    return float(thetas[best] + offset)


def cumulant_ica(x: np.ndarray, n_components: int, n_sweeps: int = 3) -> np.ndarray:
    """Mixing estimate by whitening plus pairwise fourth-order-cumulant rotations.

    A deliberately minimal routine: after PCA whitening, Jacobi sweeps rotate
    each component pair to maximize the summed squared kurtosis.  Adequate for
    small channel counts; labeled "ICA (cumulant)" in demo outputs.
    """
    centered = x - x.mean(axis=1, keepdims=True)
    u, s, _ = linalg.svd(centered, full_matrices=False)
    u = u[:, :n_components]
    s = s[:n_components]
    z = (u / s).T @ centered
    q = np.eye(n_components)
    for _ in range(n_sweeps):
        for p in range(n_components - 1):
            for r in range(p + 1, n_components):
                theta = _best_rotation(z[[p, r]])
                c, sn = np.cos(theta), np.sin(theta)
                giv = np.eye(n_components)
                giv[p, p] = giv[r, r] = c
                giv[p, r] = sn
                giv[r, p] = -sn
                z = giv @ z
                q = giv @ q
    return u @ np.diag(s) @ q.T


def _aligned_min_correlation(true_rows: np.ndarray, est_rows: np.ndarray) -> float:
    from scipy.optimize import linear_sum_assignment
    a = true_rows / np.linalg.norm(true_rows, axis=1, keepdims=True)
    b = est_rows / np.linalg.norm(est_rows, axis=1, keepdims=True)
    corr = np.abs(a @ b.T)
    rows, cols = linear_sum_assignment(-corr)
    return float(corr[rows, cols].min())


def run_shootout(n_samples: int = 60, snr_db: float | None = None, seed: int = 0,
                 hankel_rows: int | None = None, hankel_cols: int | None = None,
                 noise_on_tensor: bool = False, tucker_ranks=(4, 4, 2)) -> dict:
    """One Example-style comparison run; returns SAE per method plus extras.

    By default noise is added to the channel mixtures before Hankelization;
    `noise_on_tensor` instead perturbs the Hankel tensor of clean mixtures.
    """
    rng = check_rng(seed)
    x, mixing, sources = make_mixture(n_samples, rng=rng)
    if hankel_rows is None:
        hankel_rows = (n_samples + 1) * 2 // 5
    if hankel_cols is None:
        hankel_cols = n_samples + 1 - hankel_rows

    if noise_on_tensor:
        tensor = hankel_tensorize(x, hankel_rows, hankel_cols)
        tensor = add_noise(tensor, snr_db, rng)
        x_noisy = x
    else:
        x_noisy = add_noise(x, snr_db, rng)
        tensor = hankel_tensorize(x_noisy, hankel_rows, hankel_cols)

    results = {
        "n_samples": n_samples,
        "snr_db": np.inf if snr_db is None else snr_db,
        "source_correlation": abs(float(sources[0] @ sources[1]))
        / (np.linalg.norm(sources[0]) * np.linalg.norm(sources[1])),
    }

    results["pca_sae_db"] = compute_sae(mixing, pca_mixing_estimate(x_noisy, 2))
    results["ica_sae_db"] = compute_sae(mixing, cumulant_ica(x_noisy, 2))

    cp_model, _ = cpd_als(tensor, 2, max_iters=300)
    results["cpd_sae_db"] = compute_sae(mixing, cp_model.factors[2])

    tucker_ranks = tuple(min(r, d) for r, d in zip(tucker_ranks, tensor.shape))
    tkd_model, _ = hooi(tensor, tucker_ranks)
    angles = linalg.subspace_angles(tkd_model.factors[2][:, :2], mixing)
    results["tkd_subspace_angle_rad"] = float(np.max(angles))

    best_terms, best_fit = None, -np.inf
    for restart in range(3):
        terms, trace = btd_ll1_als(tensor, 2, 2, max_iters=400,
                                   rng=np.random.default_rng((seed, restart)))
        if trace.final_fit > best_fit:
            best_terms, best_fit = terms, trace.final_fit
    results["btd_sae_db"] = compute_sae(mixing, mixing_matrix(best_terms))
    results["btd_fit"] = best_fit

    est_sources = extract_sources(best_terms, tensor)
    results["btd_source_correlation_min"] = _aligned_min_correlation(sources, est_sources)
    return results
