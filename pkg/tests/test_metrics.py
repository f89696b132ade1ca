import math

import numpy as np
import pytest

from multiway.metrics import (
    SAE_FLOOR_DB, MetricsReport, compute_psnr, compute_sae, relative_fit,
)


def test_sae_exact_recovery_floors():
    a = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert compute_sae(a, a) == SAE_FLOOR_DB
    # scaling and sign do not matter beyond roundoff in the normalization
    assert compute_sae(a, a * np.array([2.0, -3.0])) <= -140.0


def test_sae_orthogonal_estimate_zero_db():
    a = np.array([[1.0], [0.0]])
    b = np.array([[0.0], [1.0]])
    assert abs(compute_sae(a, b)) < 1e-12


def test_sae_small_perturbation_matches_direct_angle():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 1))
    u = rng.standard_normal(6)
    eps = 1e-4
    est = a + eps * u[:, None]
    got = compute_sae(a, est)
    # independent oracle: principal angle computed directly
    cos = abs(float(a[:, 0] @ est[:, 0])) / (np.linalg.norm(a) * np.linalg.norm(est))
    expected = 10 * math.log10(1 - cos ** 2)
    assert abs(got - expected) < 1e-6
    # and the first-order prediction 20*log10(eps*||u_perp||/||a||)
    u_perp = u - (u @ a[:, 0]) / (a[:, 0] @ a[:, 0]) * a[:, 0]
    approx = 20 * math.log10(eps * np.linalg.norm(u_perp) / np.linalg.norm(a))
    assert abs(got - approx) < 0.01


def test_sae_uses_best_permutation():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    swapped = a[:, ::-1]
    assert compute_sae(a, swapped) == SAE_FLOOR_DB


def test_sae_zero_vector_rejected():
    with pytest.raises(ValueError):
        compute_sae(np.zeros((3, 1)), np.ones((3, 1)))


def test_psnr_hand_computed():
    ref = np.array([[2.0, 0.0], [0.0, 0.0]])
    est = np.array([[1.0, 0.0], [0.0, 0.0]])
    # peak=2, n=4, rss=1 -> 10*log10(16)
    assert abs(compute_psnr(ref, est) - 10 * math.log10(16.0)) < 1e-12


def test_psnr_exact_is_infinite():
    x = np.ones((2, 2))
    assert math.isinf(compute_psnr(x, x))


def test_psnr_shape_mismatch():
    with pytest.raises(ValueError):
        compute_psnr(np.zeros((2, 2)), np.zeros(4))


def test_relative_fit():
    ref = np.array([3.0, 4.0])
    assert relative_fit(ref, ref) == 1.0
    assert abs(relative_fit(ref, np.zeros(2)) - 0.0) < 1e-15
    assert relative_fit(np.zeros(2), np.zeros(2)) == 1.0
    assert relative_fit(np.zeros(2), np.ones(2)) == -np.inf


def test_metrics_report_serializes_infinities_as_none():
    rep = MetricsReport(relative_fit=1.0, residual_norm=0.0, psnr_db=math.inf)
    d = rep.to_dict()
    assert d["psnr_db"] is None
    assert d["relative_fit"] == 1.0
    assert d["sae_db"] is None
