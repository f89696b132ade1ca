import numpy as np
import pytest
from conftest import aligned_column_correlations, random_cp_instance

from multiway.cpd import (
    CPModel, canonicalize, corcondia, cpd_als, cpd_reconstruct, k_rank,
    k_rank_exhaustive, kruskal_uniqueness,
)
from multiway.ops import khatri_rao, outer, unfold
from multiway.tensorize import hankel_tensorize


def w_tensor():
    """2x2x2 tensor of rank 3 (border rank 2): no best rank-2 approximation."""
    a = np.array([1.0, 0.0])
    b = np.array([0.0, 1.0])
    return outer([a, a, b]) + outer([a, b, a]) + outer([b, a, a])


# ---------------------------------------------------------------------------
# reconstruction

def test_reconstruct_rank1_indicator():
    e = np.array([1.0, 0.0])
    m = CPModel(weights=np.array([1.0]), factors=[e[:, None]] * 3)
    assert np.array_equal(cpd_reconstruct(m), outer([e, e, e]))


def test_reconstruct_matches_khatri_rao_unfolding():
    rng = np.random.default_rng(0)
    m = random_cp_instance(rng, (4, 3, 5), 2)
    recon = cpd_reconstruct(m)
    b1, b2, b3 = m.factors
    expected = b1 @ np.diag(m.weights) @ khatri_rao(b3, b2).T
    assert np.max(np.abs(unfold(recon, 0) - expected)) <= 1e-12


def test_reconstruct_frontal_slices():
    # slice at third index k is A @ diag(C[k, :]) @ B.T
    rng = np.random.default_rng(1)
    m = random_cp_instance(rng, (4, 3, 5), 2)
    recon = cpd_reconstruct(m)
    a, b, c = m.factors
    for k in range(5):
        expected = a @ np.diag(m.weights * c[k, :]) @ b.T
        assert np.allclose(recon[:, :, k], expected, atol=1e-12)


# ---------------------------------------------------------------------------
# canonical form

def test_canonicalize_idempotent_bitwise():
    rng = np.random.default_rng(2)
    raw = CPModel(
        weights=rng.uniform(0.5, 2.0, size=3),
        factors=[rng.standard_normal((d, 3)) for d in (4, 5, 3)],
    )
    once = canonicalize(raw)
    twice = canonicalize(once)
    assert np.array_equal(once.weights, twice.weights)
    for f1, f2 in zip(once.factors, twice.factors):
        assert np.array_equal(f1, f2)


def test_canonicalize_invariants():
    rng = np.random.default_rng(3)
    m = canonicalize(CPModel(
        weights=rng.uniform(0.5, 2.0, size=3),
        factors=[rng.standard_normal((d, 3)) for d in (4, 5, 3)],
    ))
    assert np.all(np.diff(m.weights) <= 0)
    for f in m.factors:
        assert np.allclose(np.linalg.norm(f, axis=0), 1.0, atol=1e-12)
    lead = np.abs(m.factors[0]).argmax(axis=0)
    assert np.all(m.factors[0][lead, np.arange(m.rank)] > 0)


def test_permutation_and_scaling_invariance():
    rng = np.random.default_rng(4)
    m = random_cp_instance(rng, (4, 5, 3), 3)
    perm = [2, 0, 1]
    scales = np.array([2.0, -0.5, 3.0])
    messy = CPModel(
        weights=m.weights[perm] / scales,
        factors=[f[:, perm] * (scales if k == 0 else 1.0)
                 for k, f in enumerate(m.factors)],
    )
    recon_a = cpd_reconstruct(canonicalize(messy))
    recon_b = cpd_reconstruct(m)
    assert np.max(np.abs(recon_a - recon_b)) <= 1e-12


# ---------------------------------------------------------------------------
# ALS

def test_als_exact_rank2_recovery():
    rng = np.random.default_rng(5)
    truth = random_cp_instance(rng, (5, 5, 5), 2)
    t = cpd_reconstruct(truth)
    model, trace = cpd_als(t, 2, max_iters=200)
    assert trace.fits[-1] >= 1 - 1e-8
    assert not trace.degenerate


def test_als_recovers_factors_of_well_conditioned_instances():
    rng = np.random.default_rng(6)
    for trial in range(5):
        shape = tuple(int(rng.integers(5, 8)) for _ in range(3))
        rank = int(rng.integers(2, 4))
        truth = random_cp_instance(rng, shape, rank)
        model, _ = cpd_als(cpd_reconstruct(truth), rank, max_iters=400)
        for f_true, f_est in zip(truth.factors, model.factors):
            corr = aligned_column_correlations(f_true, f_est)
            assert np.all(corr >= 0.999)


def test_als_hankel_exponential_rank1():
    z = 1.3
    signal = 0.7 * z ** np.arange(9)
    t = hankel_tensorize(signal[None, :], 5, 5)
    model, trace = cpd_als(t, 1, max_iters=100)
    b = z ** np.arange(5)
    corr = abs(model.factors[0][:, 0] @ b) / np.linalg.norm(b)
    assert corr >= 1 - 1e-10
    assert trace.fits[-1] >= 1 - 1e-10


def test_als_fit_monotone_nondecreasing():
    rng = np.random.default_rng(7)
    for seed in range(5):
        t = np.random.default_rng(seed).standard_normal((4, 5, 3))
        _, trace = cpd_als(t, 2, max_iters=60, init="random", rng=rng)
        fits = np.array(trace.fits)
        assert np.all(np.diff(fits) >= -1e-10)


def test_als_degeneracy_flag_on_border_rank_instance():
    _, trace = cpd_als(w_tensor(), 2, max_iters=1500, tol=0.0, init="random", rng=11)
    assert trace.degenerate
    assert trace.fits[-1] < 1 - 1e-3


def test_als_input_validation():
    with pytest.raises(ValueError):
        cpd_als(np.zeros((2, 2, 2)), 0)
    bad = np.full((2, 2, 2), np.nan)
    with pytest.raises(ValueError):
        cpd_als(bad, 1)


# ---------------------------------------------------------------------------
# k-rank and uniqueness

def test_k_rank_identity():
    assert k_rank(np.eye(4)) == 4


def test_k_rank_duplicate_columns():
    m = np.ones((3, 2))
    assert k_rank(m) == 1


def test_k_rank_zero_column():
    m = np.zeros((3, 2))
    m[:, 0] = 1.0
    assert k_rank(m) == 0


def test_k_rank_random_full():
    rng = np.random.default_rng(8)
    m = rng.standard_normal((6, 4))
    assert k_rank(m) == 4
    assert k_rank_exhaustive(m) == 4


def test_k_rank_fast_path_agrees_with_oracle():
    rng = np.random.default_rng(9)
    for _ in range(30):
        rows = int(rng.integers(2, 7))
        cols = int(rng.integers(1, 9))
        m = rng.standard_normal((rows, cols))
        if rng.random() < 0.5 and cols >= 2:
            # plant a dependency
            m[:, -1] = m[:, 0] * rng.uniform(0.5, 2.0)
        assert k_rank(m) == k_rank_exhaustive(m)


def test_kruskal_satisfied_generic():
    rng = np.random.default_rng(10)
    m = random_cp_instance(rng, (4, 4, 4), 3)
    verdict = kruskal_uniqueness(m)
    assert verdict.krank_sum == 9
    assert verdict.threshold == 8
    assert verdict.satisfied


def test_kruskal_not_satisfied_collinear():
    rng = np.random.default_rng(11)
    good = rng.standard_normal((4, 2))
    collinear = np.outer(rng.standard_normal(4), [1.0, 2.0])
    m = canonicalize(CPModel(weights=np.ones(2), factors=[collinear, good.copy(), rng.standard_normal((4, 2))]))
    verdict = kruskal_uniqueness(m)
    assert verdict.krank_sum == 5
    assert verdict.threshold == 6
    assert not verdict.satisfied


def test_kruskal_rank1_boundary_not_certified():
    rng = np.random.default_rng(12)
    m = random_cp_instance(rng, (3, 3, 3), 1)
    verdict = kruskal_uniqueness(m)
    assert verdict.krank_sum == 3
    assert verdict.threshold == 4
    assert not verdict.satisfied


# ---------------------------------------------------------------------------
# core consistency

def test_corcondia_exact_model_scores_100():
    rng = np.random.default_rng(13)
    truth = random_cp_instance(rng, (5, 6, 4), 2)
    t = cpd_reconstruct(truth)
    assert abs(corcondia(t, truth) - 100.0) <= 1e-6


def test_corcondia_rank1():
    rng = np.random.default_rng(14)
    truth = random_cp_instance(rng, (4, 4, 4), 1)
    assert abs(corcondia(cpd_reconstruct(truth), truth) - 100.0) <= 1e-6


def test_corcondia_overfactoring_detected():
    rng = np.random.default_rng(15)
    truth = random_cp_instance(rng, (6, 6, 6), 2)
    t = cpd_reconstruct(truth)
    with np.errstate(all="ignore"):
        model, _ = cpd_als(t, 4, max_iters=100, init="random", rng=16)
        with pytest.warns(RuntimeWarning):
            score = corcondia(t, model)
    assert score < 50.0
