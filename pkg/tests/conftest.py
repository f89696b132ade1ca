"""Shared synthetic-instance builders for the test suite."""
import numpy as np
from scipy.optimize import linear_sum_assignment

from multiway.cpd import CPModel, canonicalize


def random_cp_instance(rng, shape, rank, max_coherence=0.5, max_tries=200):
    """Well-conditioned random CP model: unit factors with bounded mutual coherence."""
    factors = []
    for dim in shape:
        for _ in range(max_tries):
            f = rng.standard_normal((dim, rank))
            f /= np.linalg.norm(f, axis=0)
            gram = np.abs(f.T @ f) - np.eye(rank)
            if gram.max(initial=0.0) <= max_coherence:
                break
        else:
            raise RuntimeError("could not draw a low-coherence factor")
        factors.append(f)
    weights = rng.uniform(1.0, 2.0, size=rank)
    weights[::-1].sort()
    return canonicalize(CPModel(weights=weights, factors=factors))


def aligned_column_correlations(true_factor, est_factor):
    """Per-column |correlation| after the best permutation match."""
    a = true_factor / np.linalg.norm(true_factor, axis=0)
    b = est_factor / np.linalg.norm(est_factor, axis=0)
    corr = np.abs(a.T @ b)
    rows, cols = linear_sum_assignment(-corr)
    return corr[rows, cols]
