"""Canonical polyadic decomposition: model, ALS fitting, and rank diagnostics."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .metrics import FitTrace, relative_fit
from .ops import frobenius_norm, khatri_rao_list, unfold
from .validation import check_matrix, check_rng, check_tensor

__all__ = [
    "CPModel", "UniquenessVerdict", "canonicalize", "cpd_reconstruct", "cpd_als",
    "k_rank", "k_rank_exhaustive", "kruskal_uniqueness", "corcondia",
]

_GRAM_COND_LIMIT = 1e8
_DEGENERACY_RATIO = 1e6


@dataclass
class CPModel:
    """Weighted sum of rank-1 tensors in canonical form.

    `weights` are sorted descending and nonnegative; each factor column has
    unit Euclidean norm, with the sign convention that the largest-magnitude
    entry of every first-factor column is positive (compensated in factor 2).
    """
    weights: np.ndarray
    factors: list[np.ndarray]

    @property
    def rank(self) -> int:
        return int(self.weights.size)

    @property
    def order(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    def reconstruct(self) -> np.ndarray:
        return cpd_reconstruct(self)


@dataclass
class UniquenessVerdict:
    """Result of the k-rank sum test for essential uniqueness."""
    krank_sum: int
    threshold: int
    satisfied: bool
    per_factor_kranks: list[int] = field(default_factory=list)


def _einsum_subscripts(order: int) -> str:
    letters = [chr(ord("a") + k) for k in range(order)]
    return "z," + ",".join(f"{c}z" for c in letters) + "->" + "".join(letters)


def cpd_reconstruct(model: CPModel) -> np.ndarray:
    """Dense tensor of the model: sum over r of weights[r] * outer(columns r)."""
    return np.einsum(_einsum_subscripts(model.order), model.weights, *model.factors)


def canonicalize(model: CPModel) -> CPModel:
    """Return an equivalent model in canonical form; idempotent bit-for-bit."""
    weights = np.asarray(model.weights, dtype=np.float64).copy()
    factors = [np.asarray(f, dtype=np.float64).copy() for f in model.factors]
    rank = weights.size

    for f in factors:
        norms = np.linalg.norm(f, axis=0)
        for r in range(rank):
            if norms[r] == 0.0:
                continue
            if abs(norms[r] - 1.0) > 1e-14:
                f[:, r] /= norms[r]
                weights[r] *= norms[r]

    # negative weights fold their sign into factor 1 (re-fixed below)
    for r in range(rank):
        if weights[r] < 0:
            weights[r] = -weights[r]
            factors[0][:, r] *= -1.0

    if len(factors) >= 2:
        signs = linalg.column_signs(factors[0])
        for r in range(rank):
            if signs[r] < 0:
                factors[0][:, r] *= -1.0
                factors[1][:, r] *= -1.0

    # descending weights; ties broken lexicographically on first-factor columns
    def sort_key(r):
        return (-weights[r],) + tuple(factors[0][:, r])
    order = sorted(range(rank), key=sort_key)
    if order != list(range(rank)):
        weights = weights[order]
        factors = [f[:, order] for f in factors]
    return CPModel(weights=weights, factors=factors)


def _init_factors(t, rank, init, rng):
    if init == "random":
        factors = [rng.standard_normal((dim, rank)) for dim in t.shape]
    elif init == "mlsvd":
        factors = []
        for mode, dim in enumerate(t.shape):
            k = min(rank, dim)
            u = linalg.orth_leading(unfold(t, mode), k)
            if k < rank:
                u = np.hstack([u, rng.standard_normal((dim, rank - k))])
            factors.append(u)
    else:
        raise ValueError(f"unknown init {init!r}")
    return [f / np.maximum(np.linalg.norm(f, axis=0), np.finfo(float).tiny)
            for f in factors]


def _detect_degeneracy(weights, factors, t_norm) -> bool:
    """Diverging-terms check: a weight dwarfing the median, or a mutually
    cancelling pair (rank-1 terms collinear with opposite orientation) whose
    weights exceed the data norm."""
    lam_max = weights.max(initial=0.0)
    med = float(np.median(weights)) if weights.size else 0.0
    if med > 0 and lam_max > _DEGENERACY_RATIO * med:
        return True
    rank = weights.size
    for r, s in itertools.combinations(range(rank), 2):
        if min(weights[r], weights[s]) <= 2.0 * t_norm:
            continue
        prod_cos = 1.0
        for f in factors:
            prod_cos *= float(f[:, r] @ f[:, s])
        if prod_cos < -0.9:
            return True
    return False


def cpd_als(t: np.ndarray, rank: int, *, max_iters: int = 500, tol: float = 1e-10,
            init: str = "mlsvd", rng=0) -> tuple[CPModel, FitTrace]:
    """Fit a rank-`rank` CP model by alternating least squares.

    Each sweep solves the linear subproblem of one factor at a time from the
    Khatri-Rao structure of the unfoldings, through Hadamard-product normal
    equations (or a QR solve when the Gramian condition exceeds 1e8).  The
    relative fit is non-decreasing per sweep up to roundoff; iteration stops
    when the fit change drops below `tol` or after `max_iters` sweeps.

    Returns the model in canonical form and a :class:`FitTrace` whose
    `degenerate` flag reports diverging rank-1 terms (an inappropriate model,
    e.g. an underestimated rank on a tensor with no best rank-R approximation).
    """
    t = check_tensor(t, min_order=2)
    if rank < 1:
        raise ValueError("rank must be >= 1")
    rng = check_rng(rng)
    n_modes = t.ndim
    t_norm = frobenius_norm(t)
    factors = _init_factors(t, rank, init, rng)
    weights = np.ones(rank)
    unfoldings = [unfold(t, n) for n in range(n_modes)]

    trace = FitTrace()
    prev_fit = -np.inf
    for sweep in range(max_iters):
        for n in range(n_modes):
            others = [factors[k] for k in reversed(range(n_modes)) if k != n]
            gram = np.ones((rank, rank))
            for k in range(n_modes):
                if k != n:
                    gram *= factors[k].T @ factors[k]
            kr = khatri_rao_list(others)
            if np.linalg.cond(gram) <= _GRAM_COND_LIMIT:
                scaled = linalg.solve_gram(gram, (unfoldings[n] @ kr).T).T
            else:
                scaled = linalg.lstsq_qr(kr, unfoldings[n].T).T
            weights = np.linalg.norm(scaled, axis=0)
            safe = np.maximum(weights, np.finfo(float).tiny)
            factors[n] = scaled / safe

        fit = relative_fit(t, np.einsum(_einsum_subscripts(n_modes), weights, *factors))
        trace.fits.append(fit)
        trace.n_sweeps = sweep + 1
        improving = fit > prev_fit
        if improving and _detect_degeneracy(weights, factors, t_norm):
            trace.degenerate = True
        if abs(fit - prev_fit) < tol:
            trace.converged = True
            break
        prev_fit = fit

    model = canonicalize(CPModel(weights=weights, factors=factors))
    return model, trace


# ---------------------------------------------------------------------------
# rank diagnostics

def _numerical_rank(m: np.ndarray, tol: float) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def k_rank_exhaustive(m: np.ndarray, tol: float = 1e-10) -> int:
    """Kruskal rank by direct enumeration of every column subset."""
    m = check_matrix(m)
    n_cols = m.shape[1]
    k = 0
    for size in range(1, n_cols + 1):
        for cols in itertools.combinations(range(n_cols), size):
            if _numerical_rank(m[:, cols], tol) < size:
                return k
        k = size
    return k


def k_rank(m: np.ndarray, tol: float = 1e-10) -> int:
    """Largest k such that every k-subset of columns is linearly independent.

    A full-column-rank matrix short-circuits to k = R (subsets of an
    independent set are independent); otherwise subsets up to the numerical
    rank are enumerated, which is intended for matrices with at most ~12
    columns.
    """
    m = check_matrix(m)
    if np.any(np.linalg.norm(m, axis=0) == 0.0):
        return 0
    r = _numerical_rank(m, tol)
    if r == m.shape[1]:
        return r
    k = 0
    for size in range(1, r + 1):
        for cols in itertools.combinations(range(m.shape[1]), size):
            if _numerical_rank(m[:, cols], tol) < size:
                return k
        k = size
    return k


def kruskal_uniqueness(model: CPModel) -> UniquenessVerdict:
    """Certify essential uniqueness via the k-rank sum condition.

    The verdict holds when ``sum_n k_rank(B_n) >= 2R + N - 1``.  A failed
    check certifies nothing: it does not demonstrate non-uniqueness.  In
    particular R = 1 with nonzero factors sums to N < N + 1 and is reported
    unsatisfied even though rank-1 decompositions are trivially unique.
    """
    kranks = [k_rank(f) for f in model.factors]
    threshold = 2 * model.rank + model.order - 1
    total = int(sum(kranks))
    return UniquenessVerdict(
        krank_sum=total,
        threshold=threshold,
        satisfied=total >= threshold,
        per_factor_kranks=kranks,
    )


def corcondia(t: np.ndarray, model: CPModel) -> float:
    """Core consistency diagnostic: 100 when the least-squares core is diagonal.

    Computes the unconstrained core that best maps the model's factors onto
    `t` and scores its distance from the ideal diagonal core of the weights:
    ``100 * (1 - ||G - D||^2 / ||D||^2)``.  Values near 100 indicate the
    chosen rank is adequate; values far below (or negative) indicate
    overfactoring.
    """
    t = check_tensor(t)
    rank = model.rank
    core = t
    for mode, f in enumerate(model.factors):
        s = np.linalg.svd(f, compute_uv=False)
        if s.size and s[-1] <= 1e-10 * s[0]:
            warnings.warn(
                f"factor {mode} is rank deficient; using pseudo-inverse",
                RuntimeWarning,
            )
        core = np.moveaxis(np.tensordot(core, linalg.pinv(f), axes=(mode, 1)), -1, mode)
    ideal = np.zeros((rank,) * model.order)
    idx = (np.arange(rank),) * model.order
    ideal[idx] = model.weights
    denom = float(np.sum(ideal ** 2))
    if denom == 0.0:
        raise ValueError("model has zero weights")
    return 100.0 * (1.0 - float(np.sum((core - ideal) ** 2)) / denom)
