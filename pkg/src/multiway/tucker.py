"""Tucker decompositions: multilinear SVD, truncation, HOOI, and rank estimation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .metrics import FitTrace, relative_fit
from .ops import mode_n_product, multilinear_product, unfold
from .validation import check_tensor

__all__ = [
    "TuckerModel", "MultilinearSpectrum", "mlsvd", "truncated_mlsvd", "hooi",
    "multilinear_rank", "apply_nonnegative_constraint",
]


@dataclass
class TuckerModel:
    """Core tensor transformed by one factor matrix per mode."""
    core: np.ndarray
    factors: list[np.ndarray]
    orthonormal: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if not self.orthonormal:
            self.orthonormal = [True] * len(self.factors)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(self.core.shape)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    def reconstruct(self) -> np.ndarray:
        return multilinear_product(self.core, self.factors)


@dataclass
class MultilinearSpectrum:
    """Mode-wise multilinear singular values, descending per mode."""
    values: list[np.ndarray]

    def mode(self, n: int) -> np.ndarray:
        return self.values[n]


def mlsvd(t: np.ndarray) -> tuple[TuckerModel, MultilinearSpectrum]:
    """Multilinear SVD: orthonormal mode bases from each unfolding's SVD.

    The core holds the full energy of `t` (exact reconstruction); its
    mode-n slice norms equal the mode-n singular values and distinct slices
    in the same mode are mutually orthogonal.
    """
    t = check_tensor(t)
    factors = []
    spectra = []
    for mode in range(t.ndim):
        u, s, _ = linalg.svd(unfold(t, mode), full_matrices=False)
        factors.append(linalg.sign_fix_columns(u))
        spectra.append(s)
    core = t
    for mode, u in enumerate(factors):
        core = mode_n_product(core, u.T, mode)
    model = TuckerModel(core=core, factors=factors)
    return model, MultilinearSpectrum(values=spectra)


def truncated_mlsvd(t: np.ndarray, ranks) -> TuckerModel:
    """Truncate the MLSVD to the requested multilinear rank.

    Quasi-optimal: the error is bounded by the root of the discarded
    mode-wise energy, but is not necessarily the least-squares optimum.
    """
    t = check_tensor(t)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != t.ndim:
        raise ValueError(f"expected {t.ndim} ranks, got {len(ranks)}")
    for r, dim in zip(ranks, t.shape):
        if not 1 <= r <= dim:
            raise ValueError(f"rank {r} out of range for extent {dim}")
    full, _ = mlsvd(t)
    core = full.core[tuple(slice(0, r) for r in ranks)]
    factors = [u[:, :r] for u, r in zip(full.factors, ranks)]
    return TuckerModel(core=np.ascontiguousarray(core), factors=factors)


def hooi(t: np.ndarray, ranks, *, max_iters: int = 100, tol: float = 1e-10
         ) -> tuple[TuckerModel, FitTrace]:
    """Higher-order orthogonal iteration, initialized from the truncated MLSVD.

    Alternately refreshes each mode basis as the leading singular vectors of
    the tensor projected on the other modes; the fit is non-decreasing per
    sweep and never below the truncated-MLSVD fit.
    """
    t = check_tensor(t)
    init = truncated_mlsvd(t, ranks)
    factors = list(init.factors)
    ranks = tuple(int(r) for r in ranks)

    trace = FitTrace()
    prev_fit = -np.inf
    core = init.core
    for sweep in range(max_iters):
        for mode in range(t.ndim):
            proj = t
            for k in range(t.ndim):
                if k != mode:
                    proj = mode_n_product(proj, factors[k].T, k)
            factors[mode] = linalg.orth_leading(unfold(proj, mode), ranks[mode])
        core = multilinear_product(t, [u.T for u in factors])
        fit = relative_fit(t, multilinear_product(core, factors))
        trace.fits.append(fit)
        trace.n_sweeps = sweep + 1
        if abs(fit - prev_fit) < tol:
            trace.converged = True
            break
        prev_fit = fit
    return TuckerModel(core=core, factors=factors), trace


def multilinear_rank(t: np.ndarray, tol: float = 1e-8) -> tuple[int, ...]:
    """Mode-wise counts of singular values above `tol` times the mode's largest."""
    t = check_tensor(t)
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    ranks = []
    for mode in range(t.ndim):
        s = np.linalg.svd(unfold(t, mode), compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            ranks.append(0)
        else:
            ranks.append(int(np.sum(s > tol * s[0])))
    return tuple(ranks)


def apply_nonnegative_constraint(t: np.ndarray, model: TuckerModel, modes,
                                 sweeps: int = 25) -> TuckerModel:
    """Refine the given modes toward nonnegative factors by projected updates.

    Post-processing hook for mode-wise constraints: each constrained mode's
    factor is repeatedly replaced by the clipped least-squares solution of its
    unfolded subproblem, and the core is refit by pseudo-inverse projection.
    Constrained factors lose their orthonormality flag.
    """
    t = check_tensor(t)
    modes = sorted(set(int(m) for m in modes))
    factors = [f.copy() for f in model.factors]
    core = model.core.copy()
    for _ in range(sweeps):
        for mode in modes:
            rest = t
            for k in range(t.ndim):
                if k != mode:
                    rest = mode_n_product(rest, linalg.pinv(factors[k]), k)
            target = unfold(rest, mode)
            basis = unfold(core, mode)
            sol = linalg.lstsq_qr(basis.T, target.T).T
            factors[mode] = np.clip(sol, 0.0, None)
        core = multilinear_product(t, [linalg.pinv(f) for f in factors])
    ortho = [k not in modes and flag for k, flag in
             enumerate(model.orthonormal or [True] * t.ndim)]
    return TuckerModel(core=core, factors=factors, orthonormal=ortho)
