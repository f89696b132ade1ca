"""Block term decomposition in rank-(L,L,1) terms, with general-term reconstruction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .metrics import FitTrace, relative_fit
from .ops import unfold
from .tensorize import dehankelize
from .tucker import TuckerModel
from .validation import check_rng, check_tensor

__all__ = ["BTDTerm", "btd_reconstruct", "btd_ll1_als", "extract_sources", "mixing_matrix"]


@dataclass
class BTDTerm:
    """One block term: either rank-(L,L,1) data (a, b, c) or a general Tucker block.

    For an (L,L,1) term the canonical form has a unit-norm `c` whose
    largest-magnitude entry is positive, the compensating scale and sign
    absorbed into `a`; frontal slice k of the term equals ``c[k] * a @ b.T``.
    """
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    c: np.ndarray | None = None
    tucker: TuckerModel | None = None

    @property
    def kind(self) -> str:
        return "ll1" if self.tucker is None else "tucker"

    def reconstruct(self) -> np.ndarray:
        if self.tucker is not None:
            return self.tucker.reconstruct()
        return np.einsum("il,jl,k->ijk", self.a, self.b, self.c)


def btd_reconstruct(terms) -> np.ndarray:
    """Sum of the term tensors; all terms must share one shape."""
    if len(terms) == 0:
        raise ValueError("need at least one term")
    parts = [term.reconstruct() for term in terms]
    shape = parts[0].shape
    for p in parts[1:]:
        if p.shape != shape:
            raise ValueError(f"term shape mismatch: {p.shape} vs {shape}")
    return sum(parts)


def _canonicalize_terms(terms: list[BTDTerm]) -> list[BTDTerm]:
    fixed = []
    for term in terms:
        c = term.c.copy()
        a = term.a.copy()
        scale = np.linalg.norm(c)
        if scale > 0:
            c /= scale
            a *= scale
        lead = np.abs(c).argmax()
        if c[lead] < 0:
            c = -c
            a = -a
        fixed.append(BTDTerm(a=a, b=term.b.copy(), c=c))
    # deterministic term order: decreasing block energy
    fixed.sort(key=lambda trm: -float(np.linalg.norm(trm.a)))
    return fixed


def btd_ll1_als(t: np.ndarray, n_terms: int, block_size: int, *,
                max_iters: int = 500, tol: float = 1e-10, rng=0
                ) -> tuple[list[BTDTerm], FitTrace]:
    """Fit a sum of `n_terms` rank-(L,L,1) terms to an order-3 tensor by ALS.

    Updates cycle the A blocks, B blocks, and the C matrix, each through a
    least-squares solve against the Khatri-Rao-structured unfolding system, so
    the fit is non-decreasing per sweep.  Initialization takes the truncated
    MLSVD bases and splits their columns into blocks at random (seeded).
    """
    t = check_tensor(t)
    if t.ndim != 3:
        raise ValueError("rank-(L,L,1) fitting expects an order-3 tensor")
    if n_terms < 1:
        raise ValueError("need at least one term")
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    rng = check_rng(rng)
    dim_i, dim_j, dim_k = t.shape
    total = n_terms * block_size

    def init_blocks(mode, dim):
        k = min(total, dim)
        u = linalg.orth_leading(unfold(t, mode), k)
        if k < total:
            extra = rng.standard_normal((dim, total - k))
            extra /= np.linalg.norm(extra, axis=0)
            u = np.hstack([u, extra])
        u = u[:, rng.permutation(total)]
        return [u[:, r * block_size:(r + 1) * block_size].copy() for r in range(n_terms)]

    a_blocks = init_blocks(0, dim_i)
    b_blocks = init_blocks(1, dim_j)
    kc = min(n_terms, dim_k)
    c_mat = linalg.orth_leading(unfold(t, 2), kc)
    if kc < n_terms:
        extra = rng.standard_normal((dim_k, n_terms - kc))
        extra /= np.linalg.norm(extra, axis=0)
        c_mat = np.hstack([c_mat, extra])

    x0, x1, x2 = unfold(t, 0), unfold(t, 1), unfold(t, 2)
    trace = FitTrace()
    prev_fit = -np.inf
    for sweep in range(max_iters):
        m = np.hstack([np.kron(c_mat[:, r:r + 1], b_blocks[r]) for r in range(n_terms)])
        a_cat = linalg.lstsq_qr(m, x0.T).T
        a_blocks = [a_cat[:, r * block_size:(r + 1) * block_size] for r in range(n_terms)]

        m = np.hstack([np.kron(c_mat[:, r:r + 1], a_blocks[r]) for r in range(n_terms)])
        b_cat = linalg.lstsq_qr(m, x1.T).T
        b_blocks = [b_cat[:, r * block_size:(r + 1) * block_size] for r in range(n_terms)]

        v = np.column_stack([(a_blocks[r] @ b_blocks[r].T).reshape(-1, order="F")
                             for r in range(n_terms)])
        c_mat = linalg.lstsq_qr(v, x2.T).T

        recon = sum(np.einsum("il,jl,k->ijk", a_blocks[r], b_blocks[r], c_mat[:, r])
                    for r in range(n_terms))
        fit = relative_fit(t, recon)
        trace.fits.append(fit)
        trace.n_sweeps = sweep + 1
        if abs(fit - prev_fit) < tol:
            trace.converged = True
            break
        prev_fit = fit

    terms = [BTDTerm(a=a_blocks[r], b=b_blocks[r], c=c_mat[:, r].copy())
             for r in range(n_terms)]
    return _canonicalize_terms(terms), trace


def mixing_matrix(terms) -> np.ndarray:
    """Estimated mixing vectors of a blind-separation fit: the C columns."""
    return np.column_stack([term.c for term in terms])


def extract_sources(terms, t: np.ndarray) -> np.ndarray:
    """Recover source signals from a Hankel-tensor BTD fit.

    Applies the pseudo-inverse of the estimated mixing matrix to the channel
    unfolding, then de-Hankelizes each per-source slice by anti-diagonal
    averaging.  Returns one source per row, length rows+cols-1.
    """
    t = check_tensor(t)
    dim_i, dim_j, _ = t.shape
    mixing = mixing_matrix(terms)
    per_source = linalg.pinv(mixing) @ unfold(t, 2)
    return np.vstack([
        dehankelize(per_source[r].reshape(dim_i, dim_j, order="F"))
        for r in range(per_source.shape[0])
    ])
