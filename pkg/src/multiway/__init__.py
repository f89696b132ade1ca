"""Dense tensor decompositions and multiway analysis tools."""

from . import linalg, metrics, ops, tensorize
from .metrics import FitTrace, MetricsReport, compute_psnr, compute_sae, relative_fit
from .ops import (
    fold,
    frobenius_norm,
    inner,
    khatri_rao,
    khatri_rao_list,
    kronecker,
    mode_n_product,
    multilinear_product,
    outer,
    unfold,
    vectorize,
)
from .tensorize import dehankelize, hankel_tensorize, hankelize, quantize

__version__ = "0.1.0"
