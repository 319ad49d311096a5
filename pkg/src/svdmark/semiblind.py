"""Semi-blind watermarking: principal components of the watermark are
added to the cover's singular values.

Embedding computes ``marked = U (S + alpha * A_wa) V^T`` where ``U S V^T``
is the cover's SVD and ``A_wa = U_w S_w`` collects the watermark's
principal components.  The detector does not need the cover or watermark
images, only the side info captured at embed time (the exact cover
factors, the watermark's right singular vectors ``V_w``, and ``alpha``).
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateKey,
    DimensionError,
    InvalidInput,
    InvalidParameter,
    MalformedSideInfo,
)
from .hashstream import QuantParams
from .matrix import ORTHOGONALITY_TOL, as_matrix, orthogonality_residual, svd

# Default embedding strength; strong enough to survive mild distortion
# while keeping the marked image visually close to the cover.
DEFAULT_ALPHA = 0.1

# Looser orthogonality gate for externally supplied reference factors.
REFERENCE_ORTHOGONALITY_TOL = 1e-6


class SchemeTag(str, Enum):
    SEMI_BLIND = "semi-blind"
    HASH_CODE = "hash-code"


@dataclass
class SideInfo:
    """Everything the detector needs, captured at embed time.

    Stores the exact cover factors rather than the cover image:
    recomputing the SVD later could flip singular-vector signs and break
    the inversion, while ``u @ s @ v.T`` recovers the cover when needed.
    Never contains the identity or the derived mask.  Treat as read-only
    once constructed.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    v_w: np.ndarray
    alpha: float
    rows: int
    cols: int
    scheme: SchemeTag = SchemeTag.SEMI_BLIND
    quant: QuantParams | None = None

    def __post_init__(self):
        self.u = as_matrix(self.u, "u")
        self.s = as_matrix(self.s, "s")
        self.v = as_matrix(self.v, "v")
        self.v_w = as_matrix(self.v_w, "v_w")
        self.scheme = SchemeTag(self.scheme)
        m, n = self.rows, self.cols
        if self.s.shape != (m, n):
            raise DimensionError(f"s shape {self.s.shape} does not match {m}x{n}")
        if self.u.shape != (m, m) or self.v.shape != (n, n) or self.v_w.shape != (n, n):
            raise DimensionError("factor shapes do not conform to rows/cols")
        if orthogonality_residual(self.u) > ORTHOGONALITY_TOL:
            raise InvalidInput("stored u is not orthogonal")
        if orthogonality_residual(self.v) > ORTHOGONALITY_TOL:
            raise InvalidInput("stored v is not orthogonal")
        self.alpha = float(self.alpha)
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise InvalidParameter(f"alpha must be a non-negative real, got {self.alpha}")
        if self.scheme is SchemeTag.HASH_CODE and self.quant is None:
            raise MalformedSideInfo("hash-code side info requires quantization params")
        if self.scheme is SchemeTag.SEMI_BLIND and self.quant is not None:
            raise MalformedSideInfo("semi-blind side info must not carry quantization params")


def split_watermark(w):
    """Split the watermark into principal components and ``V_w``.

    Returns ``(a_wa, v_w)`` with ``a_wa = U_w @ S_w``, so that
    ``a_wa @ v_w.T`` reproduces the watermark.
    """
    f = svd(w)
    return f.u @ f.s, f.v


def embed(cover, watermark, alpha=DEFAULT_ALPHA):
    """Embed ``watermark`` into ``cover`` with strength ``alpha``.

    Returns ``(marked, side_info)``.  The marked image is real-valued;
    clipping to an 8-bit range is a file-format concern, not part of the
    scheme.  ``alpha = 0`` produces the cover unchanged and yields side
    info that extraction refuses (useful only in tests).
    """
    cover = as_matrix(cover, "cover")
    watermark = as_matrix(watermark, "watermark")
    if cover.shape != watermark.shape:
        raise DimensionError(
            f"cover {cover.shape} and watermark {watermark.shape} must have equal shape"
        )
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0:
        raise InvalidParameter(f"alpha must be non-negative, got {alpha}")
    f = svd(cover)
    a_wa, v_w = split_watermark(watermark)
    s1 = f.s + alpha * a_wa
    marked = f.u @ s1 @ f.v.T
    info = SideInfo(
        u=f.u,
        s=f.s,
        v=f.v,
        v_w=v_w,
        alpha=alpha,
        rows=cover.shape[0],
        cols=cover.shape[1],
        scheme=SchemeTag.SEMI_BLIND,
    )
    return marked, info


def recover_principal_components(marked, info):
    """Undo the embedding algebra, returning the recovered ``A*_wa``.

    Computes ``A_1 = marked - U S V^T`` and ``A*_wa = (U^T A_1 V) / alpha``.
    U and V are orthogonal, so their inverses are the transposes.  Shared
    by both schemes; callers enforce the scheme tag.
    """
    marked = as_matrix(marked, "marked")
    if marked.shape != (info.rows, info.cols):
        raise DimensionError(
            f"marked image {marked.shape} does not match side info "
            f"{(info.rows, info.cols)}"
        )
    if info.alpha == 0:
        raise DegenerateKey("side info has alpha = 0; embedding is not invertible")
    a1 = marked - info.u @ info.s @ info.v.T
    return (info.u.T @ a1 @ info.v) / info.alpha


def extract(marked, info):
    """Recover the watermark from a (possibly distorted) marked image."""
    if info.scheme is not SchemeTag.SEMI_BLIND:
        raise MalformedSideInfo(f"expected semi-blind side info, got {info.scheme.value}")
    a_wa_star = recover_principal_components(marked, info)
    return a_wa_star @ info.v_w.T


def detect_reference(a_wa_star, v_ref):
    """Project recovered principal components onto a reference basis.

    With the true watermark's ``V_w`` this reproduces the extracted
    watermark; with the right singular vectors of an unrelated image it
    yields a heavily distorted rendition whose correlation against that
    image stays well below the true-watermark score.
    """
    a = as_matrix(a_wa_star, "a_wa_star")
    v = as_matrix(v_ref, "v_ref")
    if v.shape[0] != v.shape[1] or a.shape[1] != v.shape[0]:
        raise DimensionError(f"reference basis {v.shape} does not conform to {a.shape}")
    if orthogonality_residual(v) > REFERENCE_ORTHOGONALITY_TOL:
        raise InvalidInput("reference basis is not orthogonal")
    return a @ v.T
