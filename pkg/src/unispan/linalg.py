"""Dense complex matrix kernels: Hilbert-Schmidt geometry, a self-contained
complex Hermitian eigensolver (cyclic Jacobi), defect square roots, operator
norms and Gram-rank estimation.

All norms written ``||.||_2`` are Hilbert-Schmidt norms taken with the
*normalized* trace ``tau(x) = tr(x)/n``, so the identity has norm 1 at every
dimension.  Every function is pure: inputs are never mutated.

The Jacobi sweep kernel exists twice: a compiled Cython extension
(``unispan._jacobi``) and a pure-Python fallback (``unispan._jacobi_py``)
with the identical deterministic sweep order.  The compiled one is picked at
import when present; set ``UNISPAN_FORCE_PURE=1`` to force the fallback.
"""

import os
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NormExceedsOne, NotSelfAdjoint

EIG_TOL = 1e-12
CLAMP_TOL = 1e-10
RANK_TOL = 1e-9

_MAX_SWEEPS = 60

if os.environ.get("UNISPAN_FORCE_PURE", "") not in ("", "0"):
    from . import _jacobi_py as _kernel

    _BACKEND = "pure"
else:
    try:
        from . import _jacobi as _kernel  # type: ignore[no-redef]

        _BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on build environment
        from . import _jacobi_py as _kernel  # type: ignore[no-redef]

        _BACKEND = "pure"


def backend() -> str:
    """Name of the active Jacobi kernel: ``"compiled"`` or ``"pure"``."""
    return _BACKEND


def as_matrix(x) -> np.ndarray:
    """Validate and convert ``x`` to a square complex128 array."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


def trace(x) -> complex:
    """Plain matrix trace."""
    return complex(np.trace(as_matrix(x)))


def normalized_trace(x) -> complex:
    """Trace divided by the dimension; equals 1 on the identity."""
    x = as_matrix(x)
    return complex(np.trace(x)) / x.shape[0]


def hs_inner(x, y) -> complex:
    """Inner product ``tau(y* x)`` with the normalized trace."""
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes {x.shape} and {y.shape} differ")
    return complex(np.vdot(y, x)) / x.shape[0]


def hs_norm(x) -> float:
    """Hilbert-Schmidt norm induced by :func:`hs_inner`."""
    x = as_matrix(x)
    return float(np.sqrt(np.sum(np.abs(x) ** 2) / x.shape[0]))


def adjoint(x) -> np.ndarray:
    return as_matrix(x).conj().T


def is_selfadjoint(x, tol: float = 1e-10) -> bool:
    x = as_matrix(x)
    return hs_norm(x - x.conj().T) <= tol


def unitarity_residual(x) -> float:
    """``||x* x - 1||_2``; zero exactly when ``x`` is unitary."""
    x = as_matrix(x)
    n = x.shape[0]
    return hs_norm(x.conj().T @ x - np.eye(n))


def is_unitary(x, tol: float = 1e-10) -> bool:
    return unitarity_residual(x) <= tol


class HermEig(NamedTuple):
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(h, input_tol: float = 1e-10, eig_tol: float = EIG_TOL) -> HermEig:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Deterministic for a fixed input (fixed row-major sweep order).  Raises
    :class:`NotSelfAdjoint` when ``||h - h*||_2`` exceeds
    ``input_tol * max(1, ||h||_2)``.
    """
    h = as_matrix(h)
    scale = max(1.0, hs_norm(h))
    if hs_norm(h - h.conj().T) > input_tol * scale:
        raise NotSelfAdjoint("input is not self-adjoint within tolerance")
    n = h.shape[0]
    H = np.ascontiguousarray((h + h.conj().T) / 2.0, dtype=np.complex128)
    V = np.eye(n, dtype=np.complex128)
    _kernel.jacobi_sweeps(H, V, 0.5 * eig_tol, _MAX_SWEEPS)
    w = H.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return HermEig(w[order], np.ascontiguousarray(V[:, order]))


def operator_norm(x) -> float:
    """Largest singular value, via the Jacobi eigensolver on ``x* x``."""
    x = as_matrix(x)
    xx = x.conj().T @ x
    w = hermitian_eig(xx, input_tol=1e-6).eigenvalues
    return float(np.sqrt(max(float(w[-1]), 0.0)))


def sqrt_defect(x, input_tol: float = 1e-10, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Positive square root of ``1 - x**2`` for a self-adjoint contraction.

    The result is self-adjoint, positive semidefinite and commutes with
    ``x``.  Eigenvalues of ``1 - x**2`` that dip slightly below zero (inputs
    on the boundary of the unit ball) are clamped to zero; inputs with
    operator norm beyond ``1 + clamp_tol`` raise :class:`NormExceedsOne`.
    """
    x = as_matrix(x)
    scale = max(1.0, hs_norm(x))
    if hs_norm(x - x.conj().T) > input_tol * scale:
        raise NotSelfAdjoint("input is not self-adjoint within tolerance")
    w, v = hermitian_eig(x, input_tol=input_tol)
    top = max(abs(float(w[0])), abs(float(w[-1])))
    if top > 1.0 + clamp_tol:
        raise NormExceedsOne(f"operator norm {top} exceeds 1")
    d = 1.0 - w**2
    d[d < 0.0] = 0.0
    r = (v * np.sqrt(d)) @ v.conj().T
    return (r + r.conj().T) / 2.0


def gram_rank(mats: Sequence, rank_tol: float = RANK_TOL) -> int:
    """Rank of the Hermitian Gram matrix ``G[s, t] = hs_inner(mats[s], mats[t])``.

    Counts eigenvalues above ``rank_tol`` times the largest one.  For lists
    longer than ``n**2`` the spectrum is read off the coordinate companion
    Gram matrix ``V* V / n`` (same nonzero eigenvalues as ``V V* / n``),
    which keeps the eigenproblem at dimension ``n**2``.
    """
    if len(mats) == 0:
        raise DimensionMismatch("empty matrix list")
    arrs = [as_matrix(m) for m in mats]
    n = arrs[0].shape[0]
    for a in arrs:
        if a.shape[0] != n:
            raise DimensionMismatch("matrices in the list differ in dimension")
    V = np.stack([a.ravel() for a in arrs])
    if len(arrs) <= n * n:
        G = (V @ V.conj().T) / n
    else:
        G = (V.conj().T @ V) / n
    w = hermitian_eig(G, input_tol=1e-8).eigenvalues
    top = float(w[-1])
    if top <= 0.0:
        return 0
    return int(np.sum(w > rank_tol * top))
