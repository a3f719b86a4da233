"""Dense complex-operator algebra.

Hermiticity and positivity checks, the trace norm, positive/negative part
splitting, PSD square roots and pseudo-inverses, and support projectors.
All functions accept plain ``numpy`` arrays or the thin operator wrappers
defined here; everything is value-semantic and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericError
from . import tolerances as tol


def as_matrix(a) -> np.ndarray:
    """Coerce an operator-like object to a finite 2-D complex ndarray.

    Accepts ndarrays, nested sequences, and any object exposing a
    ``matrix`` attribute (the wrappers below).
    """
    m = np.asarray(getattr(a, "matrix", a), dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ContractViolation(f"expected a matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise NumericError("matrix has non-finite entries")
    return m


def hermiticity_defect(a) -> float:
    """Max-abs deviation of ``a`` from its own adjoint."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ContractViolation(f"hermiticity undefined for shape {m.shape}")
    return float(np.abs(m - m.conj().T).max())


def is_hermitian(a, atol: float = tol.HERMITICITY_TOL) -> bool:
    return hermiticity_defect(a) <= atol


def require_hermitian(a, atol: float = tol.HERMITICITY_TOL) -> np.ndarray:
    """Return ``a`` symmetrized, raising if it is not Hermitian within atol."""
    m = as_matrix(a)
    defect = hermiticity_defect(m)
    if defect > atol:
        raise ContractViolation(f"matrix is not Hermitian (defect {defect:.3e})")
    return (m + m.conj().T) / 2


@dataclass(eq=False)
class HermitianOperator:
    """A square complex matrix verified Hermitian at construction."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = require_hermitian(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(eq=False)
class DensityOperator:
    """A Hermitian, positive-semidefinite, unit-trace operator."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = require_hermitian(self.matrix)
        w = np.linalg.eigvalsh(self.matrix)
        if w.min() < -tol.PSD_TOL:
            raise ContractViolation(f"not PSD (min eigenvalue {w.min():.3e})")
        tr = float(np.trace(self.matrix).real)
        if abs(tr - 1.0) > tol.TRACE_TOL:
            raise ContractViolation(f"trace is {tr!r}, expected 1")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def trace_norm(a) -> float:
    """Sum of singular values of ``a``.

    For Hermitian operators this is the sum of absolute eigenvalues; it
    induces the distinguishability metric on quantum states.
    """
    m = as_matrix(a)
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from exc
    return float(s.sum())


def clamp_eigenvalues(w: np.ndarray, window: float = tol.EIG_CLAMP_TOL) -> np.ndarray:
    """Set eigenvalues inside (-window, window) to exactly zero."""
    out = w.copy()
    out[np.abs(out) < window] = 0.0
    return out


def eigh_clamped(a, window: float = tol.EIG_CLAMP_TOL):
    """Hermitian eigendecomposition with small eigenvalues clamped to 0."""
    m = require_hermitian(a)
    w, v = np.linalg.eigh(m)
    return clamp_eigenvalues(w, window), v


def positive_negative_parts(z, window: float = tol.EIG_CLAMP_TOL):
    """Split a Hermitian Z into (Z+, Z-) with Z = Z+ - Z-, both PSD.

    Eigenvalues within ``window`` of zero are clamped, so the two parts
    have exactly orthogonal supports.
    """
    w, v = eigh_clamped(z, window)
    pos = (v * np.maximum(w, 0.0)) @ v.conj().T
    neg = (v * np.maximum(-w, 0.0)) @ v.conj().T
    return (pos + pos.conj().T) / 2, (neg + neg.conj().T) / 2


def _psd_eigh(a, psd_tol: float):
    w, v = np.linalg.eigh(require_hermitian(a))
    if w.min() < -psd_tol:
        raise ContractViolation(f"not PSD (min eigenvalue {w.min():.3e})")
    return np.maximum(w, 0.0), v


def sqrt_psd(a, psd_tol: float = tol.PSD_TOL) -> np.ndarray:
    """Principal square root of a PSD operator."""
    w, v = _psd_eigh(a, psd_tol)
    return (v * np.sqrt(w)) @ v.conj().T


def pinv_psd(a, psd_tol: float = tol.PSD_TOL, rank_tol: float = tol.RANK_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a PSD operator.

    Inverts on the support and annihilates the kernel; eigenvalues below
    ``rank_tol`` relative to the largest are treated as zero.
    """
    w, v = _psd_eigh(a, psd_tol)
    cut = rank_tol * max(w.max(), 1e-300)
    inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    return (v * inv) @ v.conj().T


def sqrt_pinv_psd(a, psd_tol: float = tol.PSD_TOL, rank_tol: float = tol.RANK_TOL) -> np.ndarray:
    """Pseudo-inverse of the principal square root of a PSD operator."""
    w, v = _psd_eigh(a, psd_tol)
    cut = rank_tol * max(w.max(), 1e-300)
    inv = np.where(w > cut, 1.0 / np.sqrt(np.where(w > cut, w, 1.0)), 0.0)
    return (v * inv) @ v.conj().T


def support_projector(a, psd_tol: float = tol.PSD_TOL, rank_tol: float = tol.RANK_TOL) -> np.ndarray:
    """Orthogonal projector onto the range of a PSD operator."""
    w, v = _psd_eigh(a, psd_tol)
    cut = rank_tol * max(w.max(), 1e-300)
    vr = v[:, w > cut]
    return vr @ vr.conj().T


def psd_rank(a, psd_tol: float = tol.PSD_TOL, rank_tol: float = tol.RANK_TOL) -> int:
    """Number of eigenvalues above the relative rank cutoff."""
    w, _ = _psd_eigh(a, psd_tol)
    return int(np.count_nonzero(w > rank_tol * max(w.max(), 1e-300)))


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Hilbert-Schmidt-orthonormal Hermitian basis of the d x d operators.

    Ordering: diagonal units first, then symmetric and antisymmetric
    off-diagonal combinations.
    """
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2)
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j / np.sqrt(2)
            e[j, i] = 1j / np.sqrt(2)
            basis.append(e)
    return basis
