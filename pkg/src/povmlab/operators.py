"""Dense complex linear algebra on small operators.

Operators are plain ``numpy`` arrays of dtype ``complex128``.  Effects,
density matrices and isometries are arrays that passed the corresponding
``check_*`` validator; the validators return a read-only, Hermitian-symmetrised
copy so later checks are not thrown off by rounding in the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    DimensionMismatch,
    NotADensityMatrix,
    NotAnEffect,
    NotAnIsometry,
    NotHermitian,
    NotPSD,
)
from .tolerance import Tolerance, resolve


def as_matrix(A) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or 0 in M.shape:
        raise DimensionMismatch(f"expected a non-empty matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def as_square(A) -> np.ndarray:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    return M


def dagger(A: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(A, -1, -2))


def hermitian_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + dagger(A))


def frozen(A: np.ndarray) -> np.ndarray:
    A = np.array(A, dtype=complex)
    A.setflags(write=False)
    return A


def operator_norm(A) -> float:
    """Largest singular value."""
    M = as_square(A)
    return float(np.linalg.norm(M, 2))


def trace(A) -> complex:
    return complex(np.trace(as_square(A)))


def is_hermitian(A, tol: Tolerance | None = None) -> bool:
    M = as_square(A)
    return operator_norm(M - dagger(M)) <= resolve(tol).herm


def _hermitian(A, tol: Tolerance | None) -> np.ndarray:
    M = as_square(A)
    if not is_hermitian(M, tol):
        raise NotHermitian(f"‖A - A†‖ = {operator_norm(M - dagger(M)):.3e}")
    return hermitian_part(M)


def spectral_decompose(A, tol: Tolerance | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray, shape (d,)
        Real eigenvalues in descending order.
    eigenvectors : ndarray, shape (d, d)
        Orthonormal eigenvectors as columns, matching ``eigenvalues``.
    """
    H = _hermitian(A, tol)
    w, V = np.linalg.eigh(H)
    return w[::-1].copy(), V[:, ::-1].copy()


def eigvalsh(A) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian part (no symmetry check)."""
    return np.linalg.eigvalsh(hermitian_part(np.asarray(A, dtype=complex)))


def _clamped_eigh(H: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    w, V = np.linalg.eigh(H)
    lowest = w.min() if w.size else 0.0
    if lowest < -eps:
        raise NotPSD(f"eigenvalue {lowest:.3e} below -{eps:g}")
    return np.clip(w, 0.0, None), V


def psd_sqrt(A, tol: Tolerance | None = None) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Also accepts a stack of shape ``(n, d, d)``; each slice is handled
    independently.  Eigenvalues in ``[-psd, 0)`` are clamped to zero.
    """
    tol = resolve(tol)
    M = np.asarray(A, dtype=complex)
    if M.ndim == 2:
        H = _hermitian(M, tol)
    else:
        if M.shape[-1] != M.shape[-2]:
            raise DimensionMismatch(f"expected square matrices, got shape {M.shape}")
        if np.abs(M - dagger(M)).max(initial=0.0) > tol.herm:
            raise NotHermitian("stack contains a non-Hermitian matrix")
        H = hermitian_part(M)
    w, V = _clamped_eigh(H, tol.psd)
    return (V * np.sqrt(w)[..., None, :]) @ dagger(V)


def psd_inverse_sqrt(A, tol: Tolerance | None = None) -> np.ndarray:
    """``A^{-1/2}`` for a positive definite matrix; raises ``NotPSD`` otherwise."""
    tol = resolve(tol)
    w, V = np.linalg.eigh(_hermitian(A, tol))
    if w.min() <= tol.psd:
        raise NotPSD(f"smallest eigenvalue {w.min():.3e} is not above {tol.psd:g}")
    return (V / np.sqrt(w)) @ dagger(V)


@dataclass(frozen=True)
class OperatorFlags:
    hermitian: bool
    psd: bool
    effect: bool
    projection: bool


def classify(A, tol: Tolerance | None = None) -> OperatorFlags:
    tol = resolve(tol)
    M = as_square(A)
    if not is_hermitian(M, tol):
        return OperatorFlags(False, False, False, False)
    H = hermitian_part(M)
    w = np.linalg.eigvalsh(H)
    psd = bool(w[0] >= -tol.psd)
    effect = psd and bool(w[-1] <= 1 + tol.psd)
    projection = effect and operator_norm(H @ H - H) <= tol.recon
    return OperatorFlags(True, psd, effect, projection)


def conjugate_by_isometry(
    g, A, direction: Literal["forward", "adjoint"] = "forward"
) -> np.ndarray:
    """``g A g†`` (forward) or ``g† A g`` (adjoint)."""
    G = as_matrix(g)
    M = as_square(A)
    if direction == "forward":
        if G.shape[1] != M.shape[0]:
            raise DimensionMismatch(f"g is {G.shape}, A is {M.shape}")
        return G @ M @ dagger(G)
    if direction == "adjoint":
        if G.shape[0] != M.shape[0]:
            raise DimensionMismatch(f"g is {G.shape}, A is {M.shape}")
        return dagger(G) @ M @ G
    raise ValueError(f"unknown direction {direction!r}")


def check_effect(A, tol: Tolerance | None = None) -> np.ndarray:
    tol = resolve(tol)
    M = as_square(A)
    if not is_hermitian(M, tol):
        raise NotAnEffect("operator is not Hermitian")
    H = hermitian_part(M)
    w = np.linalg.eigvalsh(H)
    if w[0] < -tol.psd or w[-1] > 1 + tol.psd:
        raise NotAnEffect(f"spectrum [{w[0]:.3e}, {w[-1]:.3e}] not inside [0, 1]")
    return frozen(H)


def check_density(rho, tol: Tolerance | None = None) -> np.ndarray:
    tol = resolve(tol)
    M = as_square(rho)
    if not is_hermitian(M, tol):
        raise NotADensityMatrix("operator is not Hermitian")
    H = hermitian_part(M)
    lowest = np.linalg.eigvalsh(H)[0]
    if lowest < -tol.psd:
        raise NotADensityMatrix(f"negative eigenvalue {lowest:.3e}")
    tr = np.trace(H).real
    if abs(tr - 1) > tol.tr:
        raise NotADensityMatrix(f"trace {tr!r} differs from 1")
    return frozen(H)


def check_isometry(g, tol: Tolerance | None = None) -> np.ndarray:
    tol = resolve(tol)
    G = as_matrix(g)
    if G.shape[0] < G.shape[1]:
        raise NotAnIsometry(f"isometry needs rows >= cols, got {G.shape}")
    defect = operator_norm(dagger(G) @ G - np.eye(G.shape[1]))
    if defect > tol.herm:
        raise NotAnIsometry(f"‖g†g - id‖ = {defect:.3e}")
    return frozen(G)
