"""
MATRIX FUNCTIONS

Purpose:
- Logarithm of matrices with Im T ⪰ 0, defined by the resolvent integral
  log T = −i ∫₀^∞ ((T + it)⁻¹ − (1 + it)⁻¹ I) dt
- Trace of that logarithm, PSD square roots, rank-revealing spectral
  subspaces, guarded inverses and determinants

Branch:
- The integral fixes arg ∈ [0, π] for eigenvalues in the closed upper half
  plane; negative reals get arg π. Scalar values use branch_log.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigvals, schur

from app.core.errors import DimensionError, DomainError, SingularError
from app.core.numerics_config import (
    DOMAIN_TOL,
    LOG_QUAD_TOL,
    MAX_CONDITION,
    MAX_SUBDIVISIONS,
    NORMALITY_TOL,
    RANK_TOL,
)
from app.core.quadrature import integrate_halfline

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectralSubspace:
    """
    Orthonormal basis of the range of a PSD Hermitian matrix.

    Attributes:
        ambient_dim: size of the source matrix
        basis: ambient_dim × rank matrix with orthonormal columns
        rank: number of retained eigenvalues
        tol: absolute eigenvalue cutoff actually used
        eigenvalues: retained eigenvalues, descending (match basis columns)
    """
    ambient_dim: int
    basis: np.ndarray
    rank: int
    tol: float
    eigenvalues: np.ndarray

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def weighted_basis(self) -> np.ndarray:
        """basis · diag(√eigenvalues), the factor √H restricted to ran H."""
        return self.basis * np.sqrt(self.eigenvalues)[np.newaxis, :]


def _square(matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    return matrix


def imag_part(matrix) -> np.ndarray:
    """Hermitian imaginary part (T − T*)/2i."""
    matrix = _square(matrix)
    return (matrix - matrix.conj().T) / 2j


def real_part(matrix) -> np.ndarray:
    matrix = _square(matrix)
    return (matrix + matrix.conj().T) / 2


def hermitize(matrix) -> np.ndarray:
    matrix = _square(matrix)
    return 0.5 * (matrix + matrix.conj().T)


def branch_log(values):
    """
    Scalar logarithm with cut on the negative imaginary axis, arg clamped to [0, π].

    Arguments below the real axis come only from round-off within the
    domain tolerance and are pulled back to the nearest end of [0, π].
    """
    values = np.asarray(values, dtype=complex)
    angle = np.angle(values)
    angle = np.where(angle < -np.pi / 2, angle + 2 * np.pi, angle)
    angle = np.clip(angle, 0.0, np.pi)
    return np.log(np.abs(values)) + 1j * angle


# ══════════════════════════════════════════════════════════════
# GUARDS
# ══════════════════════════════════════════════════════════════

def condition_number(matrix) -> float:
    matrix = _square(matrix)
    if matrix.shape[0] == 0:
        return 1.0
    return float(np.linalg.cond(matrix))


def check_invertible(matrix, what: str = "matrix") -> None:
    cond = condition_number(matrix)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularError(f"{what} is numerically singular (condition number {cond:.3e})")


def checked_inverse(matrix, what: str = "matrix") -> np.ndarray:
    """Inverse that refuses condition numbers above MAX_CONDITION."""
    matrix = _square(matrix)
    if matrix.shape[0] == 0:
        return matrix.copy()
    check_invertible(matrix, what)
    return np.linalg.inv(matrix)


def determinant(matrix) -> complex:
    """det with the empty-matrix convention det = 1."""
    matrix = _square(matrix)
    if matrix.shape[0] == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(matrix))


def _check_upper(matrix: np.ndarray) -> None:
    scale = float(np.linalg.norm(matrix, 2))
    smallest = float(eigh(hermitize(imag_part(matrix)), eigvals_only=True).min())
    if smallest < -DOMAIN_TOL * scale:
        raise DomainError(
            f"Im T has eigenvalue {smallest:.3e} below -{DOMAIN_TOL:g}·‖T‖; log undefined on this branch"
        )


def is_normal(matrix, tol: float = NORMALITY_TOL) -> bool:
    matrix = _square(matrix)
    scale = float(np.linalg.norm(matrix, 2)) ** 2
    commutator = matrix @ matrix.conj().T - matrix.conj().T @ matrix
    return float(np.linalg.norm(commutator, 2)) <= tol * max(scale, 1e-300)


# ══════════════════════════════════════════════════════════════
# LOGARITHM
# ══════════════════════════════════════════════════════════════

def eigen_log(matrix) -> np.ndarray:
    """Diagonalize and apply branch_log; valid for diagonalizable T."""
    matrix = _square(matrix)
    values, vectors = np.linalg.eig(matrix)
    return vectors @ np.diag(branch_log(values)) @ np.linalg.inv(vectors)


def _integral_log(matrix: np.ndarray) -> np.ndarray:
    identity = np.eye(matrix.shape[0], dtype=complex)

    def integrand(t: float) -> np.ndarray:
        return np.linalg.inv(matrix + 1j * t * identity) - identity / (1.0 + 1j * t)

    result = integrate_halfline(integrand, tol=LOG_QUAD_TOL, max_subdivisions=MAX_SUBDIVISIONS)
    logger.debug(f"integral log: {result.evaluations} evaluations, error {result.abs_error_estimate:.2e}")
    return -1j * result.value


def upper_log(matrix) -> np.ndarray:
    """
    log T for Im T ⪰ 0 and T invertible.

    Normal T goes through its complex Schur form (diagonal, unitary);
    anything else through the resolvent integral.

    Raises:
        SingularError: condition number above MAX_CONDITION
        DomainError: Im T has an eigenvalue below −DOMAIN_TOL·‖T‖
    """
    matrix = _square(matrix)
    if matrix.shape[0] == 0:
        return matrix.copy()
    check_invertible(matrix, "log argument")
    _check_upper(matrix)

    if is_normal(matrix):
        form, unitary = schur(matrix, output="complex")
        return unitary @ np.diag(branch_log(np.diag(form))) @ unitary.conj().T
    return _integral_log(matrix)


def tr_log(matrix) -> complex:
    """
    tr log T, summed over eigenvalues with branch_log.

    The trace of the holomorphic calculus equals the eigenvalue sum of the
    scalar function, so no integral is needed; Im tr_log ∈ [0, π·dim].
    """
    matrix = _square(matrix)
    if matrix.shape[0] == 0:
        return 0.0 + 0.0j
    check_invertible(matrix, "log argument")
    _check_upper(matrix)
    return complex(np.sum(branch_log(eigvals(matrix))))


# ══════════════════════════════════════════════════════════════
# HERMITIAN SPECTRAL TOOLS
# ══════════════════════════════════════════════════════════════

def psd_sqrt(matrix) -> np.ndarray:
    """
    Hermitian square root of a PSD matrix; tiny negative eigenvalues clamp to 0.

    Raises:
        DomainError: an eigenvalue below −DOMAIN_TOL·‖H‖
    """
    matrix = hermitize(matrix)
    if matrix.shape[0] == 0:
        return matrix.copy()
    values, vectors = eigh(matrix)
    scale = float(np.abs(values).max())
    if values.min() < -DOMAIN_TOL * scale:
        raise DomainError(f"psd_sqrt of a matrix with eigenvalue {values.min():.3e}")
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots[np.newaxis, :]) @ vectors.conj().T


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    threshold = 1e-12 * float(np.abs(vector).max())
    for component in vector:
        if abs(component) > threshold:
            return vector * (abs(component) / component)
    return vector


def range_projection(matrix, tol_rel: float = RANK_TOL) -> SpectralSubspace:
    """
    Eigenvectors of a Hermitian H with eigenvalue > tol_rel·max(1, ‖H‖).

    Columns are ordered by descending eigenvalue; each column's first
    nonzero component is made real positive.
    """
    matrix = hermitize(matrix)
    dim = matrix.shape[0]
    if dim == 0:
        return SpectralSubspace(0, np.zeros((0, 0), dtype=complex), 0, tol_rel, np.zeros(0))
    values, vectors = eigh(matrix)
    values = values[::-1]
    vectors = vectors[:, ::-1]
    cutoff = tol_rel * max(1.0, float(np.abs(values).max()))
    keep = values > cutoff
    basis = np.column_stack([_fix_phase(vectors[:, k]) for k in np.flatnonzero(keep)]) \
        if keep.any() else np.zeros((dim, 0), dtype=complex)
    return SpectralSubspace(
        ambient_dim=dim,
        basis=basis.astype(complex),
        rank=int(keep.sum()),
        tol=cutoff,
        eigenvalues=values[keep].copy(),
    )


def kernel_basis(matrix, tol_rel: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the complement of range_projection(H)."""
    matrix = hermitize(matrix)
    dim = matrix.shape[0]
    if dim == 0:
        return np.zeros((0, 0), dtype=complex)
    values, vectors = eigh(matrix)
    values = values[::-1]
    vectors = vectors[:, ::-1]
    cutoff = tol_rel * max(1.0, float(np.abs(values).max()))
    drop = ~(values > cutoff)
    if not drop.any():
        return np.zeros((dim, 0), dtype=complex)
    return np.column_stack([_fix_phase(vectors[:, k]) for k in np.flatnonzero(drop)]).astype(complex)
