"""
SELFADJOINT SCATTERING ENGINE

Purpose:
- Scattering matrix S_Θ(λ) on ran Im M(λ+i0) for a selfadjoint parameter Θ
- Spectral shift function ξ_Θ(λ) = (1/π) Im tr log(M_op(λ+i0) − Θ_op)
- Resolvent-difference trace and the trace formula
- Birman-Krein verification over λ-grids

Parameter layout:
- Θ = Θ_op ⊕ Θ_∞: Θ_op acts on span(op_basis), the orthogonal complement
  is the multivalued part
- op_basis = I is a plain Hermitian matrix, an empty op_basis the pure relation

Author: Weyl Scattering Lab
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from app.core.errors import DimensionError
from app.core.matfun import (
    SpectralSubspace,
    checked_inverse,
    determinant,
    imag_part,
    range_projection,
    tr_log,
)
from app.core.nevanlinna import (
    NevanlinnaModel,
    boundary_value,
    derivative,
    evaluate,
    exceptional_points,
)
from app.core.numerics_config import DEFAULT_RUN_CONFIG, PSD_TOL, RANK_TOL, TRACE_QUAD_TOL, RunConfig
from app.core.quadrature import integrate_ssf_kernel
from app.scattering.sweep_engine import (
    PointResult,
    ResidualSeries,
    SweepRecord,
    TraceCheck,
    map_grid,
    residual_series,
)

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════
# PARAMETER
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class SelfAdjointParameter:
    """
    Selfadjoint relation Θ split into operator part and multivalued part.

    Attributes:
        dim: size of the boundary space (= model dim)
        op_basis: dim × r, orthonormal columns spanning the operator subspace
        theta_op: Hermitian r × r operator part
    """
    dim: int
    op_basis: np.ndarray
    theta_op: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.op_basis, dtype=complex).reshape(self.dim, -1)
        theta = np.asarray(self.theta_op, dtype=complex).reshape(basis.shape[1], basis.shape[1])
        object.__setattr__(self, "op_basis", basis)
        object.__setattr__(self, "theta_op", theta)

    @property
    def rank(self) -> int:
        return self.op_basis.shape[1]

    @classmethod
    def full(cls, theta) -> "SelfAdjointParameter":
        theta = np.atleast_2d(np.asarray(theta, dtype=complex))
        return cls(theta.shape[0], np.eye(theta.shape[0], dtype=complex), theta)

    @classmethod
    def relation(cls, dim: int) -> "SelfAdjointParameter":
        """Purely multivalued Θ (operator part on {0})."""
        return cls(dim, np.zeros((dim, 0), dtype=complex), np.zeros((0, 0), dtype=complex))

    def violations(self, tol: float = PSD_TOL) -> List[str]:
        found = []
        gram = self.op_basis.conj().T @ self.op_basis
        if self.rank and np.linalg.norm(gram - np.eye(self.rank), 2) > tol:
            found.append("op_basis columns are not orthonormal")
        scale = max(1.0, float(np.linalg.norm(self.theta_op, 2))) if self.rank else 1.0
        if self.rank and np.linalg.norm(self.theta_op - self.theta_op.conj().T, 2) > tol * scale:
            found.append("theta_op = theta_op* fails")
        return found


@dataclass(frozen=True, eq=False)
class ScatterValue:
    """S_Θ(λ) in the eigenbasis of Im M(λ+i0), with its determinant and ξ_Θ(λ)."""
    lam: float
    subspace: SpectralSubspace
    s_matrix: np.ndarray
    det_s: complex
    ssf: Optional[float] = None


def unitarity_defect(matrix: np.ndarray) -> float:
    """‖S*S − I‖; zero for the empty matrix."""
    if matrix.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(matrix.conj().T @ matrix - np.eye(matrix.shape[0]), 2))


def contraction_defect(matrix: np.ndarray) -> float:
    """max(σ_max(S) − 1, 0)."""
    if matrix.shape[0] == 0:
        return 0.0
    return max(float(np.linalg.norm(matrix, 2)) - 1.0, 0.0)


# ══════════════════════════════════════════════════════════════
# CORE OPERATIONS
# ══════════════════════════════════════════════════════════════

def compress_weyl(value: np.ndarray, theta: SelfAdjointParameter) -> np.ndarray:
    """M_op = P_op M ι_op."""
    value = np.asarray(value, dtype=complex)
    if value.shape != (theta.dim, theta.dim):
        raise DimensionError(f"matrix of shape {value.shape} does not fit a parameter of dim {theta.dim}")
    return theta.op_basis.conj().T @ value @ theta.op_basis


def _check_sizes(model: NevanlinnaModel, theta: SelfAdjointParameter) -> None:
    if model.dim != theta.dim:
        raise DimensionError(f"model dim {model.dim} differs from parameter dim {theta.dim}")


def scattering_matrix(
    model: NevanlinnaModel,
    theta: SelfAdjointParameter,
    lam: float,
    tol_rel: float = RANK_TOL,
) -> ScatterValue:
    """
    S_Θ(λ) = I + 2i X* ι_op (Θ_op − W_op)⁻¹ P_op X, W = M(λ+i0).

    X = basis · diag(√μ) over the retained eigenvalues μ of Im W, so the
    discarded noise directions cannot leak into S.
    """
    _check_sizes(model, theta)
    value = boundary_value(model, lam)
    subspace = range_projection(imag_part(value), tol_rel)
    if subspace.rank == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return ScatterValue(lam, subspace, empty, 1.0 + 0.0j)

    resolvent = checked_inverse(theta.theta_op - compress_weyl(value, theta), "Θ_op − M_op(λ+i0)")
    factor = theta.op_basis.conj().T @ subspace.weighted_basis()
    s_matrix = np.eye(subspace.rank, dtype=complex) + 2j * factor.conj().T @ resolvent @ factor
    return ScatterValue(lam, subspace, s_matrix, determinant(s_matrix))


def spectral_shift(model: NevanlinnaModel, theta: SelfAdjointParameter, lam: float) -> float:
    """ξ_Θ(λ) = (1/π) Im tr log(M_op(λ+i0) − Θ_op); zero for the pure relation."""
    _check_sizes(model, theta)
    if theta.rank == 0:
        return 0.0
    shifted = compress_weyl(boundary_value(model, lam), theta) - theta.theta_op
    return tr_log(shifted).imag / np.pi


def scatter_point(
    model: NevanlinnaModel,
    theta: SelfAdjointParameter,
    lam: float,
    tol_rel: float = RANK_TOL,
) -> ScatterValue:
    value = scattering_matrix(model, theta, lam, tol_rel)
    return ScatterValue(value.lam, value.subspace, value.s_matrix, value.det_s, spectral_shift(model, theta, lam))


def resolvent_trace(model: NevanlinnaModel, theta: SelfAdjointParameter, z: complex) -> complex:
    """tr((A_Θ − z)⁻¹ − (A_0 − z)⁻¹) = −tr((M_op(z) − Θ_op)⁻¹ M_op'(z))."""
    _check_sizes(model, theta)
    if theta.rank == 0:
        return 0.0 + 0.0j
    shifted = compress_weyl(evaluate(model, z), theta) - theta.theta_op
    slope = compress_weyl(derivative(model, z), theta)
    return complex(-np.trace(checked_inverse(shifted, "M_op(z) − Θ_op") @ slope))


def operator_part_scattering(
    model: NevanlinnaModel,
    theta: SelfAdjointParameter,
    lam: float,
    tol_rel: float = RANK_TOL,
) -> Tuple[SpectralSubspace, np.ndarray]:
    """Reduced S_{Θ_op}(λ) on ran Im M_op(λ+i0); same determinant as S_Θ(λ)."""
    _check_sizes(model, theta)
    reduced = compress_weyl(boundary_value(model, lam), theta)
    subspace = range_projection(imag_part(reduced), tol_rel)
    if subspace.rank == 0:
        return subspace, np.zeros((0, 0), dtype=complex)
    resolvent = checked_inverse(theta.theta_op - reduced, "Θ_op − M_op(λ+i0)")
    factor = subspace.weighted_basis()
    return subspace, np.eye(subspace.rank) + 2j * factor.conj().T @ resolvent @ factor


def determinant_ratio(model: NevanlinnaModel, theta: SelfAdjointParameter, lam: float) -> complex:
    """det(M_op(λ+i0)* − Θ_op) / det(M_op(λ+i0) − Θ_op)."""
    _check_sizes(model, theta)
    if theta.rank == 0:
        return 1.0 + 0.0j
    reduced = compress_weyl(boundary_value(model, lam), theta)
    shifted = reduced - theta.theta_op
    checked_inverse(shifted, "M_op(λ+i0) − Θ_op")
    return determinant(reduced.conj().T - theta.theta_op) / determinant(shifted)


def birman_krein_residual(det_s: complex, ssf: float) -> float:
    return abs(det_s - np.exp(-2j * np.pi * ssf))


# ══════════════════════════════════════════════════════════════
# SWEEPS AND VERIFICATION
# ══════════════════════════════════════════════════════════════

def sweep_row(
    model: NevanlinnaModel,
    theta: SelfAdjointParameter,
    lam: float,
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> PointResult:
    value = scatter_point(model, theta, lam, config.rank_tol)
    ratio = determinant_ratio(model, theta, lam)
    row = {
        "rank": value.subspace.rank,
        "det_re": value.det_s.real,
        "det_im": value.det_s.imag,
        "ssf": value.ssf,
        "residual_bk": birman_krein_residual(value.det_s, value.ssf),
        "residual_det_ratio": abs(ratio - value.det_s),
        "unitarity": unitarity_defect(value.s_matrix),
    }
    return PointResult(row, value.s_matrix)


def scatter_sweep(
    model: NevanlinnaModel,
    theta: SelfAdjointParameter,
    grid: List[float],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> List[SweepRecord]:
    """Per-λ records (rank, det S, ξ, residuals) in grid order."""
    _check_sizes(model, theta)
    return map_grid(lambda lam: sweep_row(model, theta, lam, config), list(grid), config.workers)


def verify_birman_krein(
    model: NevanlinnaModel,
    theta: SelfAdjointParameter,
    grid: List[float],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> ResidualSeries:
    """|det S_Θ(λ) − exp(−2πi ξ_Θ(λ))| on every regular grid point."""
    records = scatter_sweep(model, theta, grid, config)
    return residual_series(records, "residual_bk", "birman_krein")


def verify_trace_formula(
    model: NevanlinnaModel,
    theta: SelfAdjointParameter,
    z: complex,
    tol: float = TRACE_QUAD_TOL,
) -> TraceCheck:
    """resolvent_trace(z) against −∫ ξ_Θ(t)/(t − z)² dt."""
    lhs = resolvent_trace(model, theta, z)
    result = integrate_ssf_kernel(
        lambda t: spectral_shift(model, theta, t),
        z,
        tol=tol,
        bound=max(theta.rank, 1),
        breakpoints=exceptional_points(model),
    )
    check = TraceCheck(z, lhs, result.value, result.abs_error_estimate, result.skipped_points)
    logger.info(f"trace formula at z = {z}: residual {check.residual:.3e}")
    return check
