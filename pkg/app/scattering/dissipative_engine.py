"""
DISSIPATIVE SCATTERING ENGINE

Purpose:
- Block scattering matrix of the selfadjoint dilation of A_D
- Dissipative scattering matrix S_D and Lax-Phillips matrix S^LP
- Characteristic function W_{A_D} on the lower half plane
- Spectral shift η_D, dilation spectral shift, modified trace formulas
- Modified Birman-Krein, dilation Birman-Krein and Adamyan-Arov checks

Channels:
- ℋ_{M(λ)} = ran Im M(λ+i0) (first block), ℋ_D = ran(−Im D) (second block)
- The exit channel enters only through the constant Weyl function
  τ = −i·P_D Im D ι_D; the dilation itself is never built

Author: Weyl Scattering Lab
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

import numpy as np

from app.core.errors import DimensionError, DomainError
from app.core.matfun import (
    SpectralSubspace,
    checked_inverse,
    determinant,
    imag_part,
    kernel_basis,
    range_projection,
    real_part,
    tr_log,
)
from app.core.nevanlinna import (
    ConstantTerm,
    NevanlinnaModel,
    boundary_value,
    derivative,
    direct_sum,
    evaluate,
    exceptional_points,
)
from app.core.numerics_config import (
    DEFAULT_RUN_CONFIG,
    PSD_TOL,
    RANK_TOL,
    TRACE_QUAD_TOL,
    RunConfig,
)
from app.core.quadrature import integrate_ssf_kernel
from app.scattering.selfadjoint_engine import (
    SelfAdjointParameter,
    contraction_defect,
    unitarity_defect,
)
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
class DissipativeParameter:
    """
    Dissipative boundary matrix D (Im D ⪯ 0) with ℋ_D = ran(−Im D).

    Attributes:
        dim: boundary space size
        D: dim × dim matrix
        hd: spectral subspace of −Im D
        tol_rel: rank cutoff used for hd
    """
    dim: int
    D: np.ndarray
    hd: SpectralSubspace
    tol_rel: float = RANK_TOL

    @classmethod
    def from_matrix(cls, matrix, tol_rel: float = RANK_TOL) -> "DissipativeParameter":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"D must be square, got shape {matrix.shape}")
        return cls(matrix.shape[0], matrix, range_projection(-imag_part(matrix), tol_rel), tol_rel)

    @property
    def rank(self) -> int:
        return self.hd.rank

    @property
    def projector(self) -> np.ndarray:
        """P_D as a dim × dim orthogonal projector."""
        return self.hd.projector

    @property
    def embedding(self) -> np.ndarray:
        """ι_D: ℋ_D → ℂ^dim."""
        return self.hd.basis

    @property
    def channel_factor(self) -> np.ndarray:
        """√(−Im D) restricted to ℋ_D, as ι_D · diag(√μ_D)."""
        return self.hd.weighted_basis()

    def violations(self, tol: float = PSD_TOL) -> List[str]:
        scale = max(1.0, float(np.linalg.norm(self.D, 2)))
        largest = float(np.linalg.eigvalsh(imag_part(self.D)).max())
        if largest > tol * scale:
            return [f"Im D ⪯ 0 fails (largest eigenvalue {largest:.3e})"]
        return []


@dataclass(frozen=True, eq=False)
class DilationScatterValue:
    """Dilation scattering data at one λ; blocks in the (ℋ_{M(λ)}, ℋ_D) bases."""
    lam: float
    subspace: SpectralSubspace
    t11: np.ndarray
    t12: np.ndarray
    t21: np.ndarray
    t22: np.ndarray
    s_full: np.ndarray
    s_d: np.ndarray
    s_lp: np.ndarray
    eta_d: Optional[float] = None
    xi_dilation: Optional[float] = None

    @property
    def rank_m(self) -> int:
        return self.subspace.rank

    @property
    def rank_d(self) -> int:
        return self.t22.shape[0]


def _check_sizes(model: NevanlinnaModel, param: DissipativeParameter) -> None:
    if model.dim != param.dim:
        raise DimensionError(f"model dim {model.dim} differs from D of size {param.dim}")


def _sandwich(left: np.ndarray, middle: np.ndarray, right: np.ndarray) -> np.ndarray:
    return left.conj().T @ middle @ right


# ══════════════════════════════════════════════════════════════
# SCATTERING MATRICES
# ══════════════════════════════════════════════════════════════

def dilation_scattering(
    model: NevanlinnaModel,
    param: DissipativeParameter,
    lam: float,
    tol_rel: float = RANK_TOL,
) -> DilationScatterValue:
    """
    Four blocks T_ij = X_i* (D − M(λ+i0))⁻¹ X_j and s_full = I + 2i [T_ij].

    X_M = √Im M(λ+i0) on ℋ_{M(λ)}, X_D = √(−Im D) on ℋ_D.
    """
    _check_sizes(model, param)
    value = boundary_value(model, lam)
    subspace = range_projection(imag_part(value), tol_rel)
    resolvent = checked_inverse(param.D - value, "D − M(λ+i0)")
    x_m = subspace.weighted_basis()
    x_d = param.channel_factor

    t11 = _sandwich(x_m, resolvent, x_m)
    t12 = _sandwich(x_m, resolvent, x_d)
    t21 = _sandwich(x_d, resolvent, x_m)
    t22 = _sandwich(x_d, resolvent, x_d)
    blocks = np.block([[t11, t12], [t21, t22]])
    s_full = np.eye(blocks.shape[0], dtype=complex) + 2j * blocks
    return DilationScatterValue(
        lam=lam,
        subspace=subspace,
        t11=t11,
        t12=t12,
        t21=t21,
        t22=t22,
        s_full=s_full,
        s_d=np.eye(t11.shape[0], dtype=complex) + 2j * t11,
        s_lp=np.eye(t22.shape[0], dtype=complex) + 2j * t22,
    )


def dissipative_scattering(
    model: NevanlinnaModel,
    param: DissipativeParameter,
    lam: float,
    tol_rel: float = RANK_TOL,
) -> np.ndarray:
    """S_D(λ) = I + 2i √Im M (D − M)⁻¹ √Im M on ℋ_{M(λ)}."""
    _check_sizes(model, param)
    value = boundary_value(model, lam)
    subspace = range_projection(imag_part(value), tol_rel)
    resolvent = checked_inverse(param.D - value, "D − M(λ+i0)")
    x_m = subspace.weighted_basis()
    return np.eye(subspace.rank, dtype=complex) + 2j * _sandwich(x_m, resolvent, x_m)


def lax_phillips_scattering(model: NevanlinnaModel, param: DissipativeParameter, lam: float) -> np.ndarray:
    """S^LP(λ) = I + 2i √(−Im D) (D − M)⁻¹ √(−Im D) on ℋ_D."""
    _check_sizes(model, param)
    value = boundary_value(model, lam)
    resolvent = checked_inverse(param.D - value, "D − M(λ+i0)")
    x_d = param.channel_factor
    return np.eye(param.rank, dtype=complex) + 2j * _sandwich(x_d, resolvent, x_d)


def characteristic_function(model: NevanlinnaModel, param: DissipativeParameter, mu: complex) -> np.ndarray:
    """
    W_{A_D}(μ) = I − 2i √(−Im D) (D* − M(μ))⁻¹ √(−Im D) for Im μ < 0.

    A real μ means the boundary limit μ − i0, where M(μ − i0) = M(μ + i0)*.
    """
    _check_sizes(model, param)
    mu = complex(mu)
    if mu.imag > 0:
        raise DomainError(f"characteristic function lives on Im μ ≤ 0, got μ = {mu}")
    if mu.imag == 0:
        value = boundary_value(model, mu.real).conj().T
    else:
        value = evaluate(model, mu)
    resolvent = checked_inverse(param.D.conj().T - value, "D* − M(μ)")
    x_d = param.channel_factor
    return np.eye(param.rank, dtype=complex) - 2j * _sandwich(x_d, resolvent, x_d)


# ══════════════════════════════════════════════════════════════
# SPECTRAL SHIFT FUNCTIONS
# ══════════════════════════════════════════════════════════════

def eta_d(model: NevanlinnaModel, param: DissipativeParameter, lam: float) -> float:
    """η_D(λ) = (1/π) Im tr log(M(λ+i0) − D)."""
    _check_sizes(model, param)
    return tr_log(boundary_value(model, lam) - param.D).imag / np.pi


def dilation_ssf(model: NevanlinnaModel, param: DissipativeParameter, lam: float) -> float:
    """(1/π) Im tr log(V (M(λ+i0) − D) V) with V = (I − P_D) + P_D/√2."""
    _check_sizes(model, param)
    projector = param.projector
    scaling = np.eye(param.dim) - projector + projector / np.sqrt(2.0)
    return tr_log(scaling @ (boundary_value(model, lam) - param.D) @ scaling).imag / np.pi


def dissipative_point(
    model: NevanlinnaModel,
    param: DissipativeParameter,
    lam: float,
    tol_rel: float = RANK_TOL,
) -> DilationScatterValue:
    value = dilation_scattering(model, param, lam, tol_rel)
    return replace(value, eta_d=eta_d(model, param, lam), xi_dilation=dilation_ssf(model, param, lam))


# ══════════════════════════════════════════════════════════════
# DILATION AS A SELFADJOINT SYSTEM
# ══════════════════════════════════════════════════════════════

def dilation_weyl_model(model: NevanlinnaModel, param: DissipativeParameter) -> NevanlinnaModel:
    """M̃ = (M − Re D) ⊕ τ, τ ≡ −i ι_D* Im D ι_D on ℋ_D."""
    _check_sizes(model, param)
    shifted = NevanlinnaModel(
        dim=model.dim,
        terms=model.terms + (ConstantTerm(-real_part(param.D)),),
        name=model.name,
    )
    channel_value = -1j * _sandwich(param.embedding, imag_part(param.D), param.embedding)
    channel = NevanlinnaModel(dim=param.rank, terms=(ConstantTerm(channel_value),), name="tau")
    if param.rank == 0:
        return shifted
    return direct_sum(shifted, channel, name=f"{model.name}-dilation")


def dilation_parameter(param: DissipativeParameter) -> SelfAdjointParameter:
    """Θ̃ with zero operator part on {(u + ι_D v, v)}: basis (k, 0) and (b_j, e_j)/√2."""
    kernel = kernel_basis(-imag_part(param.D), param.tol_rel)
    total = param.dim + param.rank
    columns = []
    for k in range(kernel.shape[1]):
        vector = np.zeros(total, dtype=complex)
        vector[:param.dim] = kernel[:, k]
        columns.append(vector)
    for j in range(param.rank):
        vector = np.zeros(total, dtype=complex)
        vector[:param.dim] = param.embedding[:, j] / np.sqrt(2.0)
        vector[param.dim + j] = 1.0 / np.sqrt(2.0)
        columns.append(vector)
    basis = np.column_stack(columns) if columns else np.zeros((total, 0), dtype=complex)
    rank = basis.shape[1]
    return SelfAdjointParameter(total, basis, np.zeros((rank, rank), dtype=complex))


# ══════════════════════════════════════════════════════════════
# TRACE FORMULAS
# ══════════════════════════════════════════════════════════════

def dissipative_resolvent_trace(model: NevanlinnaModel, param: DissipativeParameter, z: complex) -> complex:
    """
    tr((A_D − z)⁻¹ − (A_0 − z)⁻¹) = tr((D − M(z))⁻¹ M'(z)) for Im z > 0.

    For Im z < 0 the adjoint A_D* is used, i.e. D is replaced by D*.
    """
    _check_sizes(model, param)
    z = complex(z)
    boundary = param.D if z.imag > 0 else param.D.conj().T
    resolvent = checked_inverse(boundary - evaluate(model, z), "D − M(z)")
    return complex(np.trace(resolvent @ derivative(model, z)))


def verify_dissipative_trace_formula(
    model: NevanlinnaModel,
    param: DissipativeParameter,
    z: complex,
    tol: float = TRACE_QUAD_TOL,
) -> TraceCheck:
    """dissipative_resolvent_trace(z) against −∫ η_D(t)/(t − z)² dt."""
    lhs = dissipative_resolvent_trace(model, param, z)
    result = integrate_ssf_kernel(
        lambda t: eta_d(model, param, t),
        z,
        tol=tol,
        bound=param.dim,
        breakpoints=exceptional_points(model),
    )
    check = TraceCheck(complex(z), lhs, result.value, result.abs_error_estimate, result.skipped_points)
    logger.info(f"modified trace formula at z = {z}: residual {check.residual:.3e}")
    return check


# ══════════════════════════════════════════════════════════════
# SWEEPS AND VERIFICATION
# ══════════════════════════════════════════════════════════════

def sweep_row(
    model: NevanlinnaModel,
    param: DissipativeParameter,
    lam: float,
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> PointResult:
    value = dissipative_point(model, param, lam, config.rank_tol)
    det_sd = determinant(value.s_d)
    det_slp = determinant(value.s_lp)
    phase = np.exp(-2j * np.pi * value.eta_d)
    adjoint_char = characteristic_function(model, param, lam).conj().T
    adamyan_arov = float(np.linalg.norm(value.s_lp - adjoint_char, 2)) if param.rank else 0.0
    row = {
        "rank_m": value.rank_m,
        "rank_d": value.rank_d,
        "det_sd_re": det_sd.real,
        "det_sd_im": det_sd.imag,
        "det_slp_re": det_slp.real,
        "det_slp_im": det_slp.imag,
        "eta": value.eta_d,
        "xi_dilation": value.xi_dilation,
        "residual_bk": abs(determinant(value.s_full) - np.exp(-2j * np.pi * value.xi_dilation)),
        "residual_mbk": abs(det_sd - np.conj(det_slp) * phase),
        "residual_polk": abs(det_slp - np.conj(det_sd) * phase),
        "residual_adamyan_arov": adamyan_arov,
        "unitarity": unitarity_defect(value.s_full),
        "contraction": max(contraction_defect(value.s_d), contraction_defect(value.s_lp)),
    }
    return PointResult(row, value.s_full)


def dissipative_sweep(
    model: NevanlinnaModel,
    param: DissipativeParameter,
    grid: List[float],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> List[SweepRecord]:
    _check_sizes(model, param)
    return map_grid(lambda lam: sweep_row(model, param, lam, config), list(grid), config.workers)


def verify_modified_bk(
    model: NevanlinnaModel,
    param: DissipativeParameter,
    grid: List[float],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> Dict[str, ResidualSeries]:
    """
    Residual series of
    det S_D = conj(det S^LP)·e^{−2πiη_D} (modified_bk),
    det S^LP = conj(det S_D)·e^{−2πiη_D} (modified_bk_lp),
    det s_full = e^{−2πiξ_dilation} (dilation_bk) and
    ‖S^LP − W_{A_D}(λ − i0)*‖ (adamyan_arov).
    """
    records = dissipative_sweep(model, param, grid, config)
    return {
        "modified_bk": residual_series(records, "residual_mbk", "modified_bk"),
        "modified_bk_lp": residual_series(records, "residual_polk", "modified_bk_lp"),
        "dilation_bk": residual_series(records, "residual_bk", "dilation_bk"),
        "adamyan_arov": residual_series(records, "residual_adamyan_arov", "adamyan_arov"),
    }
