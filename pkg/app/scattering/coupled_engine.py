"""
COUPLED SCATTERING ENGINE

Purpose:
- Scattering of the coupling of an inner system (Weyl function M) with an
  exit channel (Weyl function τ) through the coupling relation
- Channel scattering matrices S_ℌ, S_𝔊 and the full matrix
- Coupled spectral shift ξ̃, Štraus resolvent traces, η-functions of the
  frozen Štraus family
- Modified Birman-Krein checks in both orientations

Rules:
- The coupling relation has operator part 0 on {(v, v)}; its compression
  ½(M + τ) is used directly, the factor ½ drops out of every formula
- ξ̃ is the k = 0 representative (1/π) Im tr log(M + τ)
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Literal

import numpy as np

from app.core.errors import DimensionError, ValidationError
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
    direct_sum,
    evaluate,
    exceptional_points,
)
from app.core.numerics_config import DEFAULT_RUN_CONFIG, RANK_TOL, TRACE_QUAD_TOL, RunConfig
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

CHANNEL_H: Literal["H"] = "H"
CHANNEL_G: Literal["G"] = "G"


@dataclass(frozen=True, eq=False)
class CoupledSystem:
    """Inner model M (model_h) coupled to exit-channel model τ (model_g)."""
    model_h: NevanlinnaModel
    model_g: NevanlinnaModel

    def __post_init__(self):
        if self.model_h.dim != self.model_g.dim:
            raise DimensionError(
                f"coupled models need equal dimensions, got {self.model_h.dim} and {self.model_g.dim}"
            )

    @property
    def dim(self) -> int:
        return self.model_h.dim

    def swapped(self) -> "CoupledSystem":
        return CoupledSystem(self.model_g, self.model_h)

    def exceptional_points(self) -> List[float]:
        return sorted(set(exceptional_points(self.model_h)) | set(exceptional_points(self.model_g)))


@dataclass(frozen=True, eq=False)
class ChannelScatterValue:
    """Coupled scattering data at one λ; blocks in the (ℋ_{M(λ)}, ℋ_{τ(λ)}) bases."""
    lam: float
    subspace_h: SpectralSubspace
    subspace_g: SpectralSubspace
    s_full: np.ndarray
    s_h: np.ndarray
    s_g: np.ndarray
    xi_tilde: float
    eta_tau: float
    eta_m: float

    @property
    def rank_h(self) -> int:
        return self.subspace_h.rank

    @property
    def rank_g(self) -> int:
        return self.subspace_g.rank


# ══════════════════════════════════════════════════════════════
# SCATTERING
# ══════════════════════════════════════════════════════════════

def _coupled_sum(system: CoupledSystem, lam: float):
    value_h = boundary_value(system.model_h, lam)
    value_g = boundary_value(system.model_g, lam)
    return value_h, value_g, value_h + value_g


def coupled_ssf(system: CoupledSystem, lam: float) -> float:
    """ξ̃(λ) = (1/π) Im tr log(M(λ+i0) + τ(λ+i0))."""
    _, _, total = _coupled_sum(system, lam)
    return tr_log(total).imag / np.pi


def eta_channel(system: CoupledSystem, which: str, mu: float, lam: float) -> float:
    """
    η of the frozen Štraus parameter at μ, evaluated at λ.

    H: (1/π) Im tr log(M(λ+i0) + τ(μ+i0))
    G: (1/π) Im tr log(τ(λ+i0) + M(μ+i0))
    """
    if which == CHANNEL_H:
        inner, frozen = system.model_h, system.model_g
    elif which == CHANNEL_G:
        inner, frozen = system.model_g, system.model_h
    else:
        raise ValidationError(f"channel must be '{CHANNEL_H}' or '{CHANNEL_G}', got '{which}'")
    return tr_log(boundary_value(inner, lam) + boundary_value(frozen, mu)).imag / np.pi


def coupled_scattering(system: CoupledSystem, lam: float, tol_rel: float = RANK_TOL) -> ChannelScatterValue:
    """
    s_full = I − 2i [X_i* (M + τ)⁻¹ X_j], X_H = √Im M(λ+i0), X_G = √Im τ(λ+i0).

    s_h and s_g are the diagonal blocks.
    """
    value_h, value_g, total = _coupled_sum(system, lam)
    resolvent = checked_inverse(total, "M(λ+i0) + τ(λ+i0)")
    subspace_h = range_projection(imag_part(value_h), tol_rel)
    subspace_g = range_projection(imag_part(value_g), tol_rel)
    factor = np.hstack([subspace_h.weighted_basis(), subspace_g.weighted_basis()])
    s_full = np.eye(factor.shape[1], dtype=complex) - 2j * factor.conj().T @ resolvent @ factor
    split = subspace_h.rank
    xi_tilde = tr_log(total).imag / np.pi
    return ChannelScatterValue(
        lam=lam,
        subspace_h=subspace_h,
        subspace_g=subspace_g,
        s_full=s_full,
        s_h=s_full[:split, :split],
        s_g=s_full[split:, split:],
        xi_tilde=xi_tilde,
        eta_tau=eta_channel(system, CHANNEL_H, lam, lam),
        eta_m=eta_channel(system, CHANNEL_G, lam, lam),
    )


def straus_traces(system: CoupledSystem, z: complex):
    """(−tr((M + τ)⁻¹ M'), −tr((M + τ)⁻¹ τ')) at non-real z."""
    resolvent = checked_inverse(evaluate(system.model_h, z) + evaluate(system.model_g, z), "M(z) + τ(z)")
    trace_h = complex(-np.trace(resolvent @ derivative(system.model_h, z)))
    trace_g = complex(-np.trace(resolvent @ derivative(system.model_g, z)))
    return trace_h, trace_g


# ══════════════════════════════════════════════════════════════
# COUPLING AS A SELFADJOINT SYSTEM
# ══════════════════════════════════════════════════════════════

def coupled_weyl_model(system: CoupledSystem) -> NevanlinnaModel:
    """diag(M, τ)."""
    return direct_sum(system.model_h, system.model_g)


def coupling_parameter(system: CoupledSystem) -> SelfAdjointParameter:
    """Zero operator part on {(v, v)}, basis (e_j, e_j)/√2."""
    n = system.dim
    basis = np.vstack([np.eye(n), np.eye(n)]).astype(complex) / np.sqrt(2.0)
    return SelfAdjointParameter(2 * n, basis, np.zeros((n, n), dtype=complex))


def verify_coupled_trace_formula(system: CoupledSystem, z: complex, tol: float = TRACE_QUAD_TOL) -> TraceCheck:
    """trace_h + trace_g against −∫ ξ̃(t)/(t − z)² dt."""
    trace_h, trace_g = straus_traces(system, z)
    result = integrate_ssf_kernel(
        lambda t: coupled_ssf(system, t),
        z,
        tol=tol,
        bound=system.dim,
        breakpoints=system.exceptional_points(),
    )
    check = TraceCheck(complex(z), trace_h + trace_g, result.value, result.abs_error_estimate, result.skipped_points)
    logger.info(f"coupled trace formula at z = {z}: residual {check.residual:.3e}")
    return check


# ══════════════════════════════════════════════════════════════
# SWEEPS AND VERIFICATION
# ══════════════════════════════════════════════════════════════

def sweep_row(system: CoupledSystem, lam: float, config: RunConfig = DEFAULT_RUN_CONFIG) -> PointResult:
    value = coupled_scattering(system, lam, config.rank_tol)
    det_h = determinant(value.s_h)
    det_g = determinant(value.s_g)
    phase = np.exp(-2j * np.pi * value.xi_tilde)
    eta_residual = max(
        abs(np.exp(-2j * np.pi * value.eta_tau) - phase),
        abs(np.exp(-2j * np.pi * value.eta_m) - phase),
    )
    row = {
        "rank_h": value.rank_h,
        "rank_g": value.rank_g,
        "det_sh_re": det_h.real,
        "det_sh_im": det_h.imag,
        "det_sg_re": det_g.real,
        "det_sg_im": det_g.imag,
        "xi": value.xi_tilde,
        "residual_bk": abs(determinant(value.s_full) - phase),
        "residual_mbk_h": abs(det_h - np.conj(det_g) * phase),
        "residual_mbk_g": abs(det_g - np.conj(det_h) * phase),
        "residual_eta": eta_residual,
        "unitarity": unitarity_defect(value.s_full),
        "contraction": max(contraction_defect(value.s_h), contraction_defect(value.s_g)),
    }
    return PointResult(row, value.s_full)


def coupled_sweep(system: CoupledSystem, grid: List[float], config: RunConfig = DEFAULT_RUN_CONFIG) -> List[SweepRecord]:
    return map_grid(lambda lam: sweep_row(system, lam, config), list(grid), config.workers)


def verify_coupled_bk(
    system: CoupledSystem,
    grid: List[float],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> Dict[str, ResidualSeries]:
    """
    Residual series of
    det S_ℌ = conj(det S_𝔊)·e^{−2πiξ̃} (coupled_bk_h),
    det S_𝔊 = conj(det S_ℌ)·e^{−2πiξ̃} (coupled_bk_g),
    det s_full = e^{−2πiξ̃} (full_bk) and the exp-level η = ξ̃ check (eta_channel).
    """
    records = coupled_sweep(system, grid, config)
    return {
        "coupled_bk_h": residual_series(records, "residual_mbk_h", "coupled_bk_h"),
        "coupled_bk_g": residual_series(records, "residual_mbk_g", "coupled_bk_g"),
        "full_bk": residual_series(records, "residual_bk", "full_bk"),
        "eta_channel": residual_series(records, "residual_eta", "eta_channel"),
    }
