"""
NUMERICS CONFIGURATION

Purpose:
- Hold every tolerance and limit used by the numerics in one place
- Carry per-run overrides from the CLI to the engines

Rules:
- Constants are absolute or relative as named
- No environment variables; overrides only through RunConfig
"""

from dataclasses import dataclass, replace
from typing import Optional

# ══════════════════════════════════════════════════════════════
# CONFIGURATION
# ══════════════════════════════════════════════════════════════

# Eigenvalues above RANK_TOL * max(1, ||H||) count as a.c. directions
RANK_TOL = 1e-10

# Exceptional-set guard, relative to 1 + |λ| + max term coefficient norm
EXCEPTIONAL_TOL = 1e-12

# PSD / Hermitian acceptance for Herglotz term coefficients
PSD_TOL = 1e-12

# Imaginary parts above -DOMAIN_TOL * ||T|| are accepted by log / sqrt
DOMAIN_TOL = 1e-10

# Inversions refuse matrices with a larger condition number
MAX_CONDITION = 1e12

# Normality test of the eigen fast path of the matrix log
NORMALITY_TOL = 1e-12

# Integral-defined log: G7K15 tolerance and subdivision limit
LOG_QUAD_TOL = 1e-12
MAX_SUBDIVISIONS = 2000

# SSF trace-formula quadrature
TRACE_QUAD_TOL = 1e-8
MAX_SKIPS = 16

# Verification tolerances
BK_TOL = 1e-8
TRACE_TOL = 1e-6
UNITARITY_TOL = 1e-10

# validate(): pseudorandom sample of the upper half plane
VALIDATION_SAMPLES = 32
VALIDATION_SEED = 20071

# Grid sweeps
SWEEP_WORKERS = 4


@dataclass(frozen=True)
class RunConfig:
    """
    Per-run settings passed from the CLI to sweeps and verifications.

    Attributes:
        rank_tol: relative cutoff for ran(Im M(λ+i0))
        bk_tol: tolerance of algebraic (Birman-Krein type) identities
        trace_tol: tolerance of quadrature-backed trace formulas
        unitarity_tol: tolerance of unitarity / contraction checks
        z: spectral point of trace-formula checks
        workers: thread count of grid sweeps
    """
    rank_tol: float = RANK_TOL
    bk_tol: float = BK_TOL
    trace_tol: float = TRACE_TOL
    unitarity_tol: float = UNITARITY_TOL
    z: complex = 1j
    workers: int = SWEEP_WORKERS

    def with_overrides(
        self,
        rank_tol: Optional[float] = None,
        tol: Optional[float] = None,
        z: Optional[complex] = None,
    ) -> "RunConfig":
        """Return a copy with the CLI overrides applied (tol replaces both identity tolerances)."""
        updated = self
        if rank_tol is not None:
            updated = replace(updated, rank_tol=rank_tol)
        if tol is not None:
            updated = replace(updated, bk_tol=tol, trace_tol=tol)
        if z is not None:
            updated = replace(updated, z=z)
        return updated


DEFAULT_RUN_CONFIG = RunConfig()
