"""
NEVANLINNA MODEL ENGINE

Purpose:
- Represent matrix-valued Nevanlinna (Herglotz) functions as finite sums of
  closed-form terms
- Evaluate M(λ) off the real axis, its derivative, and its exact boundary
  value M(λ+i0) on the real axis
- Build block-diagonal direct sums (dilation / coupling Weyl functions)
- Report invariant violations without raising

Term algebra:
- ConstantTerm   C for Im λ > 0, C* for Im λ < 0          (Im C ⪰ 0)
- AffineTerm     A + λB                                    (A = A*, B ⪰ 0)
- PoleTerm       G / (t − λ)                               (G ⪰ 0)
- AcBoxTerm      R · Log((b − λ)/(a − λ)), principal Log   (R ⪰ 0, a < b)
- SqrtTerm       G · i√λ with Im √λ ≥ 0                    (G ⪰ 0)

Rules:
- Models are immutable; every operation is a pure function
- No validation on construction beyond shapes (validate() reports)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from app.core.errors import DimensionError, DomainError, ExceptionalPointError
from app.core.numerics_config import (
    EXCEPTIONAL_TOL,
    PSD_TOL,
    VALIDATION_SAMPLES,
    VALIDATION_SEED,
)

logger = logging.getLogger(__name__)


def _as_matrix(value, dim: int = None) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(value, dtype=complex))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    if dim is not None and matrix.shape[0] != dim:
        raise DimensionError(f"expected a {dim}x{dim} matrix, got {matrix.shape}")
    return matrix


def _is_hermitian(matrix: np.ndarray, tol: float = PSD_TOL) -> bool:
    if not np.all(np.isfinite(matrix)):
        return False
    scale = max(1.0, float(np.linalg.norm(matrix, 2))) if matrix.size else 1.0
    return bool(np.linalg.norm(matrix - matrix.conj().T, 2) <= tol * scale) if matrix.size else True


def _is_psd(matrix: np.ndarray, tol: float = PSD_TOL) -> bool:
    if not matrix.size:
        return True
    if not _is_hermitian(matrix, tol):
        return False
    hermitian = 0.5 * (matrix + matrix.conj().T)
    smallest = float(np.linalg.eigvalsh(hermitian).min())
    return smallest >= -tol * float(np.linalg.norm(matrix, 2))


def _upper_sqrt(z: complex) -> complex:
    """Square root on the branch Im √z ≥ 0."""
    root = np.sqrt(complex(z))
    if root.imag < 0:
        root = -root
    return root


def _pad(matrix: np.ndarray, offset: int, total: int) -> np.ndarray:
    padded = np.zeros((total, total), dtype=complex)
    size = matrix.shape[0]
    padded[offset:offset + size, offset:offset + size] = matrix
    return padded


# ══════════════════════════════════════════════════════════════
# HERGLOTZ TERMS
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class ConstantTerm:
    """C for Im λ > 0, C* for Im λ < 0; boundary value C."""
    C: np.ndarray
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, "C", _as_matrix(self.C))

    @property
    def dim(self) -> int:
        return self.C.shape[0]

    def evaluate(self, z: complex) -> np.ndarray:
        return self.C.copy() if z.imag > 0 else self.C.conj().T

    def derivative(self, z: complex) -> np.ndarray:
        return np.zeros_like(self.C)

    def boundary_value(self, x: float) -> np.ndarray:
        return self.C.copy()

    def exceptional_points(self) -> List[float]:
        return []

    def coefficient_norm(self) -> float:
        return float(np.linalg.norm(self.C, 2))

    def violations(self) -> List[str]:
        imag = (self.C - self.C.conj().T) / 2j
        return [] if _is_psd(imag) else ["Im C ⪰ 0 fails"]

    def padded(self, offset: int, total: int) -> "ConstantTerm":
        return ConstantTerm(_pad(self.C, offset, total))


@dataclass(frozen=True, eq=False)
class AffineTerm:
    """A + λB."""
    A: np.ndarray
    B: np.ndarray
    kind = "affine"

    def __post_init__(self):
        object.__setattr__(self, "A", _as_matrix(self.A))
        object.__setattr__(self, "B", _as_matrix(self.B, self.A.shape[0]))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def evaluate(self, z: complex) -> np.ndarray:
        return self.A + z * self.B

    def derivative(self, z: complex) -> np.ndarray:
        return self.B.copy()

    def boundary_value(self, x: float) -> np.ndarray:
        return self.A + x * self.B

    def exceptional_points(self) -> List[float]:
        return []

    def coefficient_norm(self) -> float:
        return max(float(np.linalg.norm(self.A, 2)), float(np.linalg.norm(self.B, 2)))

    def violations(self) -> List[str]:
        found = []
        if not _is_hermitian(self.A):
            found.append("A = A* fails")
        if not _is_psd(self.B):
            found.append("B ⪰ 0 fails")
        return found

    def padded(self, offset: int, total: int) -> "AffineTerm":
        return AffineTerm(_pad(self.A, offset, total), _pad(self.B, offset, total))


@dataclass(frozen=True, eq=False)
class PoleTerm:
    """G / (t − λ)."""
    t: float
    G: np.ndarray
    kind = "pole"

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "G", _as_matrix(self.G))

    @property
    def dim(self) -> int:
        return self.G.shape[0]

    def evaluate(self, z: complex) -> np.ndarray:
        return self.G / (self.t - z)

    def derivative(self, z: complex) -> np.ndarray:
        return self.G / (self.t - z) ** 2

    def boundary_value(self, x: float) -> np.ndarray:
        return self.G / (self.t - x)

    def exceptional_points(self) -> List[float]:
        return [self.t]

    def coefficient_norm(self) -> float:
        return max(float(np.linalg.norm(self.G, 2)), abs(self.t))

    def violations(self) -> List[str]:
        found = [] if np.isfinite(self.t) else ["t finite fails"]
        if not _is_psd(self.G):
            found.append("G ⪰ 0 fails")
        return found

    def padded(self, offset: int, total: int) -> "PoleTerm":
        return PoleTerm(self.t, _pad(self.G, offset, total))


@dataclass(frozen=True, eq=False)
class AcBoxTerm:
    """R · Log((b − λ)/(a − λ)); density R/π on (a, b)."""
    a: float
    b: float
    R: np.ndarray
    kind = "acbox"

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "R", _as_matrix(self.R))

    @property
    def dim(self) -> int:
        return self.R.shape[0]

    def evaluate(self, z: complex) -> np.ndarray:
        return self.R * np.log((self.b - z) / (self.a - z))

    def derivative(self, z: complex) -> np.ndarray:
        return self.R * (1.0 / (self.a - z) - 1.0 / (self.b - z))

    def boundary_value(self, x: float) -> np.ndarray:
        if self.a < x < self.b:
            return self.R * (np.log((self.b - x) / (x - self.a)) + 1j * np.pi)
        return self.R * np.log((self.b - x) / (self.a - x))

    def exceptional_points(self) -> List[float]:
        return [self.a, self.b]

    def coefficient_norm(self) -> float:
        return max(float(np.linalg.norm(self.R, 2)), abs(self.a), abs(self.b))

    def violations(self) -> List[str]:
        found = []
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            found.append("a, b finite fails")
        elif not self.a < self.b:
            found.append("a < b fails")
        if not _is_psd(self.R):
            found.append("R ⪰ 0 fails")
        return found

    def padded(self, offset: int, total: int) -> "AcBoxTerm":
        return AcBoxTerm(self.a, self.b, _pad(self.R, offset, total))


@dataclass(frozen=True, eq=False)
class SqrtTerm:
    """G · i√λ on the branch Im √λ ≥ 0."""
    G: np.ndarray
    kind = "sqrt"

    def __post_init__(self):
        object.__setattr__(self, "G", _as_matrix(self.G))

    @property
    def dim(self) -> int:
        return self.G.shape[0]

    def evaluate(self, z: complex) -> np.ndarray:
        return self.G * (1j * _upper_sqrt(z))

    def derivative(self, z: complex) -> np.ndarray:
        return self.G * (1j / (2.0 * _upper_sqrt(z)))

    def boundary_value(self, x: float) -> np.ndarray:
        if x > 0:
            return self.G * (1j * np.sqrt(x))
        return self.G * (-np.sqrt(-x))

    def exceptional_points(self) -> List[float]:
        return [0.0]

    def coefficient_norm(self) -> float:
        return float(np.linalg.norm(self.G, 2))

    def violations(self) -> List[str]:
        return [] if _is_psd(self.G) else ["G ⪰ 0 fails"]

    def padded(self, offset: int, total: int) -> "SqrtTerm":
        return SqrtTerm(_pad(self.G, offset, total))


# ══════════════════════════════════════════════════════════════
# MODEL
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class NevanlinnaModel:
    """
    Finite sum of Herglotz terms of a common size dim × dim.

    Attributes:
        dim: matrix size
        terms: Herglotz terms, evaluated and summed in order
        name: label carried into documents and reports
    """
    dim: int
    terms: Tuple = field(default_factory=tuple)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.dim < 1:
            raise DimensionError(f"model dimension must be positive, got {self.dim}")
        for index, term in enumerate(self.terms):
            if term.dim != self.dim:
                raise DimensionError(
                    f"term {index} ({term.kind}) has size {term.dim}, model has {self.dim}"
                )


def exceptional_points(model: NevanlinnaModel) -> List[float]:
    """Sorted pole locations, box endpoints and square-root branch points."""
    points = set()
    for term in model.terms:
        points.update(term.exceptional_points())
    return sorted(points)


def _scale(model: NevanlinnaModel, x: float) -> float:
    coefficient = max((term.coefficient_norm() for term in model.terms), default=0.0)
    return 1.0 + abs(x) + coefficient


def _require_nonreal(z: complex, operation: str) -> complex:
    z = complex(z)
    if z.imag == 0:
        raise DomainError(f"{operation} needs Im λ ≠ 0, got λ = {z.real}; use boundary_value")
    return z


def evaluate(model: NevanlinnaModel, z: complex) -> np.ndarray:
    """M(λ) for non-real λ."""
    z = _require_nonreal(z, "eval")
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for term in model.terms:
        total += term.evaluate(z)
    return total


def derivative(model: NevanlinnaModel, z: complex) -> np.ndarray:
    """Exact term-wise dM/dλ for non-real λ."""
    z = _require_nonreal(z, "derivative")
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for term in model.terms:
        total += term.derivative(z)
    return total


def boundary_value(model: NevanlinnaModel, x: float) -> np.ndarray:
    """
    Exact limit M(λ+i0) at real λ.

    Raises:
        ExceptionalPointError: λ within EXCEPTIONAL_TOL·scale of a pole,
            box endpoint or square-root branch point.
    """
    x = float(x)
    guard = EXCEPTIONAL_TOL * _scale(model, x)
    for point in exceptional_points(model):
        if abs(x - point) <= guard:
            raise ExceptionalPointError(
                f"λ = {x!r} lies on the exceptional set of model '{model.name}' (point {point!r})"
            )
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for term in model.terms:
        total += term.boundary_value(x)
    return total


def direct_sum(first: NevanlinnaModel, second: NevanlinnaModel, name: str = None) -> NevanlinnaModel:
    """
    Block-diagonal model diag(first, second) built by zero-padding every term.

    Poles of both blocks at the same location merge into one PoleTerm with
    the block-diagonal residue, so pole locations stay pairwise distinct.
    """
    total = first.dim + second.dim
    padded = [term.padded(0, total) for term in first.terms]
    padded += [term.padded(first.dim, total) for term in second.terms]

    terms = []
    pole_slot: Dict[float, int] = {}
    for term in padded:
        if isinstance(term, PoleTerm) and term.t in pole_slot:
            slot = pole_slot[term.t]
            terms[slot] = PoleTerm(term.t, terms[slot].G + term.G)
            continue
        if isinstance(term, PoleTerm):
            pole_slot[term.t] = len(terms)
        terms.append(term)
    label = name if name is not None else f"{first.name}⊕{second.name}"
    return NevanlinnaModel(dim=total, terms=tuple(terms), name=label)


def sample_upper_half_plane(count: int, seed: int) -> np.ndarray:
    """Deterministic pseudorandom points in ℂ₊ spread over several scales."""
    rng = np.random.default_rng(seed)
    real = rng.uniform(-10.0, 10.0, count)
    imag = 10.0 ** rng.uniform(-3.0, 1.0, count)
    return real + 1j * imag


def validate(model: NevanlinnaModel) -> List[str]:
    """
    Check term invariants and sample the Nevanlinna property.

    Returns:
        list of violation messages; empty iff the model is valid
    """
    violations: List[str] = []
    first_pole: Dict[float, int] = {}
    for index, term in enumerate(model.terms):
        for message in term.violations():
            violations.append(f"term {index} ({term.kind}): {message}")
        if isinstance(term, PoleTerm):
            if term.t in first_pole:
                violations.append(
                    f"term {index} (pole): location t = {term.t:g} repeats term {first_pole[term.t]}"
                )
            else:
                first_pole[term.t] = index

    # sampling a model with broken coefficients can fail inside LAPACK
    if violations:
        logger.debug(f"model '{model.name}' has {len(violations)} violation(s)")
        return violations

    for z in sample_upper_half_plane(VALIDATION_SAMPLES, VALIDATION_SEED):
        value = evaluate(model, z)
        imag = (value - value.conj().T) / 2j
        smallest = float(np.linalg.eigvalsh(0.5 * (imag + imag.conj().T)).min())
        if smallest < -PSD_TOL * (1.0 + float(np.linalg.norm(value, 2))):
            violations.append(f"Im M(λ) ⪰ 0 fails at λ = {z:.6g} (min eigenvalue {smallest:.3e})")
            break

    if violations:
        logger.debug(f"model '{model.name}' has {len(violations)} violation(s)")
    return violations
