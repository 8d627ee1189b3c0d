"""
ADAPTIVE GAUSS-KRONROD QUADRATURE

Purpose:
- Integrate scalar or matrix-valued integrands with a global adaptive
  G7K15 rule (largest-error panel is bisected first)
- Half-line integrals through the substitution t = u/(1 − u)
- Trace-formula integrals −∫ ξ(t)/(t − z)² dt over ℝ for bounded,
  almost-everywhere defined spectral shift functions

Rules:
- Deterministic: panels are kept in left-to-right order and summed in
  that order, ties in the error search go to the leftmost panel
- Error estimate per panel is |K15 − G7| (no heuristic rescaling)
- Non-convergence raises QuadratureError
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional

import numpy as np

from app.core.errors import NumericalError, QuadratureError
from app.core.numerics_config import (
    LOG_QUAD_TOL,
    MAX_SKIPS,
    MAX_SUBDIVISIONS,
    TRACE_QUAD_TOL,
)

logger = logging.getLogger(__name__)

# ══════════════════════════════════════════════════════════════
# GAUSS-KRONROD 7/15 RULE
# ══════════════════════════════════════════════════════════════

# Kronrod abscissae on [0, 1]; odd indices are the Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])

_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])

# Gauss weights for _XGK[1], _XGK[3], _XGK[5], _XGK[7]
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full node list on [-1, 1] with matching weights, left to right.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_WEIGHTS = np.zeros(15)
for _index in (1, 3, 5):
    _GAUSS_WEIGHTS[_index] = _WG[_index // 2]
    _GAUSS_WEIGHTS[14 - _index] = _WG[_index // 2]
_GAUSS_WEIGHTS[7] = _WG[3]


@dataclass
class QuadratureResult:
    """
    Outcome of one adaptive integration.

    Attributes:
        value: integral estimate (complex scalar or matrix)
        abs_error_estimate: bound on |true − value| (max-norm for matrices)
        evaluations: number of integrand evaluations
        converged: abs_error_estimate met the requested tolerance
        skipped_points: nodes where the integrand was undefined
    """
    value: object
    abs_error_estimate: float
    evaluations: int
    converged: bool
    skipped_points: List[float] = field(default_factory=list)


@dataclass
class _Panel:
    a: float
    b: float
    value: object
    error: float


def _size(value) -> float:
    return float(np.max(np.abs(value))) if np.ndim(value) else abs(value)


def _apply_rule(f: Callable, a: float, b: float) -> _Panel:
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    points = center + half * _NODES
    # integrands that need the whole panel (gap bridging) expose evaluate_panel
    evaluate_panel = getattr(f, "evaluate_panel", None)
    if evaluate_panel is not None:
        samples = [np.asarray(value, dtype=complex) for value in evaluate_panel(points)]
    else:
        samples = [np.asarray(f(t), dtype=complex) for t in points]
    stacked = np.stack(samples)
    kronrod = half * np.tensordot(_KRONROD_WEIGHTS, stacked, axes=1)
    gauss = half * np.tensordot(_GAUSS_WEIGHTS, stacked, axes=1)
    return _Panel(a, b, kronrod, _size(kronrod - gauss))


def _total(panels: List[_Panel]):
    value = panels[0].value
    for panel in panels[1:]:
        value = value + panel.value
    return value


def integrate_interval(
    f: Callable,
    a: float,
    b: float,
    tol: float = LOG_QUAD_TOL,
    breakpoints: Iterable[float] = (),
    max_subdivisions: int = MAX_SUBDIVISIONS,
    relative: bool = True,
) -> QuadratureResult:
    """
    Global adaptive G7K15 integration of f over [a, b].

    Args:
        f: scalar or matrix-valued integrand
        tol: target for the summed panel errors; scaled by max(1, |I|)
            when relative is set
        breakpoints: interior points that become initial panel edges
        max_subdivisions: panel limit before QuadratureError

    Returns:
        QuadratureResult with converged=True
    """
    if not a < b:
        raise QuadratureError(f"integration interval [{a}, {b}] is empty")
    edges = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    panels = [_apply_rule(f, left, right) for left, right in zip(edges[:-1], edges[1:])]
    evaluations = 15 * len(panels)

    while True:
        value = _total(panels)
        errors = np.array([panel.error for panel in panels])
        error = float(errors.sum())
        target = tol * max(1.0, _size(value)) if relative else tol
        if error <= target:
            return QuadratureResult(value, error, evaluations, True)
        if len(panels) >= max_subdivisions:
            raise QuadratureError(
                f"no convergence after {len(panels)} subdivisions "
                f"(error {error:.3e}, target {target:.3e})"
            )

        worst = int(np.argmax(errors))
        panel = panels[worst]
        mid = 0.5 * (panel.a + panel.b)
        if not panel.a < mid < panel.b:
            raise QuadratureError(f"panel [{panel.a!r}, {panel.b!r}] cannot be bisected further")
        panels[worst:worst + 1] = [_apply_rule(f, panel.a, mid), _apply_rule(f, mid, panel.b)]
        evaluations += 30


def integrate_halfline(
    f: Callable,
    tol: float = LOG_QUAD_TOL,
    max_subdivisions: int = MAX_SUBDIVISIONS,
) -> QuadratureResult:
    """∫₀^∞ f(t) dt via t = u/(1 − u) on (0, 1); f needs an O(t⁻²) tail."""

    def mapped(u: float):
        one_minus = 1.0 - u
        return np.asarray(f(u / one_minus), dtype=complex) / (one_minus * one_minus)

    return integrate_interval(mapped, 0.0, 1.0, tol=tol, max_subdivisions=max_subdivisions)


# ══════════════════════════════════════════════════════════════
# TRACE-FORMULA INTEGRALS
# ══════════════════════════════════════════════════════════════

def _dyadic_edges(limit: float) -> List[float]:
    edges = [0.0]
    power = 1.0
    while power < limit:
        edges.extend([power, -power])
        power *= 2.0
    edges.extend([limit, -limit])
    edges.extend([0.5, -0.5, 0.25, -0.25])
    return sorted(set(edges))


def bridge_gaps(values: List[Optional[float]]) -> List[float]:
    """
    Fill undefined entries (None) of an ordered sample list.

    A gap takes the midpoint of the nearest defined values on its left and
    right; at either end of the list the single defined neighbour is used.

    Raises:
        QuadratureError: no entry is defined
    """
    defined = [index for index, value in enumerate(values) if value is not None]
    if not defined:
        raise QuadratureError(f"all {len(values)} samples are undefined")
    filled = []
    for index, value in enumerate(values):
        if value is not None:
            filled.append(value)
            continue
        left = [k for k in defined if k < index]
        right = [k for k in defined if k > index]
        neighbours = ([values[left[-1]]] if left else []) + ([values[right[0]]] if right else [])
        filled.append(sum(neighbours) / len(neighbours))
    return filled


class _SkippingIntegrand:
    """Wrap an a.e.-defined SSF; undefined nodes are bridged within their panel."""

    def __init__(self, ssf: Callable[[float], float], z: complex, max_skips: int):
        self.ssf = ssf
        self.z = z
        self.max_skips = max_skips
        self.skipped: List[float] = []

    def _value(self, t: float) -> Optional[float]:
        try:
            return float(self.ssf(t))
        except NumericalError as exc:
            self.skipped.append(float(t))
            if len(self.skipped) > self.max_skips:
                raise QuadratureError(
                    f"more than {self.max_skips} undefined SSF points; last at t = {t!r}: {exc}"
                ) from exc
            return None

    def evaluate_panel(self, points) -> List[complex]:
        values = [self._value(t) for t in points]
        try:
            values = bridge_gaps(values)
        except QuadratureError as exc:
            raise QuadratureError(f"SSF undefined on panel [{points[0]!r}, {points[-1]!r}]") from exc
        return [value / (t - self.z) ** 2 for value, t in zip(values, points)]

    def __call__(self, t: float) -> complex:
        value = self._value(t)
        if value is None:
            raise QuadratureError(f"SSF undefined at isolated point t = {t!r}")
        return value / (t - self.z) ** 2


def integrate_ssf_kernel(
    ssf: Callable[[float], float],
    z: complex,
    tol: float = TRACE_QUAD_TOL,
    bound: float = 1.0,
    breakpoints: Iterable[float] = (),
    max_skips: int = MAX_SKIPS,
) -> QuadratureResult:
    """
    −∫ ξ(t)/(t − z)² dt over ℝ.

    The range is cut at ±T with T = |z| + 4·bound/tol so that the tails,
    bounded by |ξ| ≤ bound, contribute at most tol/2; that bound is added
    to the reported error. Points where ξ raises a NumericalError are
    bridged and listed in skipped_points.

    Args:
        ssf: spectral shift function, may raise NumericalError on a null set
        z: non-real spectral parameter
        bound: sup |ξ| (the dimension of the system)
        breakpoints: known jump / kink locations (exceptional points)
    """
    z = complex(z)
    if z.imag == 0:
        raise QuadratureError("trace-formula integral needs Im z ≠ 0")
    limit = abs(z) + 4.0 * max(bound, 1.0) / tol
    tail = 2.0 * max(bound, 1.0) / (limit - abs(z))

    integrand = _SkippingIntegrand(ssf, z, max_skips)
    edges = set(_dyadic_edges(limit))
    edges.add(z.real)
    edges.update(float(p) for p in breakpoints)
    interior = [p for p in edges if -limit < p < limit]

    result = integrate_interval(
        integrand,
        -limit,
        limit,
        tol=tol / 2.0,
        breakpoints=interior,
        max_subdivisions=MAX_SUBDIVISIONS,
        relative=False,
    )
    if integrand.skipped:
        logger.debug(f"trace integral bridged {len(integrand.skipped)} undefined SSF point(s)")
    return QuadratureResult(
        value=-complex(result.value),
        abs_error_estimate=result.abs_error_estimate + tail,
        evaluations=result.evaluations,
        converged=True,
        skipped_points=sorted(integrand.skipped),
    )
