"""
SWEEP ENGINE

Purpose:
- Parse and expand λ-grids (A:B:N, inclusive)
- Evaluate one engine row function over a grid on a thread pool, with
  results kept in grid order
- Turn per-point numerical failures into skipped records
- Aggregate residual columns into a PASS / FAIL verification report

Rules:
- Nothing is interpolated at skipped points
- Output order never depends on scheduling
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from app.core.errors import NumericalError, ParseError, ValidationError
from app.core.numerics_config import DEFAULT_RUN_CONFIG, RunConfig
from app.storage.sweep_types import (
    IDENTITIES_BY_MODE,
    TOL_KIND_BK,
    TOL_KIND_TRACE,
    TRACE_IDENTITY,
)

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════
# GRID
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class GridSpec:
    """Uniform inclusive grid of count points from start to stop."""
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError(f"grid needs at least one point, got count {self.count}")
        if self.count > 1 and not self.start < self.stop:
            raise ValidationError(
                f"grid start {self.start} must be below stop {self.stop} when count > 1"
            )

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ParseError(f"grid '{text}' is not of the form A:B:N")
        try:
            start, stop = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError as exc:
            raise ParseError(f"grid '{text}' is not of the form A:B:N: {exc}") from exc
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise ParseError(f"grid '{text}' has non-finite bounds")
        return cls(start, stop, count)

    def points(self) -> List[float]:
        if self.count == 1:
            return [float(self.start)]
        return [float(x) for x in np.linspace(self.start, self.stop, self.count)]


# ══════════════════════════════════════════════════════════════
# RECORDS
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class PointResult:
    """Output of an engine row function: table row plus the scattering matrix."""
    row: Dict[str, float]
    s_matrix: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SweepRecord:
    """
    One grid point: the computed row, or the reason it was skipped.

    Attributes:
        lam: grid point
        row: CSV columns (determinants, spectral shift, residuals)
        skipped: the point raised a NumericalError
        reason: exception name and message of a skipped point
        s_matrix: scattering matrix at lam (None when skipped)
    """
    lam: float
    row: Dict[str, float] = field(default_factory=dict)
    skipped: bool = False
    reason: str = ""
    s_matrix: Optional[np.ndarray] = field(default=None, compare=False)

    @classmethod
    def skip(cls, lam: float, reason: str) -> "SweepRecord":
        return cls(lam=lam, row={}, skipped=True, reason=reason)


@dataclass(frozen=True)
class ResidualSeries:
    """Residuals of one identity over a grid, with the skipped points."""
    identity: str
    lams: List[float]
    residuals: List[float]
    skipped: List[Tuple[float, str]]

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


@dataclass(frozen=True)
class TraceCheck:
    """Trace-formula comparison at one spectral point z."""
    z: complex
    lhs: complex
    rhs: complex
    error_estimate: float
    skipped_points: List[float] = field(default_factory=list)

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


RowFunction = Callable[[float], Union[Dict[str, float], PointResult]]


def _evaluate_point(row_fn: RowFunction, lam: float) -> SweepRecord:
    try:
        result = row_fn(lam)
        if isinstance(result, PointResult):
            return SweepRecord(lam=lam, row=result.row, s_matrix=result.s_matrix)
        return SweepRecord(lam=lam, row=result)
    except NumericalError as exc:
        logger.debug(f"skipping λ = {lam!r}: {type(exc).__name__}: {exc}")
        return SweepRecord.skip(lam, f"{type(exc).__name__}: {exc}")


def map_grid(
    row_fn: RowFunction,
    points: List[float],
    workers: int = DEFAULT_RUN_CONFIG.workers,
) -> List[SweepRecord]:
    """Evaluate row_fn at every point concurrently; records come back in grid order."""
    if workers <= 1 or len(points) <= 1:
        records = [_evaluate_point(row_fn, lam) for lam in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(partial(_evaluate_point, row_fn), points))
    skipped = sum(record.skipped for record in records)
    logger.info(f"sweep finished: {len(records)} points, {skipped} skipped")
    return records


def residual_series(records: List[SweepRecord], column: str, identity: str = None) -> ResidualSeries:
    computed = [record for record in records if not record.skipped]
    return ResidualSeries(
        identity=identity or column,
        lams=[record.lam for record in computed],
        residuals=[float(record.row[column]) for record in computed],
        skipped=[(record.lam, record.reason) for record in records if record.skipped],
    )


# ══════════════════════════════════════════════════════════════
# VERIFICATION REPORT
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class IdentityResult:
    identity: str
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.identity} max_residual={self.max_residual:.3e} tol={self.tol:.1e} {verdict}"


@dataclass(frozen=True)
class VerificationReport:
    mode: str
    results: List[IdentityResult]
    skipped: int

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def lines(self) -> List[str]:
        return [result.line() for result in self.results] + [f"skipped: {self.skipped}"]


def _tolerance(kind: str, config: RunConfig) -> float:
    if kind == TOL_KIND_BK:
        return config.bk_tol
    if kind == TOL_KIND_TRACE:
        return config.trace_tol
    return config.unitarity_tol


def build_report(
    mode: str,
    records: List[SweepRecord],
    trace: Optional[TraceCheck],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> VerificationReport:
    """Per-identity maxima of the residual columns, plus the trace-formula check."""
    identities = IDENTITIES_BY_MODE[mode]
    computed = [record.row for record in records if not record.skipped]
    frame = pd.DataFrame(computed, columns=[column for column, _ in identities.values()])
    maxima = frame.max(axis=0, skipna=False) if len(frame) else pd.Series(0.0, index=frame.columns)

    results = []
    for identity, (column, kind) in identities.items():
        value = float(maxima[column])
        # NaN means a residual could not be formed; treat it as a failure
        if math.isnan(value):
            value = math.inf
        results.append(IdentityResult(identity, value, _tolerance(kind, config)))
    if trace is not None:
        results.append(IdentityResult(TRACE_IDENTITY, trace.residual, config.trace_tol))

    report = VerificationReport(
        mode=mode,
        results=results,
        skipped=sum(record.skipped for record in records),
    )
    for result in report.results:
        if not result.passed:
            logger.warning(f"{result.identity} exceeds tolerance: {result.max_residual:.3e} > {result.tol:.1e}")
    logger.info(f"verification ({mode}): {'PASS' if report.passed else 'FAIL'}, {report.skipped} skipped")
    return report
