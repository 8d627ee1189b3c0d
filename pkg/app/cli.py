"""
WEYL SCATTERING LAB - COMMAND LINE

Commands:
- eval    print M(λ) (boundary value M(λ+i0) on the real axis)
- sweep   per-λ scattering / spectral shift table as CSV
- verify  identity residuals with PASS / FAIL against tolerances

Rules:
- Standard output carries only the command result
- Diagnostics go to standard error through logging
- Exit codes: 0 success, 1 validation, 2 numerical / FAIL, 3 parse / IO
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Union

from app.core.errors import (
    EXIT_OK,
    IoError,
    ParseError,
    ScatteringLabError,
    ValidationError,
    VerificationFailure,
)
from app.core.nevanlinna import NevanlinnaModel, boundary_value, evaluate
from app.core.numerics_config import DEFAULT_RUN_CONFIG, RunConfig
from app.scattering import coupled_engine, dissipative_engine, selfadjoint_engine
from app.scattering.coupled_engine import CoupledSystem
from app.scattering.dissipative_engine import DissipativeParameter
from app.scattering.selfadjoint_engine import SelfAdjointParameter
from app.scattering.sweep_engine import GridSpec, SweepRecord, VerificationReport, build_report
from app.storage.csv_storage import write_sweep_csv
from app.storage.model_store import matrix_to_text, parameter_kind, parse_model, parse_parameter
from app.storage.sweep_types import (
    ALL_MODES,
    MODE_DISSIPATIVE,
    MODE_PARAM_KINDS,
    MODE_SELFADJOINT,
)

logger = logging.getLogger(__name__)

Parameter = Union[SelfAdjointParameter, DissipativeParameter, CoupledSystem]

class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped onto the parse exit code."""

    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


# ==================================================
# ARGUMENT PARSING
# ==================================================

def parse_complex(text: str, what: str) -> complex:
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ParseError(f"{what} '{text}' is not of the form RE[,IM]")
    try:
        values = [float(part) for part in parts]
    except ValueError as exc:
        raise ParseError(f"{what} '{text}' is not of the form RE[,IM]: {exc}") from exc
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


def read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not UTF-8 text: {exc}") from exc
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weyl-scatter", description="Weyl-function scattering lab")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    eval_cmd = commands.add_parser("eval", help="evaluate M(λ) or its boundary value")
    eval_cmd.add_argument("--model", required=True, help="model document (JSON)")
    eval_cmd.add_argument("--lambda", dest="lam", required=True, help="RE[,IM]; real axis uses M(λ+i0)")

    for name, help_text in (("sweep", "write a per-λ CSV table"), ("verify", "check scattering identities")):
        command = commands.add_parser(name, help=help_text)
        command.add_argument("--model", required=True, help="model document (JSON)")
        command.add_argument("--param", required=True, help="parameter document (JSON)")
        command.add_argument("--grid", required=True, help="A:B:N inclusive λ-grid")
        command.add_argument("--mode", required=True, choices=ALL_MODES)
        command.add_argument("--rank-tol", dest="rank_tol", type=float, default=None)
        if name == "sweep":
            command.add_argument("--out", required=True, help="CSV destination")
        else:
            command.add_argument("--z", default=None, help="RE,IM spectral point of the trace formula")
            command.add_argument("--tol", type=float, default=None, help="overrides both identity tolerances")
    return parser


# ==================================================
# PIPELINES
# ==================================================

def load_inputs(model_path: str, param_path: str, mode: str, config: RunConfig):
    model = parse_model(read_text(model_path))
    param_text = read_text(param_path)
    kind = parameter_kind(param_text)
    if kind not in MODE_PARAM_KINDS[mode]:
        accepted = ", ".join(MODE_PARAM_KINDS[mode])
        raise ValidationError(f"parameter kind '{kind}' does not fit mode '{mode}' (accepts {accepted})")
    param = parse_parameter(param_text, model)
    if isinstance(param, DissipativeParameter) and config.rank_tol != param.tol_rel:
        param = DissipativeParameter.from_matrix(param.D, config.rank_tol)
    return model, param


def run_sweep(
    mode: str,
    model: NevanlinnaModel,
    param: Parameter,
    points: List[float],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> List[SweepRecord]:
    if mode == MODE_SELFADJOINT:
        return selfadjoint_engine.scatter_sweep(model, param, points, config)
    if mode == MODE_DISSIPATIVE:
        return dissipative_engine.dissipative_sweep(model, param, points, config)
    return coupled_engine.coupled_sweep(param, points, config)


def run_verification(
    mode: str,
    model: NevanlinnaModel,
    param: Parameter,
    points: List[float],
    config: RunConfig = DEFAULT_RUN_CONFIG,
) -> VerificationReport:
    """Grid identities plus the trace formula at config.z."""
    records = run_sweep(mode, model, param, points, config)
    if mode == MODE_SELFADJOINT:
        trace = selfadjoint_engine.verify_trace_formula(model, param, config.z)
    elif mode == MODE_DISSIPATIVE:
        trace = dissipative_engine.verify_dissipative_trace_formula(model, param, config.z)
    else:
        trace = coupled_engine.verify_coupled_trace_formula(param, config.z)
    return build_report(mode, records, trace, config)


# ==================================================
# COMMANDS
# ==================================================

def cmd_eval(args) -> int:
    model = parse_model(read_text(args.model))
    lam = parse_complex(args.lam, "--lambda")
    value = boundary_value(model, lam.real) if lam.imag == 0 else evaluate(model, lam)
    print(matrix_to_text(value))
    return EXIT_OK


def _config_from(args) -> RunConfig:
    z = None
    if getattr(args, "z", None) is not None:
        z = parse_complex(args.z, "--z")
        if z.imag == 0:
            raise ValidationError(f"--z needs a non-real point, got {args.z}")
    return DEFAULT_RUN_CONFIG.with_overrides(rank_tol=args.rank_tol, tol=getattr(args, "tol", None), z=z)


def cmd_sweep(args) -> int:
    config = _config_from(args)
    grid = GridSpec.parse(args.grid)
    model, param = load_inputs(args.model, args.param, args.mode, config)
    records = run_sweep(args.mode, model, param, grid.points(), config)
    write_sweep_csv(records, args.out, args.mode)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config_from(args)
    grid = GridSpec.parse(args.grid)
    model, param = load_inputs(args.model, args.param, args.mode, config)
    report = run_verification(args.mode, model, param, grid.points(), config)
    for line in report.lines():
        print(line)
    if not report.passed:
        failed = [result.identity for result in report.results if not result.passed]
        raise VerificationFailure(f"identities over tolerance: {', '.join(failed)}")
    return EXIT_OK


_COMMANDS = {
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except ScatteringLabError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code
