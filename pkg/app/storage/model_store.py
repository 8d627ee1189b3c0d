"""
MODEL STORE

Purpose:
- Parse model and parameter documents (JSON) into engine objects
- Serialize models back to their canonical document form
- Render matrices in the same notation for command output

Document rules:
- Complex numbers are [re, im] pairs, matrices row-major nested arrays
- Structure is checked against Draft 7 schemas before any semantic check
- Structural problems raise ParseError with the JSON path of the field;
  invariant violations raise ValidationError naming term and invariant
"""

import json
import logging
import math
from typing import Any, Dict, List, Union

import numpy as np
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from app.core.errors import ParseError, ValidationError
from app.core.matfun import imag_part
from app.core.nevanlinna import (
    AcBoxTerm,
    AffineTerm,
    ConstantTerm,
    NevanlinnaModel,
    PoleTerm,
    SqrtTerm,
    validate,
)
from app.scattering.coupled_engine import CoupledSystem
from app.scattering.dissipative_engine import DissipativeParameter
from app.scattering.selfadjoint_engine import SelfAdjointParameter
from app.storage.sweep_types import (
    PARAM_COUPLED,
    PARAM_DISSIPATIVE,
    PARAM_RELATION,
    PARAM_THETA,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

# Hermitian / dissipativity acceptance for parameter documents
PARAMETER_TOL = 1e-10

# ==================================================
# SCHEMAS
# ==================================================

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

_MATRIX = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "items": _COMPLEX},
}

TERM_SCHEMAS: Dict[str, Dict[str, Any]] = {
    "constant": {
        "type": "object",
        "required": ["kind", "C"],
        "properties": {"kind": {"const": "constant"}, "C": _MATRIX},
        "additionalProperties": False,
    },
    "affine": {
        "type": "object",
        "required": ["kind", "A", "B"],
        "properties": {"kind": {"const": "affine"}, "A": _MATRIX, "B": _MATRIX},
        "additionalProperties": False,
    },
    "pole": {
        "type": "object",
        "required": ["kind", "t", "G"],
        "properties": {"kind": {"const": "pole"}, "t": {"type": "number"}, "G": _MATRIX},
        "additionalProperties": False,
    },
    "acbox": {
        "type": "object",
        "required": ["kind", "a", "b", "R"],
        "properties": {
            "kind": {"const": "acbox"},
            "a": {"type": "number"},
            "b": {"type": "number"},
            "R": _MATRIX,
        },
        "additionalProperties": False,
    },
    "sqrt": {
        "type": "object",
        "required": ["kind", "G"],
        "properties": {"kind": {"const": "sqrt"}, "G": _MATRIX},
        "additionalProperties": False,
    },
}

MODEL_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "name", "dim", "terms"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": sorted(TERM_SCHEMAS)}},
            },
        },
    },
}

PARAMETER_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {
        PARAM_THETA: {
            "type": "object",
            "required": ["op_basis", "theta_op"],
            "properties": {
                "op_basis": {"oneOf": [{"const": "full"}, _MATRIX]},
                "theta_op": _MATRIX,
            },
            "additionalProperties": False,
        },
        PARAM_RELATION: {
            "type": "object",
            "required": ["op_rank"],
            "properties": {"op_rank": {"const": 0}},
            "additionalProperties": False,
        },
        PARAM_DISSIPATIVE: {
            "type": "object",
            "required": ["D"],
            "properties": {"D": _MATRIX},
            "additionalProperties": False,
        },
        PARAM_COUPLED: {
            "type": "object",
            "required": ["model_g"],
            "properties": {"model_g": {"type": "object"}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_MODEL_VALIDATOR = Draft7Validator(MODEL_SCHEMA)
_PARAMETER_VALIDATOR = Draft7Validator(PARAMETER_SCHEMA)
_TERM_VALIDATORS = {kind: Draft7Validator(schema) for kind, schema in TERM_SCHEMAS.items()}


# ==================================================
# PATHS AND DECODING
# ==================================================

def _json_path(base: str, parts) -> str:
    path = base
    for part in parts:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def _check_schema(validator: Draft7Validator, document: Any, base: str) -> None:
    error = best_match(validator.iter_errors(document))
    if error is not None:
        raise ParseError(f"{_json_path(base, error.absolute_path)}: {error.message}")


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _decode_matrix(rows: List[List[List[float]]], path: str, shape=None) -> np.ndarray:
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ParseError(f"{path}: rows have different lengths")
    matrix = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex).reshape(len(rows), width)
    if shape is not None and matrix.shape != shape:
        raise ParseError(f"{path}: expected a {shape[0]}x{shape[1]} matrix, got {matrix.shape[0]}x{matrix.shape[1]}")
    if not np.all(np.isfinite(matrix)):
        raise ParseError(f"{path}: non-finite entry")
    return matrix


def _decode_scalar(record: Dict[str, Any], key: str, path: str) -> float:
    value = float(record[key])
    if not math.isfinite(value):
        raise ParseError(f"{path}.{key}: non-finite value")
    return value


def _encode_matrix(matrix: np.ndarray) -> List[List[List[float]]]:
    return [[[float(entry.real), float(entry.imag)] for entry in row] for row in np.asarray(matrix, dtype=complex)]


def _plain(value: float) -> Union[int, float]:
    return int(value) if float(value).is_integer() else float(value)


def matrix_to_text(matrix: np.ndarray) -> str:
    """Compact document notation, integer-valued parts printed as integers."""
    rows = [[[_plain(entry.real), _plain(entry.imag)] for entry in row] for row in np.asarray(matrix, dtype=complex)]
    return json.dumps(rows, separators=(",", ":"))


# ==================================================
# MODELS
# ==================================================

def _decode_term(record: Dict[str, Any], index: int, dim: int, base: str):
    path = f"{base}.terms[{index}]"
    _check_schema(_TERM_VALIDATORS[record["kind"]], record, path)
    square = (dim, dim)
    kind = record["kind"]
    if kind == "constant":
        return ConstantTerm(_decode_matrix(record["C"], f"{path}.C", square))
    if kind == "affine":
        return AffineTerm(
            _decode_matrix(record["A"], f"{path}.A", square),
            _decode_matrix(record["B"], f"{path}.B", square),
        )
    if kind == "pole":
        return PoleTerm(_decode_scalar(record, "t", path), _decode_matrix(record["G"], f"{path}.G", square))
    if kind == "acbox":
        return AcBoxTerm(
            _decode_scalar(record, "a", path),
            _decode_scalar(record, "b", path),
            _decode_matrix(record["R"], f"{path}.R", square),
        )
    return SqrtTerm(_decode_matrix(record["G"], f"{path}.G", square))


def model_from_document(document: Any, base: str = "$") -> NevanlinnaModel:
    """Build and validate a model from an already decoded JSON object."""
    _check_schema(_MODEL_VALIDATOR, document, base)
    dim = int(document["dim"])
    terms = tuple(_decode_term(record, index, dim, base) for index, record in enumerate(document["terms"]))
    model = NevanlinnaModel(dim=dim, terms=terms, name=document["name"])

    violations = validate(model)
    if violations:
        raise ValidationError(f"model '{model.name}': " + "; ".join(violations))
    logger.debug(f"parsed model '{model.name}' (dim {dim}, {len(terms)} terms)")
    return model


def parse_model(text: str) -> NevanlinnaModel:
    """
    Parse a model document.

    Raises:
        ParseError: malformed JSON, schema violation or size mismatch
        ValidationError: a term invariant or the Nevanlinna property fails
    """
    return model_from_document(_load_json(text))


_TERM_FIELDS = {
    "constant": ("C",),
    "affine": ("A", "B"),
    "pole": ("t", "G"),
    "acbox": ("a", "b", "R"),
    "sqrt": ("G",),
}


def model_to_document(model: NevanlinnaModel) -> Dict[str, Any]:
    terms = []
    for term in model.terms:
        record: Dict[str, Any] = {"kind": term.kind}
        for name in _TERM_FIELDS[term.kind]:
            value = getattr(term, name)
            record[name] = float(value) if isinstance(value, float) else _encode_matrix(value)
        terms.append(record)
    return {
        "schema_version": SCHEMA_VERSION,
        "name": model.name,
        "dim": model.dim,
        "terms": terms,
    }


def serialize_model(model: NevanlinnaModel) -> str:
    """Canonical document text; parse_model inverts it."""
    return json.dumps(model_to_document(model), indent=2, ensure_ascii=False) + "\n"


# ==================================================
# PARAMETERS
# ==================================================

def _parse_theta(body: Dict[str, Any], dim: int) -> SelfAdjointParameter:
    if body["op_basis"] == "full":
        basis = np.eye(dim, dtype=complex)
    else:
        basis = _decode_matrix(body["op_basis"], "$.theta.op_basis")
        if basis.shape[0] != dim:
            raise ValidationError(f"$.theta.op_basis: {basis.shape[0]} rows, model dim is {dim}")
    rank = basis.shape[1]
    theta_op = _decode_matrix(body["theta_op"], "$.theta.theta_op")
    if theta_op.shape != (rank, rank):
        raise ValidationError(f"$.theta.theta_op: expected {rank}x{rank} for an operator part of rank {rank}")
    parameter = SelfAdjointParameter(dim, basis, theta_op)
    violations = parameter.violations(PARAMETER_TOL)
    if violations:
        raise ValidationError("theta: " + "; ".join(violations))
    return parameter


def _parse_dissipative(body: Dict[str, Any], dim: int) -> DissipativeParameter:
    matrix = _decode_matrix(body["D"], "$.dissipative.D")
    if matrix.shape != (dim, dim):
        raise ValidationError(f"$.dissipative.D: expected {dim}x{dim}, got {matrix.shape[0]}x{matrix.shape[1]}")
    scale = max(1.0, float(np.linalg.norm(matrix, 2)))
    largest = float(np.linalg.eigvalsh(imag_part(matrix)).max())
    if largest > PARAMETER_TOL * scale:
        raise ValidationError(f"dissipative: Im D ⪯ 0 fails (largest eigenvalue {largest:.3e})")
    return DissipativeParameter.from_matrix(matrix)


def parse_parameter(
    text: str,
    model: NevanlinnaModel,
) -> Union[SelfAdjointParameter, DissipativeParameter, CoupledSystem]:
    """
    Parse a parameter document against the model it will be paired with.

    Returns:
        SelfAdjointParameter for theta / relation, DissipativeParameter,
        or CoupledSystem(model, model_g) for coupled documents
    """
    document = _load_json(text)
    _check_schema(_PARAMETER_VALIDATOR, document, "$")
    kind, body = next(iter(document.items()))

    if kind == PARAM_THETA:
        return _parse_theta(body, model.dim)
    if kind == PARAM_RELATION:
        return SelfAdjointParameter.relation(model.dim)
    if kind == PARAM_DISSIPATIVE:
        return _parse_dissipative(body, model.dim)

    model_g = model_from_document(body["model_g"], "$.coupled.model_g")
    if model_g.dim != model.dim:
        raise ValidationError(f"$.coupled.model_g: dim {model_g.dim} differs from model dim {model.dim}")
    return CoupledSystem(model, model_g)


def parameter_kind(text: str) -> str:
    """Top-level key of a parameter document, checked against the schema."""
    document = _load_json(text)
    _check_schema(_PARAMETER_VALIDATOR, document, "$")
    return next(iter(document))
