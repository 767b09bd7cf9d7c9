"""JSON schemas for every report the command line emits (schema version 1)."""

from __future__ import annotations

_NUM = {"oneOf": [{"type": "number"}, {"type": "string", "enum": ["inf", "-inf", "nan"]}]}
_NUM_OR_NULL = {"oneOf": [_NUM, {"type": "null"}]}

VERIFIER = {
    "type": "object",
    "required": ["schema", "name", "params", "per_radius", "pass", "status"],
    "properties": {
        "schema": {"const": 1},
        "name": {"type": "string"},
        "params": {"type": "object"},
        "status": {"enum": ["PASS", "FAIL", "NOT_APPLICABLE"]},
        "pass": {"type": ["boolean", "null"]},
        "per_radius": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["r", "lhs", "rhs", "margin"],
                "properties": {k: _NUM for k in ("r", "lhs", "rhs", "margin")},
            },
        },
    },
}

PROFILE = {
    "type": "object",
    "required": ["schema", "target", "rows"],
    "properties": {
        "schema": {"const": 1},
        "target": {"type": "string"},
        "quadrature_nodes": {"type": "integer"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["r", "m", "N", "T"],
                "properties": {k: _NUM for k in ("r", "m", "N", "T")},
            },
        },
    },
}

ZEROS = {
    "type": "object",
    "required": ["schema", "radius", "zeros", "total"],
    "properties": {
        "schema": {"const": 1},
        "radius": _NUM,
        "total": {"type": "integer", "minimum": 0},
        "zeros": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["re", "im", "mult", "cert_radius"],
                "properties": {"mult": {"type": "integer", "minimum": 1}},
            },
        },
    },
}

CERTIFICATE = {
    "type": "object",
    "required": ["schema", "radius", "verdict", "witnesses"],
    "properties": {
        "schema": {"const": 1},
        "verdict": {"enum": ["EntireUpTo", "NotEntire"]},
        "witnesses": {
            "type": "array",
            "items": {"type": "object", "required": ["re", "im", "mult_G", "mult_F"]},
        },
    },
}

QUOTIENT = {
    "type": "object",
    "required": ["schema", "verdict", "certificate", "relation"],
    "properties": {
        "schema": {"const": 1},
        "verdict": {"enum": ["CONSISTENT", "CANDIDATE-COUNTEREXAMPLE"]},
        "certificate": CERTIFICATE,
        "relation": {
            "type": ["object", "null"],
            "required": ["values", "relation", "mode", "residual"],
            "properties": {
                "relation": {"type": ["array", "null"], "items": {"type": "integer"}},
                "mode": {"enum": ["Exact", "Heuristic"]},
            },
        },
    },
}

BOUNDS = {
    "type": "object",
    "required": ["schema", "l", "m", "s", "t", "a", "M", "N1", "N2", "N", "Q", "n1", "eps_max", "n0", "valid"],
    "properties": {
        "schema": {"const": 1},
        **{k: {"type": "integer", "minimum": 0} for k in ("l", "m", "s", "t", "M", "N1", "N2", "N", "Q", "n1")},
        "eps_max": _NUM,
        "n0": _NUM_OR_NULL,
        "valid": {"type": "boolean"},
    },
}

AUX_MAP = {
    "type": "object",
    "required": ["schema", "M", "N", "N1", "N2", "identity_holds", "general_position", "diagonal"],
    "properties": {
        "schema": {"const": 1},
        "identity_holds": {"type": "boolean"},
        "general_position": {"type": "boolean"},
        "diagonal": {"type": "array", "items": {"type": "string"}},
    },
}

ERROR = {
    "type": "object",
    "required": ["error", "detail"],
    "properties": {"error": {"type": "string"}, "detail": {"type": "string"}},
}

BY_COMMAND = {
    "analyze": PROFILE,
    "zeros": ZEROS,
    "quotient": QUOTIENT,
    "verify-jensen": VERIFIER,
    "verify-fmt": VERIFIER,
    "verify-smt": VERIFIER,
    "verify-moving-smt": VERIFIER,
    "verify-borel": VERIFIER,
    "bounds": BOUNDS,
    "aux-map": AUX_MAP,
}
