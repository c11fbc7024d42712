"""Canonical JSON documents for modules, gauges, families and log modules.

Emission is ``json.dumps(doc, sort_keys=True, indent=2)`` plus a newline, so
parse followed by emit reproduces canonical input byte for byte.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import FormatError, FieldError, ModuleError, PolyError, StratError
from .gf import FieldSpec
from .horizon import FamilySpec, TrivializationCertificate
from .poly import Poly, PolyRing
from .stratmod import GaugeMatrix, StratifiedModule


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc


def _require(doc, key, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field {key!r}")
    value = doc[key]
    if kind is not None and (not isinstance(value, kind) or isinstance(value, bool) and kind is int):
        raise FormatError(f"field {key!r} has the wrong type")
    return value


def field_from_json(doc) -> FieldSpec:
    try:
        return FieldSpec.from_json(doc)
    except FieldError as exc:
        raise FormatError(f"bad field: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad field document: {exc!r}") from exc


def _matrix_to_json(mat) -> list:
    return [[f.to_json() for f in row] for row in mat]


def _matrix_from_json(ring: PolyRing, rows, rank: int) -> tuple:
    if not isinstance(rows, list) or len(rows) != rank:
        raise FormatError(f"expected {rank} rows")
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != rank:
            raise FormatError(f"expected {rank} entries per row")
        out.append(tuple(Poly.from_json(ring, f) for f in row))
    return tuple(out)


def _vars_to_json(ring: PolyRing, base_vars) -> list:
    return [{"name": v, "role": "base" if v in base_vars else "fiber", "laurent": lf}
            for v, lf in zip(ring.vars, ring.laurent)]


def _vars_from_json(field: FieldSpec, vlist):
    if not isinstance(vlist, list):
        raise FormatError("vars must be a list")
    names, flags, base, fiber = [], [], [], []
    for v in vlist:
        name = _require(v, "name", str)
        role = _require(v, "role", str)
        laurent = _require(v, "laurent", bool)
        if role not in ("base", "fiber"):
            raise FormatError(f"unknown role {role!r}")
        names.append(name)
        flags.append(laurent)
        (base if role == "base" else fiber).append(name)
    try:
        ring = PolyRing(field, names, flags)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return ring, base, fiber


def module_to_json(M: StratifiedModule) -> dict:
    doc = {
        "field": M.spec.to_json(),
        "vars": _vars_to_json(M.ring, M.base_vars),
        "rank": M.rank,
        "matrices": [{"var": v, "order": k, "rows": _matrix_to_json(A)}
                     for (v, k), A in sorted(M.support.items())],
    }
    if M.valid_up_to is not None:
        doc["valid_up_to"] = M.valid_up_to
    return doc


def module_from_json(doc) -> StratifiedModule:
    field = field_from_json(_require(doc, "field", dict))
    ring, base, fiber = _vars_from_json(field, _require(doc, "vars", list))
    rank = _require(doc, "rank", int)
    if rank < 1:
        raise FormatError("rank must be >= 1")
    support = {}
    for entry in _require(doc, "matrices", list):
        var = _require(entry, "var", str)
        order = _require(entry, "order", int)
        if (var, order) in support:
            raise FormatError(f"matrix {(var, order)} given twice")
        support[(var, order)] = _matrix_from_json(ring, _require(entry, "rows", list), rank)
    valid = doc.get("valid_up_to")
    if valid is not None and (not isinstance(valid, int) or isinstance(valid, bool)):
        raise FormatError("valid_up_to must be an integer")
    try:
        return StratifiedModule(ring, base, fiber, rank, support, valid_up_to=valid)
    except (ModuleError, PolyError) as exc:
        raise FormatError(str(exc)) from exc


def dump_module(M: StratifiedModule) -> str:
    return dumps(module_to_json(M))


def load_module(text: str) -> StratifiedModule:
    return module_from_json(loads(text))


def gauge_to_json(U: GaugeMatrix) -> dict:
    ring = U.matrix[0][0].ring
    return {
        "field": ring.spec.to_json(),
        "vars": [{"name": v, "laurent": lf} for v, lf in zip(ring.vars, ring.laurent)],
        "rows": _matrix_to_json(U.matrix),
    }


def certificate_to_json(cert: TrivializationCertificate) -> dict:
    return {
        "gauge": gauge_to_json(cert.gauge),
        "checked_order_bound": cert.checked_order_bound,
        "minimal_degree": cert.minimal_degree,
    }


def family_from_json(doc) -> FamilySpec:
    field = field_from_json(_require(doc, "field", dict))
    pts = _require(doc, "points", list)
    try:
        return FamilySpec.from_json({"field": field.to_json(), "points": pts})
    except StratError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad points: {exc}") from exc


def log_module_from_json(doc):
    from .exponents import LogModule

    field = field_from_json(_require(doc, "field", dict))
    rank = _require(doc, "rank", int)
    H = _require(doc, "H", int)
    B = _require(doc, "B", list)
    if len(B) != H + 1:
        raise FormatError(f"expected {H + 1} matrices in B")
    mats = []
    for b in B:
        if not isinstance(b, list) or len(b) != rank:
            raise FormatError(f"each B[h] must have {rank} rows")
        rows = []
        for row in b:
            if not isinstance(row, list) or len(row) != rank:
                raise FormatError(f"each row must have {rank} entries")
            rows.append([_element(field, d) for d in row])
        mats.append(rows)
    return LogModule(field, rank, H, mats)


def _element(field: FieldSpec, digits):
    if (not isinstance(digits, list) or len(digits) != field.m
            or any(not isinstance(d, int) or not 0 <= d < field.p for d in digits)):
        raise FormatError(f"bad element digits {digits!r}")
    return field(digits)
