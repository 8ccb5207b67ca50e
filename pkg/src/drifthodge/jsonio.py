"""JSON wire formats shared by every module and the CLI.

Matrix:       {"rows": r, "cols": c, "data": [[row...], ...]}
Polynomial:   {"dim": d, "terms": [{"exps": [i1,...,id], "coeff": c}, ...]}
Vector field: {"dim": d, "components": [Polynomial, ...]}
Poly matrix:  {"dim": d, "entries": [[Polynomial, ...], ...]}

Serialization emits every number with 17 significant digits so parsed
values round-trip bit-exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import PreconditionError
from .polyfield import Polynomial, PolyMatrix, PolyVectorField


def matrix_to_json(m):
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]),
            "data": [[float(v) for v in row] for row in a]}


def matrix_from_json(obj, name="matrix"):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (TypeError, KeyError) as exc:
        raise PreconditionError(f"{name}: expected a Matrix object with rows/cols/data") from exc
    if rows < 1 or cols < 1:
        raise PreconditionError(f"{name}: rows and cols must be positive")
    a = np.asarray(data, dtype=float)
    if a.shape != (rows, cols):
        raise PreconditionError(
            f"{name}: data shape {a.shape} does not match rows/cols ({rows}, {cols})"
        )
    return a


def vector_from_json(obj, name="vector"):
    if isinstance(obj, list):
        return np.asarray(obj, dtype=float).reshape(-1)
    a = matrix_from_json(obj, name)
    return a.reshape(-1)


def polynomial_to_json(p):
    return {
        "dim": p.dim,
        "terms": [
            {"exps": list(e), "coeff": float(c)} for e, c in p.sorted_terms()
        ],
    }


def polynomial_from_json(obj, name="polynomial"):
    try:
        dim = int(obj["dim"])
        raw = obj["terms"]
        terms = {tuple(int(i) for i in t["exps"]): float(t["coeff"]) for t in raw}
    except (TypeError, KeyError) as exc:
        raise PreconditionError(f"{name}: expected a Polynomial object with dim/terms") from exc
    return Polynomial(dim, terms)


def field_to_json(f):
    return {"dim": f.dim, "components": [polynomial_to_json(p) for p in f.components]}


def field_from_json(obj, name="vector field"):
    try:
        comps = [polynomial_from_json(c, name) for c in obj["components"]]
    except (TypeError, KeyError) as exc:
        raise PreconditionError(f"{name}: expected a vector-field object with components") from exc
    return PolyVectorField(comps)


def polymatrix_to_json(c):
    return {"dim": c.dim,
            "entries": [[polynomial_to_json(p) for p in row] for row in c.entries]}


def polymatrix_from_json(obj, name="polynomial matrix"):
    try:
        entries = [[polynomial_from_json(p, name) for p in row] for row in obj["entries"]]
    except (TypeError, KeyError) as exc:
        raise PreconditionError(f"{name}: expected a matrix-of-polynomials object") from exc
    return PolyMatrix(entries)


def drift_from_json(obj, name="drift"):
    """Accept either a Matrix (read as the linear field x -> Gx) or a
    polynomial vector field."""
    if isinstance(obj, dict) and "components" in obj:
        return field_from_json(obj, name)
    if isinstance(obj, dict) and "rows" in obj:
        g = matrix_from_json(obj, name)
        if g.shape[0] != g.shape[1]:
            raise PreconditionError(f"{name}: linear drift matrix must be square")
        return PolyVectorField.linear(g)
    raise PreconditionError(f"{name}: expected a Matrix or vector-field JSON object")


def load_json(path, name):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise PreconditionError(f"{name}: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{name}: {path} is not valid JSON: {exc}") from exc


def dumps_17g(obj, indent=2):
    """JSON text with every float rendered at 17 significant digits."""
    return "".join(_emit(obj, indent, 0)) + "\n"


def _emit(obj, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        yield "null"
    elif obj is True:
        yield "true"
    elif obj is False:
        yield "false"
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not np.isfinite(v):
            raise PreconditionError("cannot serialize non-finite numbers")
        yield format(v, ".17g")
    elif isinstance(obj, str):
        yield json.dumps(obj)
    elif isinstance(obj, np.ndarray):
        yield from _emit(obj.tolist(), indent, level)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            yield "[]"
            return
        yield "[\n"
        for i, item in enumerate(obj):
            yield pad_in
            yield from _emit(item, indent, level + 1)
            yield ",\n" if i + 1 < len(obj) else "\n"
        yield pad + "]"
    elif isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        yield "{\n"
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            yield pad_in + json.dumps(str(k)) + ": "
            yield from _emit(v, indent, level + 1)
            yield ",\n" if i + 1 < len(items) else "\n"
        yield pad + "}"
    else:
        raise PreconditionError(f"cannot serialize object of type {type(obj).__name__}")
