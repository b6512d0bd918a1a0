"""JSON documents for functions, coatings and continued-fraction coefficients.

Complex entries are written as ``[re, im]`` pairs. Python's ``repr`` of a
float is the shortest string that reads back to the same double, so a
write-then-read cycle is exact.
"""
import json
import math

import numpy as np

from .composites import CoatingSpec
from .core import PoleResidueForm
from .errors import DocumentError

SCHEMA_VERSION = "1"

__all__ = [
    "SCHEMA_VERSION", "encode_matrix", "decode_matrix", "function_to_document",
    "document_to_function", "coating_to_document", "document_to_coating",
    "laminate_to_document", "j_fraction_to_document", "s_fraction_to_document",
    "parse_document", "load_document", "dumps",
]


def _encode_entry(x):
    x = complex(x)
    return [x.real, x.imag]


def encode_matrix(m):
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[_encode_entry(x) for x in row] for row in m]


def _decode_real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(path, f"expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise DocumentError(path, "number is not finite")
    return value


def _decode_entry(value, path):
    if isinstance(value, list):
        if len(value) != 2:
            raise DocumentError(path, "complex entry must be [re, im]")
        return complex(_decode_real(value[0], f"{path}[0]"),
                       _decode_real(value[1], f"{path}[1]"))
    return complex(_decode_real(value, path))


def decode_matrix(value, n, path):
    """Read an ``n x n`` matrix; a bare number is accepted when ``n == 1``."""
    if n == 1 and not isinstance(value, list):
        return np.array([[_decode_entry(value, path)]])
    if not isinstance(value, list) or len(value) != n:
        raise DocumentError(path, f"expected a list of {n} rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"{path}[{i}]", f"expected a row of {n} entries")
        rows.append([_decode_entry(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows, dtype=complex)


def _field(doc, key, path=""):
    if key not in doc:
        raise DocumentError(f"{path}{key}", "missing field")
    return doc[key]


def _check_version(doc):
    version = _field(doc, "schema_version")
    if version != SCHEMA_VERSION:
        raise DocumentError("schema_version", f"unsupported version {version!r}")


def function_to_document(f):
    return {
        "schema_version": SCHEMA_VERSION,
        "n": f.n,
        "A": encode_matrix(f.A),
        "B": encode_matrix(f.B),
        "poles": [{"lambda": lam, "C": encode_matrix(c)} for lam, c in f.poles],
    }


def document_to_function(doc):
    """Parse a function document into a :class:`PoleResidueForm`."""
    if not isinstance(doc, dict):
        raise DocumentError("", "document must be a JSON object")
    _check_version(doc)
    n = _field(doc, "n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DocumentError("n", "must be a positive integer")
    a = decode_matrix(_field(doc, "A"), n, "A")
    b = decode_matrix(_field(doc, "B"), n, "B")
    raw = _field(doc, "poles")
    if not isinstance(raw, list):
        raise DocumentError("poles", "expected a list")
    poles = []
    for j, item in enumerate(raw):
        path = f"poles[{j}]"
        if not isinstance(item, dict):
            raise DocumentError(path, "expected an object")
        lam = _decode_real(_field(item, "lambda", f"{path}."), f"{path}.lambda")
        if lam <= 0:
            raise DocumentError(f"{path}.lambda", "pole location must be > 0")
        poles.append((lam, decode_matrix(_field(item, "C", f"{path}."), n, f"{path}.C")))
    return PoleResidueForm(a, b, poles)


def coating_to_document(spec):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "coating",
        "dimension": spec.dimension,
        "fractions": list(spec.fractions),
        "core_phase": spec.core_phase,
    }


def document_to_coating(doc):
    _check_version(doc)
    dim = _field(doc, "dimension")
    if dim not in (2, 3) or isinstance(dim, bool):
        raise DocumentError("dimension", "must be 2 or 3")
    raw = _field(doc, "fractions")
    if not isinstance(raw, list):
        raise DocumentError("fractions", "expected a list")
    fractions = []
    for i, c in enumerate(raw):
        c = _decode_real(c, f"fractions[{i}]")
        if not 0.0 < c < 1.0:
            raise DocumentError(f"fractions[{i}]", "must lie in (0, 1)")
        fractions.append(c)
    core = doc.get("core_phase")
    if core not in (None, 1, 2) or isinstance(core, bool):
        raise DocumentError("core_phase", "must be null, 1 or 2")
    return CoatingSpec(dim, tuple(fractions), core)


def laminate_to_document(spec):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "laminate",
        "weights": list(spec.weights),
        "proportions": list(spec.proportions),
        "normalized": spec.normalized,
    }


def j_fraction_to_document(jf):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": f"jfraction-{jf.kind}",
        "n": jf.n,
        "levels": [{"const": encode_matrix(a), "linear": encode_matrix(b)}
                   for a, b in jf.levels],
    }


def s_fraction_to_document(s):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "sfraction",
        "head": None if s.head is None else list(s.head),
        "c": list(s.c),
    }


def parse_document(doc):
    """Dispatch on ``kind``: ``coating`` documents give a :class:`CoatingSpec`,
    anything else is read as a function document."""
    if isinstance(doc, dict) and doc.get("kind") == "coating":
        return document_to_coating(doc)
    if isinstance(doc, dict) and doc.get("kind") not in (None, "function"):
        raise DocumentError("kind", f"unsupported document kind {doc.get('kind')!r}")
    return document_to_function(doc)


def load_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError("", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise DocumentError("", f"cannot read {path}: {exc.strerror}") from exc
    return parse_document(doc)


def dumps(doc):
    """Deterministic JSON text (sorted keys, fixed indentation)."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"

