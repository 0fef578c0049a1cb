"""JSON interchange: pencils, subspaces, reduced pencils, reports.

Rationals are written as strings ``"p/q"`` (or ``"n"`` for integers) so that
files round-trip exactly.  All output goes through :func:`dumps`, which sorts
keys, making reports byte-for-byte reproducible.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import ParseError
from .exact import format_rat, rat
from .pencil import LinearSubspace, QuadricPencil, ReducedPencil


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load(source) -> tuple[dict, bytes]:
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            data = Path(source).read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from exc
    elif isinstance(source, bytes):
        data = source
    elif isinstance(source, dict):
        return source, dumps(source).encode()
    else:
        data = str(source).encode()
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object")
    return obj, data


def _matrix(obj, name: str, size: int | None = None):
    if not isinstance(obj, list) or not obj or not all(isinstance(row, list) for row in obj):
        raise ParseError(f"{name} must be a non-empty list of rows")
    if size is not None and len(obj) != size:
        raise ParseError(f"{name} has {len(obj)} rows, expected {size}")
    width = len(obj[0])
    if any(len(row) != width for row in obj):
        raise ParseError(f"{name} rows have different lengths")
    return [[rat(v) for v in row] for row in obj]


def pencil_from_json(obj: dict) -> QuadricPencil:
    try:
        N = obj["N"]
        q0, q1 = obj["q0"], obj["q1"]
    except KeyError as exc:
        raise ParseError(f"pencil is missing field {exc}") from exc
    if not isinstance(N, int) or isinstance(N, bool):
        raise ParseError("N must be an integer")
    m0 = _matrix(q0, "q0", N + 1)
    m1 = _matrix(q1, "q1", N + 1)
    if any(len(row) != N + 1 for row in m0 + m1):
        raise ParseError(f"matrices must be {N + 1} x {N + 1}")
    return QuadricPencil.from_rows(m0, m1)


def pencil_to_json(p: QuadricPencil) -> dict:
    return {
        "N": p.N,
        "q0": [[format_rat(v) for v in row] for row in p.q0.entries],
        "q1": [[format_rat(v) for v in row] for row in p.q1.entries],
    }


def subspace_from_json(obj: dict) -> LinearSubspace:
    try:
        r, basis = obj["r"], obj["basis"]
    except KeyError as exc:
        raise ParseError(f"subspace is missing field {exc}") from exc
    rows = _matrix(basis, "basis", r + 1 if isinstance(r, int) else None)
    return LinearSubspace(tuple(tuple(row) for row in rows))


def subspace_to_json(ell: LinearSubspace) -> dict:
    return {"r": ell.r, "basis": [[format_rat(v) for v in row] for row in ell.basis]}


def reduced_to_json(rp: ReducedPencil) -> dict:
    return {
        "r": rp.r,
        "N": rp.N,
        "variables": rp.variables,
        "equations": [[[list(mono), format_rat(c)] for mono, c in eq] for eq in rp.equations],
    }


def load_pencil(source) -> tuple[QuadricPencil, str]:
    """Parse a pencil file (path, bytes or JSON text); also return the input hash."""
    obj, data = _load(source)
    return pencil_from_json(obj), sha256_bytes(data)


def load_subspace(source) -> LinearSubspace:
    obj, _ = _load(source)
    return subspace_from_json(obj)
