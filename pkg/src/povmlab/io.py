"""JSON documents for matrices, measures, functions, POVMs and POVM families.

Complex numbers are ``[re, im]`` pairs.  Floats are written with Python's
shortest round-tripping repr (at most 17 significant digits), so a
save/load cycle reproduces every value exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .povm import POVM
from .sequential import IndexedPOVMFamily
from .spaces import BoundedFunction, FiniteMeasurableSpace, FiniteMeasure
from .tolerance import Tolerance


class FormatError(ValueError):
    """A document is unreadable or structurally malformed."""


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dump_json(doc: Any, path: str | Path | None = None) -> str:
    text = json.dumps(doc, indent=2, allow_nan=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def _require(doc: Any, *keys: str) -> None:
    if not isinstance(doc, dict):
        raise FormatError(f"expected an object with fields {keys}, got {type(doc).__name__}")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FormatError(f"missing field(s) {missing}")


def _complex_list(items: Any, what: str) -> np.ndarray:
    if not isinstance(items, list):
        raise FormatError(f"{what} must be a list of [re, im] pairs")
    out = np.empty(len(items), dtype=complex)
    for i, pair in enumerate(items):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        ):
            raise FormatError(f"{what}[{i}] is not an [re, im] pair of numbers")
        out[i] = complex(pair[0], pair[1])
    if not np.all(np.isfinite(out)):
        raise FormatError(f"{what} contains non-finite values")
    return out


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def _labels(items: Any, what: str) -> tuple[str, ...]:
    if not isinstance(items, list) or not all(isinstance(a, str) for a in items):
        raise FormatError(f"{what} must be a list of strings")
    return tuple(items)


def _space(items: Any, what: str = "atoms") -> FiniteMeasurableSpace:
    try:
        return FiniteMeasurableSpace(_labels(items, what))
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None


# matrices -----------------------------------------------------------------


def matrix_to_doc(A) -> dict:
    M = np.asarray(A, dtype=complex)
    if M.shape[0] == M.shape[1]:
        return {"dim": int(M.shape[0]), "entries": _pairs(M)}
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "entries": _pairs(M)}


def matrix_from_doc(doc: Any) -> np.ndarray:
    if isinstance(doc, dict) and "rows" in doc:
        _require(doc, "rows", "cols", "entries")
        rows, cols = doc["rows"], doc["cols"]
    else:
        _require(doc, "dim", "entries")
        rows = cols = doc["dim"]
    if not all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in (rows, cols)):
        raise FormatError("matrix dimensions must be positive integers")
    entries = _complex_list(doc["entries"], "entries")
    if entries.size != rows * cols:
        raise FormatError(f"{entries.size} entries for a {rows}x{cols} matrix")
    return entries.reshape(rows, cols)


# measures and functions ---------------------------------------------------


def measure_to_doc(mu: FiniteMeasure) -> dict:
    return {"atoms": list(mu.space.atoms), "mass": [float(m) for m in mu.mass]}


def measure_from_doc(doc: Any, space: FiniteMeasurableSpace | None = None) -> FiniteMeasure:
    """Parse a measure; inside a POVM document ``atoms`` may be omitted."""
    _require(doc, "mass")
    sp = _space(doc["atoms"]) if "atoms" in doc else space
    if sp is None:
        raise FormatError("measure document needs 'atoms'")
    if space is not None and sp != space:
        raise FormatError("measure atoms do not match the POVM atoms")
    mass = doc["mass"]
    if not isinstance(mass, list) or not all(isinstance(m, (int, float)) and not isinstance(m, bool) for m in mass):
        raise FormatError("mass must be a list of numbers")
    if len(mass) != len(sp):
        raise FormatError(f"{len(mass)} masses for {len(sp)} atoms")
    try:
        return FiniteMeasure(sp, np.array(mass, dtype=float))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def function_to_doc(f: BoundedFunction) -> dict:
    return {"atoms": list(f.space.atoms), "values": _pairs(f.values)}


def function_from_doc(doc: Any, cls=BoundedFunction, measure: FiniteMeasure | None = None):
    _require(doc, "atoms", "values")
    sp = _space(doc["atoms"])
    vals = _complex_list(doc["values"], "values")
    if vals.size != len(sp):
        raise FormatError(f"{vals.size} values for {len(sp)} atoms")
    return cls(sp, vals, measure)


# POVMs and families -------------------------------------------------------


def povm_to_doc(A: POVM, measure: FiniteMeasure | None = None) -> dict:
    doc = {
        "hilbert_dim": A.hilbert_dim,
        "atoms": list(A.space.atoms),
        "effects": [matrix_to_doc(E) for E in A.effects],
    }
    if measure is not None:
        doc["measure"] = {"mass": [float(m) for m in measure.mass]}
    return doc


def parse_povm_doc(doc: Any) -> tuple[FiniteMeasurableSpace, np.ndarray, FiniteMeasure | None]:
    """Structural parse only; the POVM invariants are not checked here."""
    _require(doc, "hilbert_dim", "atoms", "effects")
    d = doc["hilbert_dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError("hilbert_dim must be a positive integer")
    space = _space(doc["atoms"])
    effects = doc["effects"]
    if not isinstance(effects, list) or len(effects) != len(space):
        raise FormatError("effects must be a list parallel to atoms")
    mats = [matrix_from_doc(e) for e in effects]
    if any(M.shape != (d, d) for M in mats):
        raise FormatError(f"every effect must be {d}x{d}")
    measure = measure_from_doc(doc["measure"], space) if "measure" in doc else None
    return space, np.array(mats), measure


def povm_from_doc(doc: Any, tol: Tolerance | None = None) -> tuple[POVM, FiniteMeasure | None]:
    space, effects, measure = parse_povm_doc(doc)
    return POVM(space, effects, tol), measure


def family_to_doc(family: IndexedPOVMFamily) -> dict:
    return {"index_atoms": list(family.index.atoms), "povms": [povm_to_doc(B) for B in family.povms]}


def family_from_doc(doc: Any, tol: Tolerance | None = None) -> IndexedPOVMFamily:
    _require(doc, "index_atoms", "povms")
    index = _space(doc["index_atoms"], "index_atoms")
    povms = doc["povms"]
    if not isinstance(povms, list) or len(povms) != len(index):
        raise FormatError("povms must be a list parallel to index_atoms")
    return IndexedPOVMFamily(index, tuple(povm_from_doc(p, tol)[0] for p in povms))
