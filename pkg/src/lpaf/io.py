"""JSON documents for systems, group systems and elements.

System document::

    {"p": 1.5,
     "levels": [[2], [4], [8]],
     "maps": [{"mult": [[2]]},
              {"mult": [[2]], "order": [[1, 1]],
               "similarity": [{"perm": [2, 1, ...], "phases": [[1, 0], ...]}]}]}

``mult`` is indexed ``[target][source]`` and must hold literal integers.
``order`` lists 1-based source summands per target summand in the actual
block order; ``perm`` is the 1-based image of each column.  A document
without ``p`` is a group system.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import AlgebraIsometry, ComplexPermutation, SsfdAlgebra
from .bratteli import AlgebraDirectSystem, GroupDirectSystem
from .errors import LpafError
from .homs import SpatialHom, from_order
from .ktheory import PositiveContractiveMap, ScaledZGroup


class FormatError(LpafError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def _int(v, where: str, positive: bool = False) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(where, f"expected an integer, got {v!r}")
    if v < (1 if positive else 0):
        raise FormatError(where, f"expected a {'positive' if positive else 'nonnegative'} integer, got {v}")
    return v


def _list(v, where: str) -> list:
    if not isinstance(v, list):
        raise FormatError(where, f"expected an array, got {type(v).__name__}")
    return v


def _complex(v, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise FormatError(where, f"expected a number or [re, im], got {v!r}")


def parse_matrix(v, where: str) -> np.ndarray:
    rows = _list(v, where)
    out = [[_complex(x, f"{where}[{i}][{j}]") for j, x in enumerate(_list(r, f"{where}[{i}]"))]
           for i, r in enumerate(rows)]
    if out and len({len(r) for r in out}) != 1:
        raise FormatError(where, "ragged matrix")
    return np.array(out, dtype=np.complex128).reshape(len(out), len(out[0]) if out else 0)


def _levels(doc: dict) -> list[list[int]]:
    levels = _list(doc.get("levels"), "levels")
    return [[_int(d, f"levels[{i}][{j}]", positive=True) for j, d in enumerate(_list(lvl, f"levels[{i}]"))]
            for i, lvl in enumerate(levels)]


def _mult(entry: dict, where: str, rows: int, cols: int) -> np.ndarray:
    raw = _list(entry.get("mult"), f"{where}.mult")
    if len(raw) != rows:
        raise FormatError(f"{where}.mult", f"expected {rows} rows, got {len(raw)}")
    m = []
    for k, row in enumerate(raw):
        row = _list(row, f"{where}.mult[{k}]")
        if len(row) != cols:
            raise FormatError(f"{where}.mult[{k}]", f"expected {cols} entries, got {len(row)}")
        m.append([_int(x, f"{where}.mult[{k}][{j}]") for j, x in enumerate(row)])
    return np.array(m, dtype=np.int64).reshape(rows, cols)


def _similarity(raw, where: str, target: SsfdAlgebra) -> AlgebraIsometry:
    raw = _list(raw, where)
    if len(raw) != len(target):
        raise FormatError(where, f"expected {len(target)} entries, got {len(raw)}")
    perms = []
    for k, item in enumerate(raw):
        w = f"{where}[{k}]"
        if not isinstance(item, dict):
            raise FormatError(w, "expected an object with perm and phases")
        perm = [_int(i, f"{w}.perm[{t}]", positive=True) - 1 for t, i in enumerate(_list(item.get("perm"), f"{w}.perm"))]
        phases = item.get("phases")
        phases = [1.0] * len(perm) if phases is None else [
            _complex(z, f"{w}.phases[{t}]") for t, z in enumerate(_list(phases, f"{w}.phases"))]
        if len(perm) != target.summands[k]:
            raise FormatError(f"{w}.perm", f"expected length {target.summands[k]}")
        try:
            perms.append(ComplexPermutation(tuple(perm), tuple(phases)))
        except LpafError as exc:
            raise FormatError(w, str(exc)) from None
    return AlgebraIsometry(tuple(perms))


def _guard(where: str, fn):
    try:
        return fn()
    except FormatError:
        raise
    except (LpafError, ValueError) as exc:
        raise FormatError(where, str(exc)) from None


def system_from_dict(doc: Any) -> AlgebraDirectSystem:
    if not isinstance(doc, dict):
        raise FormatError("$", "expected an object")
    if "p" not in doc:
        raise FormatError("p", "missing exponent (is this a group system?)")
    p = doc["p"]
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not (1 <= p < float("inf")):
        raise FormatError("p", f"expected a real number >= 1, got {p!r}")
    levels = [_guard(f"levels[{i}]", lambda s=s: SsfdAlgebra(p, s)) for i, s in enumerate(_levels(doc))]
    maps_raw = _list(doc.get("maps", []), "maps")
    if levels and len(maps_raw) != len(levels) - 1:
        raise FormatError("maps", f"{len(levels)} levels need {len(levels) - 1} maps, got {len(maps_raw)}")
    maps = []
    for i, entry in enumerate(maps_raw):
        where = f"maps[{i}]"
        if not isinstance(entry, dict):
            raise FormatError(where, "expected an object")
        src, tgt = levels[i], levels[i + 1]
        m = _mult(entry, where, len(tgt), len(src))
        sim = None
        if entry.get("similarity") is not None:
            sim = _similarity(entry["similarity"], f"{where}.similarity", tgt)
        if entry.get("order") is not None:
            order_raw = _list(entry["order"], f"{where}.order")
            if len(order_raw) != len(tgt):
                raise FormatError(f"{where}.order", f"expected {len(tgt)} lists")
            order = []
            for k, r in enumerate(order_raw):
                r = [_int(j, f"{where}.order[{k}][{t}]", positive=True) - 1
                     for t, j in enumerate(_list(r, f"{where}.order[{k}]"))]
                counts = np.bincount(np.array(r, dtype=np.int64), minlength=len(src)) if r else np.zeros(len(src), dtype=np.int64)
                if len(counts) != len(src) or not np.array_equal(counts, m[k]):
                    raise FormatError(f"{where}.order[{k}]", "block order disagrees with mult")
                order.append(r)
        else:
            order = [[j for j in range(len(src)) for _ in range(int(m[k, j]))] for k in range(len(tgt))]
        maps.append(_guard(where, lambda: from_order(src, tgt, order, sim)))
    return _guard("$", lambda: AlgebraDirectSystem(p, levels, maps))


def group_system_from_dict(doc: Any) -> GroupDirectSystem:
    if not isinstance(doc, dict):
        raise FormatError("$", "expected an object")
    levels = [_guard(f"levels[{i}]", lambda s=s: ScaledZGroup(s)) for i, s in enumerate(_levels(doc))]
    maps_raw = _list(doc.get("maps", []), "maps")
    if levels and len(maps_raw) != len(levels) - 1:
        raise FormatError("maps", f"{len(levels)} levels need {len(levels) - 1} maps, got {len(maps_raw)}")
    maps = []
    for i, entry in enumerate(maps_raw):
        where = f"maps[{i}]"
        if not isinstance(entry, dict):
            raise FormatError(where, "expected an object")
        m = _mult(entry, where, levels[i + 1].rank, levels[i].rank)
        maps.append(_guard(where, lambda: PositiveContractiveMap(levels[i], levels[i + 1], m)))
    return GroupDirectSystem(levels, maps)


def spatial_hom_to_json(h: SpatialHom) -> dict:
    out: dict = {"mult": h.multiplicity().tolist()}
    if not h.similarity.is_identity():
        out["similarity"] = [s.to_json() for s in h.similarity.perms]
    return out


def system_to_dict(s: AlgebraDirectSystem) -> dict:
    return {
        "p": s.p.p,
        "levels": [list(a.summands) for a in s.levels],
        "maps": [spatial_hom_to_json(h) for h in s.maps],
    }


def load_document(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    except OSError as exc:
        raise FormatError(str(path), exc.strerror or str(exc)) from None


def load_system(path: str | Path) -> AlgebraDirectSystem:
    return system_from_dict(load_document(path))


def load_group_system(path: str | Path) -> GroupDirectSystem:
    return group_system_from_dict(load_document(path))


def element_from_dict(doc: Any, algebra: SsfdAlgebra, n: int = 1) -> list[np.ndarray]:
    """Blocks of an element of ``M_n(A)`` from ``{"blocks": [...]}`` or a bare list."""
    raw = doc.get("blocks") if isinstance(doc, dict) else doc
    raw = _list(raw, "blocks")
    if len(raw) != len(algebra):
        raise FormatError("blocks", f"expected {len(algebra)} blocks, got {len(raw)}")
    blocks = []
    for k, (b, d) in enumerate(zip(raw, algebra.summands)):
        mat = parse_matrix(b, f"blocks[{k}]")
        if mat.shape != (n * d, n * d):
            raise FormatError(f"blocks[{k}]", f"expected shape {(n * d, n * d)}, got {mat.shape}")
        blocks.append(mat)
    return blocks


def dumps(doc: Any) -> str:
    """Deterministic serialisation used for every report."""
    return json.dumps(doc, sort_keys=True, indent=2, default=_default)


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")
