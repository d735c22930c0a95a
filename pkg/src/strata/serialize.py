"""JSON payloads: arrangements, sheaf models, frameworks, wedges and reports."""
from __future__ import annotations

import json
from fractions import Fraction
from functools import cmp_to_key
from pathlib import Path
from typing import Any

from .arrangement import Cell, HyperplaneArrangement, Stratification, enumerate_cells
from .intuitive import Framework, WedgeSet
from .linalg import RatMatrix, dot, kernel_basis, rat, rat_str
from .sheaf import LocalSystemSpec, SheafModel, constant_sheaf, local_system


class InputError(ValueError):
    """Malformed input; the message says where."""


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def parse_rational(value, where: str) -> Fraction:
    try:
        return rat(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: bad rational {value!r} ({exc})") from exc


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    return obj[key]


def arrangement_from_json(obj: dict, where: str = "$") -> HyperplaneArrangement:
    m = _require(obj, "m", where)
    if not isinstance(m, int) or isinstance(m, bool):
        raise InputError(f"{where}.m: expected an integer")
    normals = _require(obj, "normals", where)
    if not isinstance(normals, list):
        raise InputError(f"{where}.normals: expected a list")
    parsed = []
    for i, a in enumerate(normals):
        if not isinstance(a, list):
            raise InputError(f"{where}.normals[{i}]: expected a list")
        parsed.append(tuple(parse_rational(x, f"{where}.normals[{i}][{j}]") for j, x in enumerate(a)))
    try:
        return HyperplaneArrangement(m, tuple(parsed))
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def corrupt_pairs(obj: dict, strat: Stratification, where: str = "$") -> list[tuple[Cell, Cell]]:
    """Testing hook: incidences to flip, given as ``[face, coface]`` sign strings."""
    out = []
    for i, pair in enumerate(obj.get("corrupt_incidences", [])):
        try:
            a, b = pair
            out.append((strat.cell(a), strat.cell(b)))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"{where}.corrupt_incidences[{i}]: {exc}") from exc
    return out


def matrix_from_json(rows, where: str) -> RatMatrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{where}: expected a list of rows")
    return RatMatrix(
        [[parse_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
    )


def sheaf_from_json(obj: dict, carrier: Stratification, where: str = "$") -> SheafModel:
    kind = _require(obj, "kind", where)
    r = _require(obj, "rank", where)
    if not isinstance(r, int) or r < 1:
        raise InputError(f"{where}.rank: expected a positive integer")
    try:
        if kind == "constant":
            return constant_sheaf(carrier, r)
        if kind == "local_system":
            mono = obj.get("monodromy")
            a = matrix_from_json(mono, f"{where}.monodromy") if mono is not None else None
            return local_system(LocalSystemSpec(r, a), carrier)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc
    raise InputError(f"{where}.kind: unknown sheaf kind {kind!r}")


def _wedge_from_json(fw: Framework, inputs: list[Stratification], obj: dict, where: str) -> WedgeSet:
    idx = obj.get("stratification", 0)
    if obj.get("whole"):
        return fw.wedges[0] if fw.wedges and fw.wedges[0].edge else WedgeSet(
            frozenset(fw.carrier.cells), True, "X"
        )
    if idx == "carrier":
        strat = fw.carrier
    elif isinstance(idx, int) and 0 <= idx < len(inputs):
        strat = inputs[idx]
    else:
        raise InputError(f"{where}.stratification: no stratification {idx!r}")
    try:
        cells = [strat.cell(c) for c in _require(obj, "cells", where)]
        return fw.wedge(strat, cells, bool(obj.get("edge", False)), obj.get("name", ""))
    except (KeyError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc


def framework_from_json(obj: dict, depth: int | None = None, where: str = "$") -> Framework:
    arrs = _require(obj, "arrangements", where)
    if not isinstance(arrs, list) or not arrs:
        raise InputError(f"{where}.arrangements: expected a non-empty list")
    inputs = [enumerate_cells(arrangement_from_json(a, f"{where}.arrangements[{i}]")) for i, a in enumerate(arrs)]
    depth = obj.get("depth", 0) if depth is None else depth
    try:
        fw = Framework(
            inputs,
            depth=depth,
            include_stars=obj.get("include_stars", True),
            include_whole=obj.get("include_whole", True),
        )
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc
    for i, w in enumerate(obj.get("wedges", [])):
        fw.add_wedge(_wedge_from_json(fw, inputs, w, f"{where}.wedges[{i}]"))
    return fw


def wedge_payload(obj: dict, fw: Framework, where: str = "$") -> tuple[WedgeSet, list[Fraction]]:
    w = _wedge_from_json(fw, fw.inputs, _require(obj, "wedge", where), f"{where}.wedge")
    section = [parse_rational(x, f"{where}.section[{i}]") for i, x in enumerate(_require(obj, "section", where))]
    return w, section


# ---------------------------------------------------------------- reports


def ray(v) -> list[str]:
    return [rat_str(Fraction(x)) for x in v]


def _angular_order(center: tuple, rays: list[tuple]) -> list[tuple]:
    """Sort rays by exact angle around ``center`` in the plane orthogonal to it."""
    u, v = kernel_basis(RatMatrix([center]))

    def coords(q):
        return dot(u, q), dot(v, q)

    def half(q):
        x, y = coords(q)
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def cmp(a, b):
        ha, hb = half(a), half(b)
        if ha != hb:
            return ha - hb
        (xa, ya), (xb, yb) = coords(a), coords(b)
        cross = xa * yb - ya * xb
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(rays, key=cmp_to_key(cmp))


def plot_data(strat: Stratification) -> dict:
    m = strat.m
    if m == 1:
        return {"points": [{"cell": c.label, "ray": ray(c.point)} for c in strat.cells]}
    if m == 2:
        arcs = []
        for c in strat.top:
            ends = [f for f in strat.faces[c] if f.dim == 0]
            arcs.append({"cell": c.label, "mid": ray(c.point), "ends": [ray(e.point) for e in ends]})
        return {"points": [{"cell": c.label, "ray": ray(c.point)} for c in strat.of_dim(0)], "arcs": arcs}
    if m == 3:
        patches = []
        for c in strat.top:
            boundary = [f.point for f in strat.faces[c] if f.dim < 2]
            ring = _angular_order(c.point, boundary)
            tris = [[ray(c.point), ray(ring[i]), ray(ring[(i + 1) % len(ring)])] for i in range(len(ring))]
            patches.append({"cell": c.label, "triangles": tris})
        return {"patches": patches}
    return {}


def stratification_report(strat: Stratification, plot: bool = False) -> dict:
    covers = [
        [s.label, t.label] for t in strat.cells for s in strat.faces[t] if s.dim == t.dim - 1
    ]
    out = {
        "m": strat.m,
        "normals": [ray(a) for a in strat.arrangement.normals],
        "essential": strat.arrangement.essential,
        "counts": [len(strat.of_dim(k)) for k in range(strat.m)],
        "cells": [
            {"signs": c.label, "dim": c.dim, "point": ray(c.point), "frame": [ray(v) for v in c.frame]}
            for c in strat.cells
        ],
        "covers": covers,
        "stars": {c.label: [t.label for t in strat.cofaces[c]] for c in strat.cells},
        "euler_characteristic": strat.euler_characteristic(),
    }
    if plot:
        out["plot"] = plot_data(strat)
    return out
