"""Formal sums of sections on wedge sets, and the framework conditions."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

from .arrangement import (
    Cell,
    Stratification,
    _direction_key,
    coarse_map,
    common_refinement,
    is_refinement,
    meet,
)
from .cochain import require_essential
from .linalg import Cokernel, RatMatrix, cokernel
from .sheaf import Sections, SheafModel


@dataclass(frozen=True)
class WedgeSet:
    """Open cone over a union of carrier cells; ``edge`` adds ``M`` itself."""

    cells: frozenset
    edge: bool = False
    name: str = field(default="", compare=False)

    def contains(self, other: WedgeSet) -> bool:
        return other.cells <= self.cells and (self.edge or not other.edge)

    def __str__(self) -> str:
        return self.name or f"W({len(self.cells)} cells{', edge' if self.edge else ''})"


def strat_key(strat: Stratification) -> frozenset:
    return frozenset(_direction_key(a) for a in strat.arrangement.normals)


def close_under_refinement(strats: Sequence[Stratification], depth: int) -> list[Stratification]:
    """Add pairwise common refinements, ``depth`` rounds deep."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    out = []
    keys = set()
    for s in strats:
        if strat_key(s) not in keys:
            keys.add(strat_key(s))
            out.append(s)
    for _ in range(depth):
        fresh = []
        for i, a in enumerate(out):
            for b in out[i + 1:]:
                c = common_refinement(a, b)
                if strat_key(c) not in keys:
                    keys.add(strat_key(c))
                    fresh.append(c)
        if not fresh:
            break
        out.extend(fresh)
    return out


class Framework:
    """Finite stand-ins for the families of stratifications and wedges.

    The open-set family is the single conic set ``X``; its condition on
    nested open sets is vacuous.
    """

    def __init__(
        self,
        strats: Sequence[Stratification],
        depth: int = 0,
        include_stars: bool = True,
        include_whole: bool = True,
    ):
        if not strats:
            raise ValueError("a framework needs at least one stratification")
        for s in strats:
            require_essential(s)
        if len({s.m for s in strats}) != 1:
            raise ValueError("stratifications of different spheres")
        self.depth = depth
        self.inputs = tuple(strats)
        self.strats = close_under_refinement(strats, depth)
        self.m = self.strats[0].m
        self.carrier = reduce(common_refinement, self.strats)
        self.wedges: list[WedgeSet] = []
        if include_whole:
            self.add_wedge(WedgeSet(frozenset(self.carrier.cells), True, "X"))
        if include_stars:
            for i, s in enumerate(self.strats):
                for c in s.cells:
                    self.add_wedge(WedgeSet(self.region(s, c), False, f"St{i}({c.label})"))

    def __repr__(self) -> str:
        return f"Framework(m={self.m}, |T|={len(self.strats)}, |W|={len(self.wedges)})"

    def region(self, strat: Stratification, sigma: Cell) -> frozenset:
        parent = coarse_map(strat, self.carrier)
        if sigma.is_empty:
            return frozenset(self.carrier.cells)
        star = set(strat.cofaces[sigma])
        return frozenset(c for c in self.carrier.cells if parent[c] in star)

    def wedge(self, strat: Stratification, cells: Iterable[Cell], edge: bool = False, name: str = "") -> WedgeSet:
        """Wedge over a union of cells of ``strat``, re-cut into carrier cells."""
        parent = coarse_map(strat, self.carrier)
        chosen = set(cells)
        region = frozenset(c for c in self.carrier.cells if parent[c] in chosen)
        if not region:
            raise ValueError("empty wedge")
        if any(t not in region for c in region for t in self.carrier.cofaces[c]):
            raise ValueError("wedge sphere part is not open")
        if edge and len(region) != len(self.carrier.cells):
            raise ValueError("only the whole space may contain the edge")
        return WedgeSet(region, edge, name)

    def add_wedge(self, w: WedgeSet) -> WedgeSet:
        """Add ``w`` unless a wedge with the same content is present."""
        for existing in self.wedges:
            if existing == w:
                return existing
        self.wedges.append(w)
        return w

    def index(self, w: WedgeSet) -> int:
        try:
            return self.wedges.index(w)
        except ValueError:
            raise KeyError(f"unknown wedge {w}") from None

    def refinement_pairs(self) -> list[tuple[Stratification, Stratification]]:
        return [
            (a, b)
            for a in self.strats
            for b in self.strats
            if a is not b and strat_key(a) < strat_key(b) and is_refinement(a, b)
        ]

    def check_W1(self) -> list[str]:
        """Stars of nonempty cells missing from the wedge list."""
        present = set(self.wedges)
        missing = []
        for i, s in enumerate(self.strats):
            for c in s.cells:
                if WedgeSet(self.region(s, c)) not in present:
                    missing.append(f"St{i}({c.label})")
        return missing

    def check_T2(self) -> bool:
        """Pairwise common refinements are present (only meaningful at full depth)."""
        keys = {strat_key(s) for s in self.strats}
        return all(
            strat_key(common_refinement(a, b)) in keys for a in self.strats for b in self.strats
        )


def witnesses(w: WedgeSet, fw: Framework) -> list[tuple[Stratification, Cell]]:
    out = []
    for s in fw.strats:
        for sigma in s.top:
            if fw.region(s, sigma) <= w.cells:
                out.append((s, sigma))
    return out


def check_W2(w: WedgeSet, fw: Framework) -> tuple[Stratification, Cell] | None:
    """First top cell, in framework order, whose star fits inside ``w``."""
    found = witnesses(w, fw)
    return found[0] if found else None


def check_W3(
    w: WedgeSet,
    first: tuple[Stratification, Cell],
    second: tuple[Stratification, Cell],
    fw: Framework,
) -> list[Cell] | None:
    """Chain of top cells linking two witnesses through stars inside ``w``."""
    (s1, c1), (s2, c2) = first, second
    for s, c in (first, second):
        if not fw.region(s, c) <= w.cells:
            raise ValueError(f"witness {c.label} does not fit in {w}")
    ref = common_refinement(s1, s2)
    p1, p2 = coarse_map(s1, ref), coarse_map(s2, ref)
    inside = [t for t in ref.top if fw.region(ref, t) <= w.cells]
    starts = [t for t in inside if p1[t] == c1]
    goals = {t for t in inside if p2[t] == c2}

    def linked(a: Cell, b: Cell) -> bool:
        d = meet(a, b, ref)
        return d is not None and fw.region(ref, d) <= w.cells

    prev: dict[Cell, Cell | None] = {t: None for t in starts}
    queue = deque(starts)
    while queue:
        t = queue.popleft()
        if t in goals:
            chain = [t]
            while prev[chain[-1]] is not None:
                chain.append(prev[chain[-1]])
            return chain[::-1]
        for u in inside:
            if u not in prev and linked(t, u):
                prev[u] = t
                queue.append(u)
    return None


def validate_chain(
    chain: Sequence[Cell], w: WedgeSet, first: tuple, second: tuple, fw: Framework
) -> bool:
    """Re-check the endpoint containments and the star condition on each link."""
    if not chain:
        return False
    ref = common_refinement(first[0], second[0])
    p1, p2 = coarse_map(first[0], ref), coarse_map(second[0], ref)
    if p1[chain[0]] != first[1] or p2[chain[-1]] != second[1]:
        return False
    for a, b in zip(chain, chain[1:]):
        d = meet(a, b, ref)
        if d is None or not fw.region(ref, d) <= w.cells:
            return False
    return True


@dataclass
class IntuitiveClass:
    coords: tuple

    def __eq__(self, other) -> bool:
        return isinstance(other, IntuitiveClass) and self.coords == other.coords

    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass
class Quotient:
    """Direct sum of wedge sections modulo the restriction relations."""

    fw: Framework
    model: SheafModel
    sections: tuple[Sections, ...]
    offsets: tuple[int, ...]
    relations: RatMatrix
    coker: Cokernel = field(repr=False)

    @property
    def dim(self) -> int:
        return self.coker.dim

    @property
    def total(self) -> int:
        return self.offsets[-1]

    def block(self, w: WedgeSet) -> range:
        i = self.fw.index(w)
        return range(self.offsets[i], self.offsets[i + 1])

    def embed(self, w: WedgeSet, f: Sequence) -> tuple:
        blk = self.block(w)
        if len(f) != len(blk):
            raise ValueError(f"section for {w} needs {len(blk)} coordinates")
        v = [0] * self.total
        for i, x in zip(blk, f):
            v[i] = x
        return tuple(v)

    def class_of(self, w: WedgeSet, f: Sequence) -> IntuitiveClass:
        return IntuitiveClass(self.coker.projection.apply(self.embed(w, f)))


def wedge_sections(model: SheafModel, w: WedgeSet) -> Sections:
    return model.whole() if w.edge else model.sections(w.cells)


def build_quotient(model: SheafModel, fw: Framework) -> Quotient:
    if strat_key(model.carrier) != strat_key(fw.carrier):
        raise ValueError("sheaf model and framework use different carriers")
    secs = tuple(wedge_sections(model, w) for w in fw.wedges)
    offsets = [0]
    for s in secs:
        offsets.append(offsets[-1] + s.dim)
    total = offsets[-1]
    columns = []
    for i, w1 in enumerate(fw.wedges):
        for j, w2 in enumerate(fw.wedges):
            if i == j or not w1.contains(w2) or w1 == w2:
                continue
            res = model.restrict(secs[i], secs[j])
            for k in range(secs[i].dim):
                col = [0] * total
                col[offsets[i] + k] = 1
                for t in range(secs[j].dim):
                    col[offsets[j] + t] -= res[t, k]
                columns.append(col)
    rel = RatMatrix.from_columns(columns, total) if columns else RatMatrix.zeros(total, 0)
    return Quotient(fw, model, secs, tuple(offsets), rel, cokernel(rel))
