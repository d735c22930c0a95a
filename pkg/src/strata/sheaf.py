"""Finite cellular models of locally constant sheaves and their presentations.

A model lives on a *carrier* stratification.  Every carrier cell ``c`` has the
stalk ``Q^r`` (sections over the open cone on its star), and every face pair
``c < d`` carries an invertible restriction matrix ``R[c, d]``.  Sections over
an open union ``K`` of carrier cells are families of top-cell vectors that
agree after transport through every lower cell of ``K``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .arrangement import Cell, Stratification, coarse_map, is_refinement
from .cochain import incidence_table, require_essential
from .linalg import (
    Cokernel,
    Infeasible,
    RatMatrix,
    block_matrix,
    cokernel,
    det,
    inverse,
    kernel_basis,
    solve_particular,
)


@dataclass(frozen=True)
class Sections:
    """Sections over ``region``: columns of ``basis`` live in the top-cell sum."""

    region: frozenset
    tops: tuple[Cell, ...]
    basis: RatMatrix
    r: int

    @property
    def dim(self) -> int:
        return self.basis.cols

    def slot(self, tau: Cell) -> range:
        i = self.tops.index(tau)
        return range(i * self.r, (i + 1) * self.r)

    def coordinates(self, v) -> tuple:
        """Coordinates of an ambient vector in ``basis``; raises if outside."""
        col = RatMatrix([[x] for x in v], cols=1)
        return solve_particular(self.basis, col).col(0)


@dataclass(frozen=True)
class LocalSystemSpec:
    rank: int
    monodromy: RatMatrix | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.monodromy is not None:
            a = self.monodromy
            if a.shape != (self.rank, self.rank):
                raise ValueError("monodromy must be rank x rank")
            if det(a) == 0:
                raise ValueError("monodromy must be invertible")

    @property
    def trivial(self) -> bool:
        return self.monodromy is None or self.monodromy == RatMatrix.identity(self.rank)


class SheafModel:
    def __init__(
        self,
        carrier: Stratification,
        r: int,
        restrictions: dict[tuple[Cell, Cell], RatMatrix] | None = None,
        kind: str = "constant",
        monodromy: RatMatrix | None = None,
    ):
        require_essential(carrier)
        self.carrier = carrier
        self.r = r
        self.kind = kind
        self.monodromy = monodromy
        self._R = dict(restrictions or {})
        for (c, d), mat in self._R.items():
            if mat.shape != (r, r) or det(mat) == 0:
                raise ValueError(f"restriction {c.label}->{d.label} is not an invertible {r}x{r} matrix")
        self._sections: dict = {}

    def __repr__(self) -> str:
        return f"SheafModel(kind={self.kind!r}, r={self.r}, carrier={self.carrier!r})"

    def R(self, c: Cell, d: Cell) -> RatMatrix:
        """Restriction from the star of ``c`` to the star of its coface ``d``."""
        return self._R.get((c, d), RatMatrix.identity(self.r))

    def functoriality_defects(self) -> list[tuple[str, str, str]]:
        out = []
        cells = self.carrier.cells
        faces = self.carrier.faces
        for e in cells:
            for d in faces[e]:
                for c in faces[d]:
                    if c == d or d == e:
                        continue
                    if self.R(d, e) @ self.R(c, d) != self.R(c, e):
                        out.append((c.label, d.label, e.label))
        return out

    def sections(self, region: Iterable[Cell]) -> Sections:
        region = frozenset(region)
        if region not in self._sections:
            self._sections[region] = self._solve_sections(region)
        return self._sections[region]

    def _solve_sections(self, region: frozenset) -> Sections:
        r = self.r
        tops = tuple(c for c in self.carrier.top if c in region)
        pos = {t: i for i, t in enumerate(tops)}
        rows = []
        for c in self.carrier.cells:
            if c not in region or c.dim == self.carrier.m - 1:
                continue
            nbrs = [t for t in self.carrier.cofaces[c] if t in pos]
            if len(nbrs) < 2:
                continue
            first = nbrs[0]
            back = inverse(self.R(c, first))
            for t in nbrs[1:]:
                # R[c,t] R[c,first]^{-1} s_first - s_t = 0
                m = self.R(c, t) @ back
                for i in range(r):
                    row = [Fraction(0)] * (r * len(tops))
                    for j in range(r):
                        row[pos[first] * r + j] += m[i, j]
                    row[pos[t] * r + i] -= 1
                    rows.append(row)
        n = r * len(tops)
        if rows:
            basis = kernel_basis(RatMatrix(rows, cols=n))
        else:
            basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        return Sections(region, tops, RatMatrix.from_columns(basis, n) if basis else RatMatrix.zeros(n, 0), r)

    def whole(self) -> Sections:
        """Sections over the whole space including the edge ``M``.

        For ``m >= 2`` these are the global sections over the sphere.  For
        ``m = 1`` the edge joins the two half-lines, so only the diagonal
        survives.
        """
        everything = frozenset(self.carrier.cells)
        if self.carrier.m >= 2:
            return self.sections(everything)
        key = ("whole", everything)
        if key not in self._sections:
            tops = self.carrier.top
            r = self.r
            n = r * len(tops)
            cols = [tuple(Fraction(int(j % r == i)) for j in range(n)) for i in range(r)]
            self._sections[key] = Sections(everything, tops, RatMatrix.from_columns(cols, n), r)
        return self._sections[key]

    def restrict(self, big: Sections, small: Sections) -> RatMatrix:
        """Matrix of restriction ``big -> small`` in the chosen bases."""
        missing = [t for t in small.tops if t not in big.tops]
        if missing:
            raise ValueError("restriction target is not contained in the source")
        idx = [i for t in small.tops for i in big.slot(t)]
        projected = big.basis.submatrix(idx, range(big.dim))
        try:
            return solve_particular(small.basis, projected)
        except Infeasible as exc:
            raise ValueError("restricted sections leave the target section space") from exc

    def region(self, strat: Stratification, sigma: Cell) -> frozenset:
        """Carrier cells inside St_strat(sigma)."""
        parent = coarse_map(strat, self.carrier)
        if sigma.is_empty:
            return frozenset(self.carrier.cells)
        star = set(strat.cofaces[sigma])
        return frozenset(c for c in self.carrier.cells if parent[c] in star)

    def cell_sections(self, strat: Stratification, sigma: Cell) -> Sections:
        if sigma.is_empty and strat.m == 1:
            return self.whole()
        return self.sections(self.region(strat, sigma))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "rank": self.r}
        if self.monodromy is not None:
            out["monodromy"] = self.monodromy.to_json()
        return out


def constant_sheaf(carrier: Stratification, r: int = 1) -> SheafModel:
    if r < 1:
        raise ValueError("rank must be positive")
    return SheafModel(carrier, r)


def top_cycle(carrier: Stratification) -> dict[Cell, list[tuple[Cell, Cell]]]:
    """Adjacency of top cells through shared codimension-one cells."""
    adj: dict[Cell, list[tuple[Cell, Cell]]] = {t: [] for t in carrier.top}
    for v in carrier.of_dim(carrier.m - 2):
        a, b = [t for t in carrier.cofaces[v] if t.dim == carrier.m - 1]
        adj[a].append((v, b))
        adj[b].append((v, a))
    return adj


def local_system(spec: LocalSystemSpec, carrier: Stratification, base: Cell | None = None) -> SheafModel:
    """Rank-``r`` local system with monodromy ``A`` around S^1.

    A breadth-first spanning tree over the cycle of arcs leaves one vertex
    uncut; crossing it counterclockwise applies ``A``.
    """
    m = carrier.m
    if spec.trivial:
        return SheafModel(carrier, spec.rank, kind="local_system", monodromy=spec.monodromy)
    if m != 2:
        raise ValueError("nontrivial monodromy is supported only on the circle (m = 2)")
    require_essential(carrier)
    adj = top_cycle(carrier)
    base = carrier.top[0] if base is None else base
    seen = {base}
    tree_vertices = set()
    queue = deque([base])
    while queue:
        t = queue.popleft()
        for v, u in sorted(adj[t], key=lambda e: (e[0].label, e[1].label)):
            if u not in seen:
                seen.add(u)
                tree_vertices.add(v)
                queue.append(u)
    (cut,) = [v for v in carrier.of_dim(0) if v not in tree_vertices]
    a, b = [t for t in carrier.cofaces[cut] if t.dim == 1]
    if det(RatMatrix([a.point, b.point])) < 0:
        a, b = b, a
    # b follows a counterclockwise
    restrictions = {(cut, b): spec.monodromy}
    return SheafModel(carrier, spec.rank, restrictions, kind="local_system", monodromy=spec.monodromy)


def transport_around(model: SheafModel) -> RatMatrix:
    """Product of transition maps once around the circle, counterclockwise."""
    carrier = model.carrier
    adj = top_cycle(carrier)
    start = carrier.top[0]
    total = RatMatrix.identity(model.r)
    t = start
    while True:
        nxt = [(v, u) for v, u in adj[t] if det(RatMatrix([t.point, u.point])) > 0]
        (v, u), = nxt
        total = model.R(v, u) @ inverse(model.R(v, t)) @ total
        t = u
        if t == start:
            return total


@dataclass
class Presentation:
    """``P : F_{m-1} -> F_m`` and the cokernel that models the local cohomology."""

    strat: Stratification
    model: SheafModel
    low: tuple[Cell, ...]
    top: tuple[Cell, ...]
    low_sections: tuple[Sections, ...]
    top_sections: tuple[Sections, ...]
    matrix: RatMatrix
    coker: Cokernel = field(repr=False)

    @property
    def dim(self) -> int:
        return self.coker.dim

    def top_offsets(self) -> dict[Cell, range]:
        out, start = {}, 0
        for t, s in zip(self.top, self.top_sections):
            out[t] = range(start, start + s.dim)
            start += s.dim
        return out

    @property
    def top_dim(self) -> int:
        return sum(s.dim for s in self.top_sections)


def assemble_presentation(model: SheafModel, strat: Stratification) -> Presentation:
    require_essential(strat)
    if not is_refinement(strat, model.carrier):
        raise ValueError("the sheaf carrier must refine the stratification")
    m = strat.m
    top = strat.top
    low = strat.of_dim(m - 2)
    low_s = tuple(model.cell_sections(strat, s) for s in low)
    top_s = tuple(model.cell_sections(strat, t) for t in top)
    table = incidence_table(strat)
    blocks = {}
    for j, (sigma, ss) in enumerate(zip(low, low_s)):
        for i, (tau, ts) in enumerate(zip(top, top_s)):
            inc = 1 if sigma.is_empty else table.get((sigma, tau), 0)
            if inc:
                blocks[i, j] = model.restrict(ss, ts).scale(inc)
    p = block_matrix([s.dim for s in top_s], [s.dim for s in low_s], blocks)
    return Presentation(strat, model, low, top, low_s, top_s, p, cokernel(p))
