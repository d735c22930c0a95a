"""Stratifications of the sphere cut out by central hyperplane arrangements.

A cell is identified by its sign vector against the arrangement normals.
When the normals leave a one-dimensional common kernel, the all-zero sign
class is the pair of antipodal "pole" points; they are kept apart by an extra
``pole`` sign.  Larger common kernels would leave an uncut great sphere, which
is not a cell, so such arrangements are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .linalg import RatMatrix, dot, feasible_strict, kernel_basis, primitive, rank, vec

SIGN_CHARS = {1: "+", -1: "-", 0: "0"}
CHAR_SIGNS = {"+": 1, "-": -1, "0": 0}


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _direction_key(a: Sequence[Fraction]) -> tuple:
    """Primitive integer normal with its first nonzero entry positive."""
    p = primitive(a)
    lead = next(x for x in p if x)
    return tuple(-x for x in p) if lead < 0 else p


@dataclass(frozen=True)
class HyperplaneArrangement:
    """Central arrangement in R^m; normal ``a`` cuts along ``{a.y = 0}``."""

    m: int
    normals: tuple = ()

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("ambient dimension m must be at least 1")
        normals = tuple(vec(a) for a in self.normals)
        object.__setattr__(self, "normals", normals)
        seen = set()
        for i, a in enumerate(normals):
            if len(a) != self.m:
                raise ValueError(f"normal {i} has length {len(a)}, expected {self.m}")
            if not any(a):
                raise ValueError(f"normal {i} is zero")
            key = _direction_key(a)
            if key in seen:
                raise ValueError(f"normal {i} duplicates an earlier hyperplane")
            seen.add(key)
        object.__setattr__(self, "_hash", hash((self.m, normals)))
        if len(self.kernel) > 1:
            raise ValueError(
                f"common kernel has dimension {len(self.kernel)}; the arrangement leaves "
                "a great sphere uncut"
            )

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def coordinate(cls, m: int) -> HyperplaneArrangement:
        return cls(m, tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))

    @property
    def n(self) -> int:
        return len(self.normals)

    @property
    def kernel(self) -> list[tuple]:
        if not self.normals:
            return [tuple(Fraction(int(i == j)) for j in range(self.m)) for i in range(self.m)]
        return kernel_basis(RatMatrix(self.normals, cols=self.m))

    @property
    def essential(self) -> bool:
        return not self.kernel

    def signs_of(self, y: Sequence[Fraction]) -> tuple[int, ...]:
        return tuple(_sign(dot(a, y)) for a in self.normals)

    def union(self, other: HyperplaneArrangement) -> HyperplaneArrangement:
        if other.m != self.m:
            raise ValueError("arrangements live in different dimensions")
        keys = {_direction_key(a) for a in self.normals}
        extra = []
        for a in other.normals:
            k = _direction_key(a)
            if k not in keys:
                keys.add(k)
                extra.append(a)
        return HyperplaneArrangement(self.m, self.normals + tuple(extra))

    def to_json(self) -> dict:
        return {"m": self.m, "normals": [[str(x) for x in a] for a in self.normals]}


@dataclass(frozen=True)
class Cell:
    """A relatively open cell; ``signs is None`` marks the empty cell."""

    arrangement: HyperplaneArrangement = field(repr=False)
    signs: tuple | None
    pole: int = 0
    dim: int = field(default=-1, compare=False)
    point: tuple = field(default=(), compare=False, repr=False)
    frame: tuple = field(default=(), compare=False, repr=False)

    @property
    def is_empty(self) -> bool:
        return self.signs is None

    @property
    def label(self) -> str:
        if self.signs is None:
            return "∅"
        text = "".join(SIGN_CHARS[s] for s in self.signs)
        if self.pole:
            text += "^" + SIGN_CHARS[self.pole]
        return text

    def constraints(self) -> list[tuple[tuple, str]]:
        """Sign constraints defining the cell's open cone (poles excepted)."""
        out = []
        for a, s in zip(self.arrangement.normals, self.signs or ()):
            if s > 0:
                out.append((a, ">"))
            elif s < 0:
                out.append((tuple(-x for x in a), ">"))
            else:
                out.append((a, "="))
        return out

    def closure_constraints(self) -> list[tuple[tuple, str]]:
        return [(a, ">=") if rel == ">" else (a, rel) for a, rel in self.constraints()]

    def __str__(self) -> str:
        return self.label


def empty_cell(arr: HyperplaneArrangement) -> Cell:
    return Cell(arr, None, 0, -1, tuple(Fraction(0) for _ in range(arr.m)), ())


def parse_label(label: str) -> tuple[tuple, int]:
    """Inverse of :attr:`Cell.label` for nonempty cells."""
    pole = 0
    if "^" in label:
        label, p = label.split("^")
        pole = CHAR_SIGNS[p]
    try:
        return tuple(CHAR_SIGNS[c] for c in label), pole
    except KeyError:
        raise ValueError(f"bad sign string {label!r}") from None


def _cell_sort_key(cell: Cell):
    return (cell.dim, cell.label)


class Stratification:
    """The cells of one arrangement, sorted by dimension then sign string."""

    def __init__(self, arrangement: HyperplaneArrangement, cells: Iterable[Cell]):
        self.arrangement = arrangement
        self.cells: tuple[Cell, ...] = tuple(sorted(cells, key=_cell_sort_key))
        self.m = arrangement.m
        self.empty = empty_cell(arrangement)
        self.index = {c: i for i, c in enumerate(self.cells)}
        self._by_key = {(c.signs, c.pole): c for c in self.cells}

    def __repr__(self) -> str:
        counts = [len(self.of_dim(k)) for k in range(self.m)]
        return f"Stratification(m={self.m}, n={self.arrangement.n}, f={counts})"

    def of_dim(self, k: int) -> tuple[Cell, ...]:
        if k == -1:
            return (self.empty,)
        return self._by_dim.get(k, ())

    @cached_property
    def _by_dim(self) -> dict[int, tuple[Cell, ...]]:
        out: dict[int, list[Cell]] = {}
        for c in self.cells:
            out.setdefault(c.dim, []).append(c)
        return {k: tuple(v) for k, v in out.items()}

    @property
    def top(self) -> tuple[Cell, ...]:
        return self.of_dim(self.m - 1)

    def cell(self, label: str) -> Cell:
        if label in ("∅", "empty"):
            return self.empty
        try:
            return self._by_key[parse_label(label)]
        except KeyError:
            raise KeyError(f"no cell {label!r} in this stratification") from None

    def locate(self, y: Sequence[Fraction]) -> Cell:
        """The cell whose cone contains the nonzero point ``y``."""
        y = vec(y)
        signs = self.arrangement.signs_of(y)
        pole = 0
        if not any(signs):
            kern = self.arrangement.kernel
            if not kern or not any(y):
                raise ValueError("point is the origin")
            pole = _sign(dot(kern[0], y))
        return self._by_key[(signs, pole)]

    @cached_property
    def faces(self) -> dict[Cell, tuple[Cell, ...]]:
        """Nonempty faces of each cell, the cell itself included."""
        return {t: tuple(s for s in self.cells if face(s, t)) for t in self.cells}

    @cached_property
    def cofaces(self) -> dict[Cell, tuple[Cell, ...]]:
        out = {c: [] for c in self.cells}
        for t, fs in self.faces.items():
            for s in fs:
                out[s].append(t)
        return {c: tuple(v) for c, v in out.items()}

    def euler_characteristic(self) -> int:
        return sum((-1) ** c.dim for c in self.cells)

    def star(self, sigma: Cell) -> StarSet:
        return star(sigma, self)


@lru_cache(maxsize=256)
def enumerate_cells(arr: HyperplaneArrangement) -> Stratification:
    """All cells of the stratification induced on S^{m-1}.

    Sign vectors are grown one hyperplane at a time; a partial vector
    survives only if its open cone is nonempty.
    """
    from .orientation import canonical_frame

    partial: list[tuple[tuple, tuple | None]] = [((), None)]
    for a in arr.normals:
        grown = []
        for prefix, w in partial:
            for s in (1, -1, 0):
                signs = prefix + (s,)
                if not any(signs):
                    grown.append((signs, None))
                    continue
                if w is not None and _sign(dot(a, w)) == s:
                    grown.append((signs, w))
                    continue
                probe = Cell(arr, signs)
                witness = feasible_strict(probe.constraints(), dim=arr.m)
                if witness is not None:
                    grown.append((signs, witness))
        partial = grown

    cells = []
    for signs, _ in partial:
        if not any(signs):
            continue
        probe = Cell(arr, signs)
        point = primitive(feasible_strict(probe.constraints(), dim=arr.m))
        zero_rows = [a for a, s in zip(arr.normals, signs) if s == 0]
        k = arr.m - (rank(RatMatrix(zero_rows, cols=arr.m)) if zero_rows else 0) - 1
        cells.append(replace(probe, dim=k, point=point))
    kern = arr.kernel
    if kern:
        v = primitive(kern[0])
        zero = tuple(0 for _ in arr.normals)
        cells.append(Cell(arr, zero, 1, 0, v))
        cells.append(Cell(arr, zero, -1, 0, tuple(-x for x in v)))
    cells = [replace(c, frame=canonical_frame(c)) for c in cells]
    return Stratification(arr, cells)


def face(sigma: Cell, tau: Cell) -> bool:
    """True iff ``sigma`` lies in the closure of ``tau``."""
    if sigma.arrangement is not tau.arrangement and sigma.arrangement != tau.arrangement:
        raise ValueError("cells belong to different arrangements")
    if sigma.is_empty:
        return True
    if tau.is_empty:
        return False
    if any(s and s != t for s, t in zip(sigma.signs, tau.signs)):
        return False
    if sigma.pole and tau.pole:
        return sigma.pole == tau.pole
    return not tau.pole or bool(sigma.pole)


@dataclass(frozen=True)
class StarSet:
    """Open star of ``base`` in two forms: member cells and open half-spaces.

    ``halfspaces`` lists ``(index, sign)`` for each normal with the base cell
    strictly on the ``sign`` side.
    """

    base: Cell
    members: tuple[Cell, ...]
    halfspaces: tuple[tuple[int, int], ...]

    def halfspace_constraints(self) -> list[tuple[tuple, str]]:
        normals = self.base.arrangement.normals
        return [(tuple(s * x for x in normals[i]), ">") for i, s in self.halfspaces]

    def in_halfspaces(self, y: Sequence[Fraction]) -> bool:
        return all(dot(a, y) > 0 for a, _ in self.halfspace_constraints())

    @property
    def cells(self) -> frozenset[Cell]:
        return frozenset(self.members)


def star(sigma: Cell, strat: Stratification | None = None) -> StarSet:
    if strat is None:
        strat = enumerate_cells(sigma.arrangement)
    if sigma.is_empty:
        return StarSet(sigma, strat.cells, ())
    members = strat.cofaces[sigma]
    hs = tuple((i, s) for i, s in enumerate(sigma.signs) if s)
    return StarSet(sigma, members, hs)


def star_lemma_holds(sigma: Cell, strat: Stratification | None = None) -> bool:
    """Check that the combinatorial star equals the half-space intersection.

    Forward inclusion: each member's interior point lies in every half-space.
    Reverse inclusion: for each non-member cell, its sign system together
    with the half-space constraints is infeasible.  The empty cell's star is
    the whole sphere by convention.
    """
    if strat is None:
        strat = enumerate_cells(sigma.arrangement)
    st = star(sigma, strat)
    if sigma.is_empty:
        return set(st.members) == set(strat.cells)
    hs = st.halfspace_constraints()
    if not all(st.in_halfspaces(c.point) for c in st.members):
        return False
    members = set(st.members)
    for c in strat.cells:
        if c in members:
            continue
        if c.pole:
            # the pole rays satisfy every zero-sign equation; test the ray itself
            if st.in_halfspaces(c.point):
                return False
            continue
        if feasible_strict(c.constraints() + hs, dim=strat.m) is not None:
            return False
    return True


def meet(sigma: Cell, tau: Cell, strat: Stratification | None = None) -> Cell | None:
    """The cell whose closure is the intersection of the two closures, if any."""
    if strat is None:
        strat = enumerate_cells(sigma.arrangement)
    if sigma.arrangement != tau.arrangement:
        raise ValueError("meet of cells from different arrangements")
    if sigma.is_empty or tau.is_empty:
        return strat.empty
    common = set(strat.faces[sigma]) & set(strat.faces[tau])
    if not common:
        return strat.empty
    maximal = [d for d in common if all(face(e, d) for e in common)]
    return maximal[0] if len(maximal) == 1 else None


def _constant_sign(cell: Cell, a: tuple) -> bool:
    """Whether the linear form ``a`` has one sign on the whole cell."""
    if cell.pole or cell.dim == 0:
        return True
    base = cell.constraints()
    m = cell.arrangement.m
    hits = 0
    for extra in ((a, ">"), (tuple(-x for x in a), ">"), (a, "=")):
        if feasible_strict(base + [extra], dim=m) is not None:
            hits += 1
    return hits == 1


def is_refinement(coarse: Stratification, fine: Stratification) -> bool:
    """True iff every cell of ``fine`` lies inside a single cell of ``coarse``."""
    if coarse.m != fine.m:
        raise ValueError("stratifications of different spheres")
    for c in fine.cells:
        for a in coarse.arrangement.normals:
            if not _constant_sign(c, a):
                return False
    return True


@lru_cache(maxsize=256)
def coarse_map(coarse: Stratification, fine: Stratification) -> dict[Cell, Cell]:
    """Send each cell of ``fine`` to the ``coarse`` cell containing it."""
    return {c: coarse.locate(c.point) for c in fine.cells}


def common_refinement(a: Stratification, b: Stratification) -> Stratification:
    return enumerate_cells(a.arrangement.union(b.arrangement))


def same_cells(a: Stratification, b: Stratification) -> bool:
    """Equality of the underlying partitions, ignoring how they were cut."""
    if [len(a.of_dim(k)) for k in range(a.m)] != [len(b.of_dim(k)) for k in range(b.m)]:
        return False
    return is_refinement(a, b) and is_refinement(b, a)


def is_open(cells: Iterable[Cell], strat: Stratification) -> bool:
    cells = set(cells)
    return all(t in cells for c in cells for t in strat.cofaces[c])


@dataclass(frozen=True)
class ConeSet:
    """``M*K`` for an open union ``K`` of cells of one stratification."""

    strat: Stratification = field(repr=False, compare=False)
    cells: frozenset

    def contains(self, y: Sequence[Fraction], t) -> bool:
        t = Fraction(t)
        if not 0 < t < 1 or not any(vec(y)):
            return False
        return self.strat.locate(y) in self.cells


def cone_set(cells: Iterable[Cell], strat: Stratification | None = None) -> ConeSet:
    cells = frozenset(cells)
    if not cells:
        raise ValueError("empty cone set")
    if strat is None:
        strat = enumerate_cells(next(iter(cells)).arrangement)
    if any(c.is_empty for c in cells):
        raise ValueError("the empty cell cannot be a member of a cone set")
    if not is_open(cells, strat):
        raise ValueError("cell union is not open in the sphere")
    return ConeSet(strat, cells)
