"""The oriented cochain complex of a stratification, globally and at stalks.

Degree ``-m`` holds the single generator ``X`` (the constant sheaf on the
whole space); degree ``j > -m`` holds the cells of dimension ``j + m - 1``.
At a point of ``M`` the complex is augmented by one extra slot ``M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union

from .arrangement import Cell, Stratification, face
from .linalg import RatMatrix, rank
from .orientation import a_one, incidence_coface

X_LABEL = "X"
M_LABEL = "M"


@dataclass(frozen=True)
class AtM:
    """Stalk at a point of the edge ``M``."""

    def __str__(self) -> str:
        return "AtM"


@dataclass(frozen=True)
class AtCell:
    """Stalk at a point of ``M*delta`` off the edge."""

    delta: Cell

    def __str__(self) -> str:
        return f"AtCell({self.delta.label})"


StalkContext = Union[AtM, AtCell]


def require_essential(strat: Stratification) -> None:
    if not strat.arrangement.essential:
        raise ValueError("complexes are built only for essential arrangements")


@lru_cache(maxsize=128)
def incidence_table(strat: Stratification) -> dict[tuple[Cell, Cell], int]:
    """All codimension-one incidences ``(sigma, tau) -> <sigma, tau>``."""
    table = {}
    for tau in strat.cells:
        for sigma in strat.faces[tau]:
            if sigma.dim == tau.dim - 1:
                table[sigma, tau] = incidence_coface(sigma, tau)
    return table


def in_closed_star(tau: Cell, delta: Cell) -> bool:
    """Whether ``tau`` lies in the closure of the star of ``delta``."""
    if delta.is_empty:
        return True
    return not any(t * d == -1 for t, d in zip(tau.signs, delta.signs))


def restricted_cells(strat: Stratification, ctx: StalkContext, k: int) -> list[Cell]:
    cells = strat.of_dim(k)
    if isinstance(ctx, AtM):
        return list(cells)
    if ctx.delta not in strat.index and not ctx.delta.is_empty:
        raise ValueError(f"cell {ctx.delta.label} is not in this stratification")
    return [c for c in cells if in_closed_star(c, ctx.delta)]


def contexts(strat: Stratification) -> list[StalkContext]:
    return [AtM()] + [AtCell(c) for c in strat.cells]


@dataclass
class GradedComplex:
    """Bases per degree and differentials ``d[j]`` from degree ``j`` to ``j+1``."""

    m: int
    ctx: StalkContext
    bases: dict[int, tuple]
    d: dict[int, RatMatrix]
    reference: int = 1
    corrupted: frozenset = field(default=frozenset())

    @property
    def degrees(self) -> range:
        return range(-self.m, 1)

    @property
    def augmented(self) -> bool:
        return bool(self.bases[1])

    def label(self, degree: int, i: int) -> str:
        b = self.bases[degree][i]
        return b.label if isinstance(b, Cell) else b

    def to_json(self, matrices: bool = False) -> dict:
        out = {"context": str(self.ctx), "degrees": []}
        for j in self.degrees:
            entry = {
                "degree": j,
                "basis": [self.label(j, i) for i in range(len(self.bases[j]))],
                "shape": list(self.d[j].shape),
                "rank": rank(self.d[j]),
            }
            if matrices:
                entry["matrix"] = self.d[j].to_json()
            out["degrees"].append(entry)
        out["homology"] = {str(k): v for k, v in homology(self).items()}
        return out


def build_complex(
    strat: Stratification,
    ctx: StalkContext,
    reference: int = 1,
    corrupt: Iterable[tuple[Cell, Cell]] = (),
) -> GradedComplex:
    """Assemble the complex; ``corrupt`` lists incidences to flip (testing hook)."""
    require_essential(strat)
    m = strat.m
    corrupt = frozenset(corrupt)
    table = incidence_table(strat)
    bases: dict[int, tuple] = {-m: (X_LABEL,)}
    for j in range(-m + 1, 1):
        bases[j] = tuple(restricted_cells(strat, ctx, j + m - 1))
    bases[1] = (M_LABEL,) if isinstance(ctx, AtM) else ()

    d = {-m: RatMatrix([[1] for _ in bases[-m + 1]], cols=1)}
    for j in range(-m + 1, 0):
        rows, cols = bases[j + 1], bases[j]
        entries = []
        for tau in rows:
            row = []
            for sigma in cols:
                v = table.get((sigma, tau), 0)
                if (sigma, tau) in corrupt:
                    v = -v
                row.append(v)
            entries.append(row)
        d[j] = RatMatrix(entries, cols=len(cols))
    d[0] = RatMatrix([[a_one(s, reference) for s in bases[0]] for _ in bases[1]], cols=len(bases[0]))
    return GradedComplex(m, ctx, bases, d, reference, corrupt)


def complex_defects(c: GradedComplex) -> list[tuple[int, str, str]]:
    """Nonzero entries of consecutive products, as (degree, target, source)."""
    out = []
    for j in range(-c.m, 0):
        prod = c.d[j + 1] @ c.d[j]
        for i, k, _ in prod.nonzero():
            out.append((j, c.label(j + 2, i), c.label(j, k)))
    return out


def verify_complex(c: GradedComplex) -> bool:
    return not complex_defects(c)


def homology(c: GradedComplex, augmented: bool = True) -> dict[int, int]:
    """Homology dimension at each degree (including the augmentation slot)."""
    ranks = {j: rank(c.d[j]) for j in c.degrees}
    out = {}
    for j in c.degrees:
        incoming = ranks.get(j - 1, 0)
        outgoing = ranks[j] if (augmented or j < 0) else 0
        out[j] = len(c.bases[j]) - outgoing - incoming
    if augmented and c.bases[1]:
        out[1] = len(c.bases[1]) - ranks[0]
    return out


@dataclass(frozen=True)
class ExactnessReport:
    context: str
    homology: dict
    exact: bool


def verify_exactness(c: GradedComplex, ctx: StalkContext | None = None) -> ExactnessReport:
    ctx = c.ctx if ctx is None else ctx
    if not verify_complex(c):
        raise ValueError("not a complex; exactness is meaningless")
    h = homology(c)
    return ExactnessReport(str(ctx), h, not any(h.values()))


def _boundary(strat: Stratification, ctx: StalkContext, k: int, signed: bool) -> tuple:
    """Simplicial boundary from dimension ``k+1`` to ``k`` on reversed bases.

    ``k = -1`` is the augmentation onto the empty cell.
    """
    table = incidence_table(strat)
    high = list(reversed(restricted_cells(strat, ctx, k + 1)))
    if k == -1:
        low = [strat.empty]
        entries = [[1] * len(high)]
    else:
        low = list(reversed(restricted_cells(strat, ctx, k)))
        entries = [[table.get((s, t), 0) for t in high] for s in low]
    if not signed:
        entries = [[abs(x) for x in row] for row in entries]
    return RatMatrix(entries, cols=len(high)), low, high


def _alpha(sorted_basis: tuple, dual_basis: list) -> RatMatrix:
    def key(b):
        return X_LABEL if isinstance(b, Cell) and b.is_empty else b

    return RatMatrix(
        [[int(key(d) == s) for d in dual_basis] for s in sorted_basis], cols=len(dual_basis)
    )


def duality_check(strat: Stratification, ctx: StalkContext, signed: bool = True) -> bool:
    """Check ``alpha^{k+1} . del^* = d . alpha^k`` in every degree."""
    c = build_complex(strat, ctx)
    m = strat.m
    for k in range(-1, m - 1):
        bd, low, high = _boundary(strat, ctx, k, signed)
        a_low = _alpha(c.bases[k - m + 1], low)
        a_high = _alpha(c.bases[k - m + 2], high)
        if a_high @ bd.T != c.d[k - m + 1] @ a_low:
            return False
    return True


def _incidence(table: dict, sigma: Cell, tau: Cell) -> int:
    # the empty cell meets every 0-cell with incidence one
    return 1 if sigma.is_empty else table[sigma, tau]


def flag_identity_defects(strat: Stratification) -> list[tuple[str, str]]:
    """Pairs (sigma, delta) two apart where the incidence sum over tau fails."""
    table = incidence_table(strat)
    out = []
    for delta in strat.cells:
        for sigma in (strat.empty,) + strat.faces[delta]:
            if sigma.dim != delta.dim - 2:
                continue
            mids = [t for t in strat.faces[delta] if t.dim == sigma.dim + 1 and face(sigma, t)]
            total = sum(_incidence(table, sigma, t) * table[t, delta] for t in mids)
            if len(mids) != 2 or total != 0:
                out.append((sigma.label, delta.label))
    return out


def twist_identity_defects(strat: Stratification, reference: int = 1) -> list[str]:
    """Codimension-two cells where the two top cofaces fail to cancel."""
    table = incidence_table(strat)
    m = strat.m
    out = []
    for sigma in strat.of_dim(m - 2):
        cofaces = strat.cells if sigma.is_empty else strat.cofaces[sigma]
        tops = [t for t in cofaces if t.dim == m - 1]
        total = sum(_incidence(table, sigma, t) * a_one(t, reference) for t in tops)
        if len(tops) != 2 or total != 0:
            out.append(sigma.label)
    return out
