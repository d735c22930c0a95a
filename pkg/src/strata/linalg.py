"""Exact rational linear algebra.

Everything here works over :class:`fractions.Fraction`; there is no floating
point path.  Matrices are small and dense, so the routines favour clarity and
deterministic output (reduced echelon normal forms) over speed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rat = Fraction
Vector = tuple  # tuple[Fraction, ...]


def rat(value) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to a Fraction.

    Floats are refused: they would smuggle rounding into exact code.
    """
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an int, str or Fraction")
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in rational {value!r}") from None
    return Fraction(value)


def rat_str(q: Fraction) -> str:
    return str(Fraction(q))


def vec(values: Iterable) -> tuple:
    return tuple(rat(v) for v in values)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def primitive(v: Sequence[Fraction]) -> tuple:
    """Positive rescaling of ``v`` to a primitive integer vector (same ray)."""
    denom = 1
    for x in v:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in v]
    g = 0
    for n in ints:
        g = gcd(g, abs(n))
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(n // g) for n in ints)


class RatMatrix:
    """Immutable dense matrix of Fractions, stored row-major."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        rows = tuple(tuple(rat(x) for x in row) for row in data)
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(rows[0])
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_data", rows)

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> RatMatrix:
        return cls([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(
            [[r[j] for r in self._data] for j in range(self.cols)], cols=self.rows
        )

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for r in self._data:
            nz = [(k, x) for k, x in enumerate(r) if x]
            out.append([sum((x * c[k] for k, x in nz), Fraction(0)) for c in ocols])
        return RatMatrix(out, cols=other.cols)

    def apply(self, v: Sequence[Fraction]) -> tuple:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(dot(r, v) for r in self._data)

    def __add__(self, other: RatMatrix) -> RatMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)], cols=self.cols
        )

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return self + (-other)

    def __neg__(self) -> RatMatrix:
        return RatMatrix([[-a for a in r] for r in self._data], cols=self.cols)

    def scale(self, c) -> RatMatrix:
        c = rat(c)
        return RatMatrix([[c * a for a in r] for r in self._data], cols=self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> RatMatrix:
        return RatMatrix([[self._data[i][j] for j in cols] for i in rows], cols=len(cols))

    def is_zero(self) -> bool:
        return all(not x for r in self._data for x in r)

    def nonzero(self):
        """Yield ``(i, j, value)`` for every nonzero entry."""
        for i, r in enumerate(self._data):
            for j, x in enumerate(r):
                if x:
                    yield i, j, x

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(rat_str(x) for x in r) for r in self._data)
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    def to_json(self) -> list[list[str]]:
        return [[rat_str(x) for x in r] for r in self._data]


def hstack(blocks: Sequence[RatMatrix]) -> RatMatrix:
    rows = blocks[0].rows
    if any(b.rows != rows for b in blocks):
        raise ValueError("hstack row mismatch")
    cols = sum(b.cols for b in blocks)
    return RatMatrix([sum((b.row(i) for b in blocks), ()) for i in range(rows)], cols=cols)


def vstack(blocks: Sequence[RatMatrix]) -> RatMatrix:
    cols = blocks[0].cols
    if any(b.cols != cols for b in blocks):
        raise ValueError("vstack column mismatch")
    return RatMatrix([b.row(i) for b in blocks for i in range(b.rows)], cols=cols)


def block_matrix(row_sizes: Sequence[int], col_sizes: Sequence[int], blocks: dict) -> RatMatrix:
    """Assemble a matrix from ``{(bi, bj): RatMatrix}``; missing blocks are zero."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    out = [[Fraction(0)] * coff[-1] for _ in range(roff[-1])]
    for (bi, bj), blk in blocks.items():
        if blk.shape != (row_sizes[bi], col_sizes[bj]):
            raise ValueError(f"block {(bi, bj)} has shape {blk.shape}")
        for i, j, x in blk.nonzero():
            out[roff[bi] + i][coff[bj] + j] += x
    return RatMatrix(out, cols=coff[-1])


# ---------------------------------------------------------------- elimination


def rref(m: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(r) for r in m.tolist()]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == len(a):
            break
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        pivot_row = a[r]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], pivot_row)]
        pivots.append(c)
        r += 1
    return RatMatrix(a, cols=m.cols), tuple(pivots)


def _integer_rank(rows: list[list[int]], cols: int) -> int:
    # fraction-free elimination; entries stay integers
    a = [r[:] for r in rows if any(r)]
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pr, pv = a[r], a[r][c]
        for i in range(r + 1, len(a)):
            f = a[i][c]
            if f:
                row = [pv * x - f * y for x, y in zip(a[i], pr)]
                g = gcd(*row)
                a[i] = [x // g for x in row] if g > 1 else row
        r += 1
        if r == len(a):
            break
    return r


def rank(m: RatMatrix) -> int:
    data = m.tolist()
    if all(x.denominator == 1 for row in data for x in row):
        return _integer_rank([[int(x) for x in row] for row in data], m.cols)
    return len(rref(m)[1])


def kernel_basis(m: RatMatrix) -> list[tuple]:
    """Basis of the right null space in reduced echelon normal form.

    The vectors are the nonzero rows of the RREF of any spanning set, so the
    output depends only on the null space itself.
    """
    r, pivots = rref(m)
    free = [j for j in range(m.cols) if j not in pivots]
    spanning = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        spanning.append(tuple(v))
    return row_space_basis(spanning, m.cols)


def row_space_basis(vectors: Sequence[Sequence[Fraction]], length: int) -> list[tuple]:
    """Canonical basis (nonzero rows of the RREF) of the span of ``vectors``."""
    if not vectors:
        return []
    r, pivots = rref(RatMatrix(vectors, cols=length))
    return [r.row(i) for i in range(len(pivots))]


def det(m: RatMatrix) -> Fraction:
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    a = m.tolist()
    n = m.rows
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        result *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * result


def inverse(m: RatMatrix) -> RatMatrix:
    n = m.rows
    if m.cols != n:
        raise ValueError("inverse of a non-square matrix")
    r, pivots = rref(hstack([m, RatMatrix.identity(n)]))
    if pivots[:n] != tuple(range(n)):
        raise ValueError("matrix is singular")
    return r.submatrix(range(n), range(n, 2 * n))


@dataclass(frozen=True)
class Cokernel:
    """``projection`` kills the column space; ``section`` is a right inverse of it.

    The complement is spanned by the standard basis vectors listed in
    ``complement``, chosen greedily in index order.
    """

    projection: RatMatrix
    section: RatMatrix
    complement: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.complement)


def cokernel(m: RatMatrix) -> Cokernel:
    n = m.rows
    # pivots of [m | I] past the first m.cols columns pick the complement
    _, pivots = rref(hstack([m, RatMatrix.identity(n)]))
    col_pivots = [p for p in pivots if p < m.cols]
    complement = tuple(p - m.cols for p in pivots if p >= m.cols)
    basis_cols = [m.col(j) for j in col_pivots]
    basis_cols += [tuple(Fraction(int(i == e)) for i in range(n)) for e in complement]
    b_inv = inverse(RatMatrix.from_columns(basis_cols, n)) if n else RatMatrix.zeros(0, 0)
    k = len(col_pivots)
    projection = b_inv.submatrix(range(k, n), range(n)) if n else RatMatrix.zeros(0, 0)
    section = RatMatrix.from_columns(
        [tuple(Fraction(int(i == e)) for i in range(n)) for e in complement], n
    ) if complement else RatMatrix.zeros(n, 0)
    return Cokernel(projection=projection, section=section, complement=complement)


def cokernel_basis(m: RatMatrix) -> tuple[RatMatrix, int]:
    c = cokernel(m)
    return c.projection, c.dim


class Infeasible(ArithmeticError):
    """A linear system that the caller expected to be solvable has no solution."""

    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


def solve_particular(
    a: RatMatrix, b: RatMatrix, support_mask: Sequence[Sequence[bool]] | None = None, free_value=0
) -> RatMatrix:
    """Solve ``a @ x == b`` with ``x`` vanishing wherever the mask is False.

    Columns of ``x`` are independent problems.  Free variables are set to
    ``free_value`` (0 gives the first-pivot echelon solution).  Raises
    :class:`Infeasible` when some column has no admissible solution.
    """
    if a.rows != b.rows:
        raise ValueError("a and b must have the same number of rows")
    n, k = a.cols, b.cols
    if support_mask is None:
        support_mask = [[True] * k for _ in range(n)]
    if len(support_mask) != n or any(len(r) != k for r in support_mask):
        raise ValueError("support mask has the wrong shape")
    free_value = rat(free_value)
    x = [[Fraction(0)] * k for _ in range(n)]
    for c in range(k):
        support = [i for i in range(n) if support_mask[i][c]]
        rhs = b.col(c)
        if not support:
            if any(rhs):
                raise Infeasible(f"column {c}: no admissible entries but rhs is nonzero", c)
            continue
        aug = hstack([a.submatrix(range(a.rows), support), RatMatrix([[v] for v in rhs], cols=1)])
        r, pivots = rref(aug)
        if pivots and pivots[-1] == len(support):
            raise Infeasible(f"column {c}: system is inconsistent", c)
        free = [j for j in range(len(support)) if j not in pivots]
        sol = [Fraction(0)] * len(support)
        for j in free:
            sol[j] = free_value
        for i, p in enumerate(pivots):
            sol[p] = r[i, len(support)] - sum((r[i, j] * free_value for j in free), Fraction(0))
        for j, i in enumerate(support):
            x[i][c] = sol[j]
    result = RatMatrix(x, cols=k)
    if a @ result != b:  # cheap insurance; should never trigger
        raise Infeasible("re-substitution failed")
    return result


# ---------------------------------------------------------------- feasibility

_RELATIONS = (">", "=", ">=")


def _normalize(coeffs: Sequence[Fraction]) -> tuple:
    return primitive(coeffs)


def _fm_eliminate(system: list[tuple[tuple, bool]]) -> list[tuple[tuple, bool]] | None:
    """Eliminate the last variable.  ``None`` signals a contradiction."""
    pos, neg, out = [], [], {}

    def add(coeffs, strict):
        coeffs = _normalize(coeffs)
        if not any(coeffs):
            return not strict  # 0 > 0 is a contradiction, 0 >= 0 is vacuous
        out[coeffs] = out.get(coeffs, False) or strict
        return True

    for coeffs, strict in system:
        last = coeffs[-1]
        if last > 0:
            pos.append((coeffs, strict))
        elif last < 0:
            neg.append((coeffs, strict))
        elif not add(coeffs[:-1], strict):
            return None
    for p, ps in pos:
        for q, qs in neg:
            lp, lq = p[-1], -q[-1]
            combo = [lq * x + lp * y for x, y in zip(p[:-1], q[:-1])]
            if not add(combo, ps or qs):
                return None
    return sorted(out.items())


def _fm_solve(system: list[tuple[tuple, bool]], d: int) -> tuple | None:
    stages = [system]
    for _ in range(d):
        nxt = _fm_eliminate(stages[-1])
        if nxt is None:
            return None
        stages.append(nxt)
    if stages[-1]:
        # zero variables left; every survivor was filtered by add(), so any
        # leftover means a constraint on nothing that add() kept, impossible
        raise AssertionError("Fourier-Motzkin left constraints on zero variables")
    z: list[Fraction] = []
    for j in range(d):
        cons = stages[d - 1 - j]  # constraints over z_0..z_j
        lo, lo_strict, hi, hi_strict = None, False, None, False
        for coeffs, strict in cons:
            c = coeffs[j]
            if not c:
                continue
            rest = dot(coeffs[:j], z)
            bound = -rest / c
            if c > 0:
                if lo is None or bound > lo or (bound == lo and strict):
                    lo, lo_strict = bound, strict
            else:
                if hi is None or bound < hi or (bound == hi and strict):
                    hi, hi_strict = bound, strict
        if lo is not None and hi is not None:
            if lo < hi:
                val = (lo + hi) / 2
            elif lo == hi and not lo_strict and not hi_strict:
                val = lo
            else:
                raise AssertionError("Fourier-Motzkin back-substitution found an empty interval")
        elif lo is not None:
            val = lo + 1
        elif hi is not None:
            val = hi - 1
        else:
            val = Fraction(0)
        z.append(val)
    return tuple(z)


def feasible_strict(constraints: Sequence[tuple[Sequence, str]], dim: int | None = None) -> tuple | None:
    """Find ``x`` with ``a.x > 0`` / ``= 0`` / ``>= 0`` for each ``(a, rel)``.

    Returns an exact witness or ``None`` if the system is infeasible.  The
    system is homogeneous, so strict constraints force ``x != 0``.  Equalities
    are eliminated by parametrising their kernel, the rest by Fourier-Motzkin;
    back-substitution takes interval midpoints, which keeps the witness in the
    relative interior of the solution cone.
    """
    rows = [(vec(a), rel) for a, rel in constraints]
    if dim is None:
        if not rows:
            raise ValueError("dim is required when there are no constraints")
        dim = len(rows[0][0])
    for a, rel in rows:
        if len(a) != dim:
            raise ValueError("constraint length does not match dimension")
        if rel not in _RELATIONS:
            raise ValueError(f"unknown relation {rel!r}")
    eqs = [a for a, rel in rows if rel == "="]
    if eqs:
        k = kernel_basis(RatMatrix(eqs, cols=dim))
    else:
        k = [tuple(Fraction(int(i == j)) for i in range(dim)) for j in range(dim)]
    d = len(k)
    ineqs = []
    for a, rel in rows:
        if rel == "=":
            continue
        ineqs.append((tuple(dot(a, kv) for kv in k), rel == ">"))
    if d == 0:
        if any(strict for _, strict in ineqs):
            return None
        return tuple(Fraction(0) for _ in range(dim))
    z = _fm_solve(ineqs, d)
    if z is None:
        return None
    x = tuple(sum((zj * kv[i] for zj, kv in zip(z, k)), Fraction(0)) for i in range(dim))
    for a, rel in rows:  # re-evaluate exactly before handing back
        v = dot(a, x)
        ok = v > 0 if rel == ">" else (v == 0 if rel == "=" else v >= 0)
        if not ok:
            raise AssertionError("feasibility witness failed re-evaluation")
    return x
