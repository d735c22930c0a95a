"""Orientation frames, incidence numbers and the top-cell twist signs."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .arrangement import Cell, _constant_sign, enumerate_cells, face
from .linalg import RatMatrix, det, kernel_basis, rank, rref

Frame = tuple  # tuple of vectors


def cell_span(cell: Cell) -> list[tuple]:
    """Canonical basis of the linear span of the closed cone over ``cell``."""
    arr = cell.arrangement
    zero_rows = [a for a, s in zip(arr.normals, cell.signs) if s == 0]
    if not zero_rows:
        return [tuple(Fraction(int(i == j)) for j in range(arr.m)) for i in range(arr.m)]
    return kernel_basis(RatMatrix(zero_rows, cols=arr.m))


def canonical_frame(cell: Cell) -> Frame:
    """Interior ray first, then span vectors greedily completing a basis."""
    if cell.is_empty:
        raise ValueError("the empty cell has no frame")
    frame = [tuple(Fraction(x) for x in cell.point)]
    for b in cell_span(cell):
        if len(frame) == cell.dim + 1:
            break
        if rank(RatMatrix(frame + [b])) == len(frame) + 1:
            frame.append(b)
    return tuple(frame)


def flip_frame(frame: Frame) -> Frame:
    """Reverse orientation by negating the last vector."""
    *head, last = frame
    return tuple(head) + (tuple(-x for x in last),)


def orientation_sign(f1: Sequence, f2: Sequence) -> int:
    """+1 if two bases of the same subspace induce the same orientation."""
    k = len(f1)
    if len(f2) != k:
        raise ValueError("frames of different lengths")
    if k == 0:
        return 1
    m1 = RatMatrix(list(f1))
    _, pivots = rref(m1)
    if len(pivots) != k or rank(RatMatrix(list(f1) + list(f2))) != k:
        raise ValueError("frames do not span the same subspace")
    d1 = det(m1.submatrix(range(k), pivots))
    d2 = det(RatMatrix(list(f2)).submatrix(range(k), pivots))
    return 1 if (d1 > 0) == (d2 > 0) else -1


def incidence_coface(sigma: Cell, tau: Cell) -> int:
    """Incidence of a codimension-one face: outward vector, then face frame."""
    if sigma.is_empty or tau.is_empty:
        raise ValueError("incidence with the empty cell is fixed by convention")
    if tau.dim != sigma.dim + 1:
        raise ValueError(f"dimension mismatch: {sigma.dim} vs {tau.dim}")
    if not face(sigma, tau):
        raise ValueError(f"{sigma.label} is not a face of {tau.label}")
    v_out = tuple(a - b for a, b in zip(sigma.point, tau.point))
    return orientation_sign((v_out,) + tuple(sigma.frame), tau.frame)


def incidence_same_dim(sigma: Cell, tau: Cell) -> int:
    """Compare frames of nested cells of equal dimension (any arrangements)."""
    if sigma.dim != tau.dim:
        raise ValueError("cells of different dimensions")
    if sigma == tau:
        return 1
    if not (_nested(sigma, tau) or _nested(tau, sigma)):
        raise ValueError(f"{sigma.label} and {tau.label} are not nested")
    return orientation_sign(sigma.frame, tau.frame)


def _nested(inner: Cell, outer: Cell) -> bool:
    """Whether ``inner`` (a cell of any arrangement) lies inside ``outer``."""
    return enumerate_cells(outer.arrangement).locate(inner.point) == outer and all(
        _constant_sign(inner, a) for a in outer.arrangement.normals
    )


def a_one(sigma: Cell, reference: int = 1) -> int:
    """Sign of the top-cell frame against the standard orientation of R^m."""
    if sigma.is_empty or sigma.dim != sigma.arrangement.m - 1:
        raise ValueError("a_one is defined on top cells only")
    d = det(RatMatrix(list(sigma.frame)))
    return reference * (1 if d > 0 else -1)


def twist_table(cells, reference: int = 1) -> dict[Cell, int]:
    return {c: a_one(c, reference) for c in cells}
