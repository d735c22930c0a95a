"""Shared test data and independent oracles.

The oracles deliberately avoid the package's own elimination and
feasibility code: ranks come from sympy, cell enumeration from scipy's LP.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
import sympy
from scipy.optimize import linprog

from strata.arrangement import HyperplaneArrangement, _direction_key, enumerate_cells

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def sympy_rank(rows) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(str(x)) for x in r] for r in rows]).rank()


def random_arrangement(rng: random.Random, m: int, n: int) -> HyperplaneArrangement:
    """Essential arrangement with distinct normals, entries p/q with |p| <= 3, q <= 3."""
    while True:
        normals, keys = [], set()
        while len(normals) < n:
            a = tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(m))
            if not any(a) or _direction_key(a) in keys:
                continue
            keys.add(_direction_key(a))
            normals.append(a)
        if sympy_rank(normals) == m:
            return HyperplaneArrangement(m, tuple(normals))


@lru_cache(maxsize=None)
def random_suite(seed: int = 20240601, count: int = 20) -> tuple:
    rng = random.Random(seed)
    out = []
    for i in range(count):
        # one S^0 case, then alternate between S^1 and S^2
        m = 1 if i == 0 else 2 + i % 2
        n = m if m == 1 else rng.randint(m, 5)
        out.append(random_arrangement(rng, m, n))
    return tuple(out)


def coordinate_suite() -> tuple:
    return tuple(HyperplaneArrangement.coordinate(m) for m in (1, 2, 3))


def all_arrangements() -> tuple:
    return coordinate_suite() + random_suite()


def refinement_pairs() -> list[tuple]:
    """Coarse arrangements with one or two extra hyperplanes added."""
    base2 = [[1, 0], [0, 1]]
    base3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    specs = [
        (2, base2, [[1, -1]]),
        (2, base2, [[1, 1], [1, -1]]),
        (2, [[1, 2], [3, -1]], [[1, 0]]),
        (3, base3, [[1, 1, 1]]),
        (3, base3, [[1, -1, 0], [0, 1, -1]]),
        (3, [[1, 1, 0], [0, 1, 1], [1, 0, 1]], [[1, 0, 0]]),
    ]
    out = []
    for m, coarse, extra in specs:
        a = enumerate_cells(HyperplaneArrangement(m, tuple(map(tuple, coarse))))
        b = enumerate_cells(HyperplaneArrangement(m, tuple(map(tuple, coarse + extra))))
        out.append((a, b))
    return out


def lp_cells(normals, m: int) -> set[tuple[int, ...]]:
    """Sign vectors with a nonempty open cone, by brute force over {-,0,+}^n.

    Each candidate is tested with a floating LP that maximizes a uniform
    slack inside the box [-1, 1]^m; integer data keeps the margin large.
    """
    normals = [list(map(float, a)) for a in normals]
    found = set()
    for signs in itertools.product((1, -1, 0), repeat=len(normals)):
        if not any(signs):
            continue
        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        for a, s in zip(normals, signs):
            if s:
                a_ub.append([-s * x for x in a] + [1.0])
                b_ub.append(0.0)
            else:
                a_eq.append(a + [0.0])
                b_eq.append(0.0)
        res = linprog(
            c=[0.0] * m + [-1.0],
            A_ub=np.array(a_ub) if a_ub else None,
            b_ub=b_ub or None,
            A_eq=np.array(a_eq) if a_eq else None,
            b_eq=b_eq or None,
            bounds=[(-1, 1)] * m + [(0, 1)],
            method="highs",
        )
        if res.status == 0 and -res.fun > 1e-7:
            found.add(signs)
    return found


def lp_cell_dim(normals, signs, m: int) -> int:
    zero_rows = [a for a, s in zip(normals, signs) if s == 0]
    return m - sympy_rank(zero_rows) - 1
