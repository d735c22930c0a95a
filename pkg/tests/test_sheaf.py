from fractions import Fraction

import pytest
import sympy

from strata.arrangement import HyperplaneArrangement, enumerate_cells
from strata.linalg import RatMatrix, rank
from strata.sheaf import (
    LocalSystemSpec,
    assemble_presentation,
    constant_sheaf,
    local_system,
    transport_around,
)
from support import sympy_rank


def coord(m):
    return enumerate_cells(HyperplaneArrangement.coordinate(m))


def cycle_coker_dim(n: int, a: list[list[int]]) -> int:
    """Cokernel of the twisted boundary of an n-cycle, built by hand in sympy."""
    r = len(a)
    eye = sympy.eye(r)
    big = sympy.zeros(r * n, r * n)
    for k in range(n):
        # vertex k joins arc k-1 (incoming) and arc k (outgoing)
        big[k * r:(k + 1) * r, k * r:(k + 1) * r] = eye
        prev = (k - 1) % n
        block = sympy.Matrix(a) if k == 0 else eye
        big[prev * r:(prev + 1) * r, k * r:(k + 1) * r] = -block
    return r * n - big.rank()


def test_constant_rank_one_spaces():
    s = coord(2)
    model = constant_sheaf(s, 1)
    assert model.functoriality_defects() == []
    for c in s.cells:
        assert model.cell_sections(s, c).dim == 1
    assert model.sections([s.cell("++"), s.cell("--")]).dim == 2
    assert model.whole().dim == 1


def test_whole_on_s0_is_diagonal():
    s = coord(1)
    for r in (1, 2):
        w = constant_sheaf(s, r).whole()
        assert w.dim == r and w.basis.rows == 2 * r


def test_circle_presentation_matches_rank_oracle():
    s = coord(2)
    p = assemble_presentation(constant_sheaf(s, 1), s)
    assert p.matrix.shape == (4, 4)
    assert sympy_rank(p.matrix.tolist()) == 3 == rank(p.matrix)
    assert p.dim == 1


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("r", [1, 2])
def test_constant_cokernel_is_rank(m, r):
    s = coord(m)
    p = assemble_presentation(constant_sheaf(s, r), s)
    assert p.dim == r
    assert p.matrix.rows - sympy_rank(p.matrix.tolist()) == r


def test_identity_monodromy_is_constant():
    s = coord(2)
    ls = local_system(LocalSystemSpec(2, RatMatrix.identity(2)), s)
    assert assemble_presentation(ls, s).dim == assemble_presentation(constant_sheaf(s, 2), s).dim


def test_monodromy_two():
    s = coord(2)
    ls = local_system(LocalSystemSpec(1, RatMatrix([[2]])), s)
    assert ls.functoriality_defects() == []
    assert transport_around(ls) == RatMatrix([[2]])
    p = assemble_presentation(ls, s)
    assert cycle_coker_dim(4, [[2]]) == 0
    assert p.dim == 0 and sympy_rank(p.matrix.tolist()) == 4


@pytest.mark.parametrize(
    "a,expected",
    [([[0, 1], [1, 0]], 1), ([[1, 1], [0, 1]], 1), ([[-1, 0], [0, -1]], 0), ([[1, 0], [0, 1]], 2)],
)
def test_rank_two_monodromy_against_cycle_oracle(a, expected):
    s = enumerate_cells(HyperplaneArrangement(2, ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(1), Fraction(1)))))
    assert cycle_coker_dim(len(s.top), a) == expected
    ls = local_system(LocalSystemSpec(2, RatMatrix(a)), s)
    assert transport_around(ls) == RatMatrix(a)
    assert assemble_presentation(ls, s).dim == expected


def test_local_system_errors():
    with pytest.raises(ValueError):
        LocalSystemSpec(1, RatMatrix([[0]]))
    with pytest.raises(ValueError):
        local_system(LocalSystemSpec(1, RatMatrix([[2]])), coord(3))
    with pytest.raises(ValueError):
        constant_sheaf(coord(2), 0)


def test_presentation_on_coarser_stratification():
    fine = enumerate_cells(HyperplaneArrangement(2, ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(1), Fraction(-1)))))
    model = constant_sheaf(fine, 1)
    p = assemble_presentation(model, coord(2))
    assert p.dim == 1
    with pytest.raises(ValueError):
        assemble_presentation(constant_sheaf(coord(2), 1), fine)
