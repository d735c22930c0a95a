import pytest

from strata.arrangement import HyperplaneArrangement, enumerate_cells
from strata.cochain import (
    AtCell,
    AtM,
    GradedComplex,
    build_complex,
    complex_defects,
    contexts,
    duality_check,
    homology,
    restricted_cells,
    verify_complex,
    verify_exactness,
)
from strata.linalg import RatMatrix
from support import all_arrangements, sympy_rank


def coord(m):
    return enumerate_cells(HyperplaneArrangement.coordinate(m))


def test_restricted_cells_examples():
    s = coord(2)
    assert restricted_cells(s, AtM(), 1) == list(s.of_dim(1))
    assert restricted_cells(s, AtCell(s.cell("++")), 1) == [s.cell("++")]
    assert {c.label for c in restricted_cells(s, AtCell(s.cell("0+")), 1)} == {"++", "-+"}


def test_s0_complex():
    c = build_complex(coord(1), AtM())
    assert c.d[-1] == RatMatrix([[1], [1]])
    assert c.d[0] == RatMatrix([[1, -1]])
    assert c.bases[1] == ("M",)


def test_circle_complex_shapes():
    s = coord(2)
    c = build_complex(s, AtM())
    assert [len(c.bases[j]) for j in (-2, -1, 0, 1)] == [1, 4, 4, 1]
    assert c.d[0].shape == (1, 4)
    assert all(abs(x) == 1 for x in c.d[0].tolist()[0])
    for delta in s.top:
        cd = build_complex(s, AtCell(delta))
        assert len(cd.bases[0]) == 1 and cd.bases[1] == ()
        assert verify_exactness(cd).exact


def test_complexes_hold_with_sympy_ranks():
    # exactness recomputed with an independent rank oracle
    for a in all_arrangements()[:8]:
        s = enumerate_cells(a)
        for ctx in contexts(s):
            c = build_complex(s, ctx)
            assert verify_complex(c)
            for j in c.degrees:
                out = sympy_rank(c.d[j].tolist()) if c.bases[j + 1] else 0
                inc = sympy_rank(c.d[j - 1].tolist()) if j > -c.m else 0
                assert len(c.bases[j]) - out - inc == 0


def test_unaugmented_top_slot_is_one_dimensional():
    for m in (1, 2, 3):
        h = homology(build_complex(coord(m), AtM()), augmented=False)
        assert h[0] == 1


def test_dropping_a_vertex_breaks_exactness():
    s = coord(2)
    c = build_complex(s, AtM())
    bases = dict(c.bases)
    bases[-1] = c.bases[-1][1:]
    d = dict(c.d)
    d[-2] = RatMatrix(c.d[-2].tolist()[1:], cols=1)
    d[-1] = RatMatrix([row[1:] for row in c.d[-1].tolist()], cols=3)
    broken = GradedComplex(c.m, c.ctx, bases, d)
    # each arc next to the missing vertex now has a lone boundary term
    assert not verify_complex(broken)
    with pytest.raises(ValueError):
        verify_exactness(broken)


def test_corruption_is_located():
    s = coord(2)
    c = build_complex(s, AtM(), corrupt=[(s.cell("0+"), s.cell("++"))])
    bad = complex_defects(c)
    # both products touching the flipped entry fail, at the flipped cells
    assert bad == [(-2, "++", "X"), (-1, "M", "0+")]


def test_duality_and_unsigned_control():
    for m in (1, 2, 3):
        s = coord(m)
        for ctx in contexts(s):
            assert duality_check(s, ctx)
    for m in (2, 3):
        assert not duality_check(coord(m), AtM(), signed=False)


def test_non_essential_rejected():
    s = enumerate_cells(HyperplaneArrangement(2, (((1), (0)),)))
    with pytest.raises(ValueError):
        build_complex(s, AtM())


def test_reference_flip_negates_last_map():
    s = coord(3)
    assert build_complex(s, AtM(), reference=-1).d[0] == -build_complex(s, AtM()).d[0]


def test_report_shape():
    rep = build_complex(coord(2), AtM()).to_json()
    assert rep["context"] == "AtM"
    assert [e["degree"] for e in rep["degrees"]] == [-2, -1, 0]
    assert all(v == 0 for v in rep["homology"].values())
