from fractions import Fraction

import pytest

from strata.arrangement import HyperplaneArrangement, enumerate_cells
from strata.intuitive import Framework, WedgeSet, witnesses
from strata.linalg import RatMatrix
from strata.pipeline import NoWitness, Pipeline, verify_main_theorem
from strata.sheaf import LocalSystemSpec, constant_sheaf, local_system


def strat(m, *normals):
    return enumerate_cells(HyperplaneArrangement(m, tuple(tuple(Fraction(x) for x in a) for a in normals)))


def coord(m):
    return enumerate_cells(HyperplaneArrangement.coordinate(m))


@pytest.fixture(scope="module")
def s0_pipe():
    fw = Framework([coord(1)])
    return Pipeline(constant_sheaf(fw.carrier, 1), fw)


def test_upper_point_boundary_value(s0_pipe):
    fw = s0_pipe.fw
    upper = WedgeSet(frozenset([fw.carrier.cell("+")]))
    lower = WedgeSet(frozenset([fw.carrier.cell("-")]))
    assert s0_pipe.boundary_value(upper, [1]) == (1,)
    assert s0_pipe.boundary_value(lower, [1]) == (1,)
    assert s0_pipe.boundary_value(upper, [0]) == (0,)


def test_whole_wedge_two_witnesses_agree(s0_pipe):
    fw = s0_pipe.fw
    whole = fw.wedges[0]
    found = witnesses(whole, fw)
    assert len(found) == 2
    values = {s0_pipe.boundary_value(whole, [1], wit) for wit in found}
    assert len(values) == 1


def test_boundary_respects_restriction(s0_pipe):
    fw = s0_pipe.fw
    q = s0_pipe.quotient
    whole = fw.wedges[0]
    upper = WedgeSet(frozenset([fw.carrier.cell("+")]))
    res = s0_pipe.model.restrict(q.sections[0], q.sections[fw.index(upper)])
    assert s0_pipe.boundary_value(whole, [1]) == s0_pipe.boundary_value(upper, res.apply([1]))


def test_bad_witness_and_missing_witness():
    a, b = coord(2), strat(2, (1, 1), (1, -1))
    fw = Framework([a, b])
    pipe = Pipeline(constant_sheaf(fw.carrier, 1), fw)
    thin = fw.add_wedge(WedgeSet(frozenset([fw.carrier.top[0]])))
    with pytest.raises(NoWitness):
        pipe.boundary_value(thin, [1])
    with pytest.raises(ValueError):
        pipe.boundary_value(thin, [1], (a, a.cell("--")))


def test_mismatched_carrier():
    fw = Framework([coord(2)])
    with pytest.raises(ValueError):
        Pipeline(constant_sheaf(strat(2, (1, 0), (0, 1), (1, 1)), 1), fw)
    with pytest.raises(ValueError):
        Pipeline(constant_sheaf(fw.carrier, 1), fw, reference=0)


@pytest.mark.parametrize(
    "case",
    ["s0_r1", "s0_r2", "orthant", "orthant_r2", "monodromy2", "swap", "s2"],
)
def test_main_theorem_cases(case):
    if case.startswith("s0"):
        fw = Framework([coord(1)])
        model = constant_sheaf(fw.carrier, 1 if case == "s0_r1" else 2)
    elif case.startswith("orthant"):
        fw = Framework([coord(2)])
        model = constant_sheaf(fw.carrier, 2 if case.endswith("r2") else 1)
    elif case == "monodromy2":
        fw = Framework([coord(2)])
        model = local_system(LocalSystemSpec(1, RatMatrix([[2]])), fw.carrier)
    elif case == "swap":
        fw = Framework([coord(2), strat(2, (1, 1), (1, -1))], depth=1)
        model = local_system(LocalSystemSpec(2, RatMatrix([[0, 1], [1, 0]])), fw.carrier)
    else:
        fw = Framework([coord(3)])
        model = constant_sheaf(fw.carrier, 1)
    rep = verify_main_theorem(model, fw)
    assert rep.passed, rep.failures()
    expected = {"s0_r1": 1, "s0_r2": 2, "orthant": 1, "orthant_r2": 2, "monodromy2": 0, "swap": 1, "s2": 1}
    assert rep.dim_intuitive == rep.dim_cokernel == expected[case]


def test_transport_and_choice_on_refined_framework():
    a = coord(2)
    fine = strat(2, (1, 0), (0, 1), (1, -1))
    finer = strat(2, (1, 0), (0, 1), (1, -1), (1, 1))
    fw = Framework([a, fine, finer])
    pipe = Pipeline(constant_sheaf(fw.carrier, 1), fw)
    assert len(fw.refinement_pairs()) == 3
    assert pipe.fhat_failures() == []
    assert pipe.theta_choice_failures() == []
    assert pipe.ill_defined() == []
    for coarse, f in fw.refinement_pairs():
        assert pipe.chain(coarse, f, "first").psi != pipe.chain(coarse, f, "last").psi


def test_reference_flip_negates_b():
    fw = Framework([coord(2)])
    model = constant_sheaf(fw.carrier, 1)
    plus, minus = Pipeline(model, fw), Pipeline(model, fw, reference=-1)
    assert minus.b_bar() == -plus.b_bar()
    assert minus.b_bar() @ minus.rho() == plus.b_bar() @ plus.rho()


def test_report_json():
    fw = Framework([coord(1)])
    rep = verify_main_theorem(constant_sheaf(fw.carrier, 1), fw).to_json()
    assert rep["passed"] and rep["dim_intuitive"] == 1
    assert all(rep["checks"].values())
