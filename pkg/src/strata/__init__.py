"""Exact computations on hyperplane stratifications of spheres, their oriented
cochain complexes, and boundary values of locally constant sheaf models."""

from .arrangement import (
    Cell,
    ConeSet,
    HyperplaneArrangement,
    StarSet,
    Stratification,
    common_refinement,
    cone_set,
    enumerate_cells,
    face,
    is_refinement,
    meet,
    star,
)
from .cochain import AtCell, AtM, build_complex, duality_check, verify_complex, verify_exactness
from .intuitive import Framework, WedgeSet, build_quotient, check_W2, check_W3
from .orientation import a_one, canonical_frame, incidence_coface, incidence_same_dim
from .pipeline import NoWitness, Pipeline, verify_main_theorem
from .refinement import InfeasibleLift, check_difference_acyclic, choose_psi, extend_theta
from .sheaf import LocalSystemSpec, SheafModel, assemble_presentation, constant_sheaf, local_system

__all__ = [
    "AtCell",
    "AtM",
    "Cell",
    "ConeSet",
    "Framework",
    "HyperplaneArrangement",
    "InfeasibleLift",
    "LocalSystemSpec",
    "NoWitness",
    "Pipeline",
    "SheafModel",
    "StarSet",
    "Stratification",
    "WedgeSet",
    "a_one",
    "assemble_presentation",
    "build_complex",
    "build_quotient",
    "canonical_frame",
    "check_W2",
    "check_W3",
    "check_difference_acyclic",
    "choose_psi",
    "common_refinement",
    "cone_set",
    "constant_sheaf",
    "duality_check",
    "enumerate_cells",
    "extend_theta",
    "face",
    "incidence_coface",
    "incidence_same_dim",
    "is_refinement",
    "local_system",
    "meet",
    "star",
    "verify_complex",
    "verify_exactness",
    "verify_main_theorem",
]
