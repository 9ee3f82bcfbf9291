"""Multiplicative gerbes over finite groups: circle-valued group cohomology,
central extensions, the fibrewise dual gerbe and its invariants."""

from .circle import BilinearForm, Character, CircleValue, dual_group
from .cochain import (
    ActionGroupoid,
    Cochain,
    Group,
    classes_equal,
    cohomology_group,
    delta,
    is_cocycle,
    solve_coboundary,
)
from .crossmod import finite_fiber_pair, validate_crossed_module
from .duality import (
    build_explicit_pair,
    double_dual_check,
    dual_gerbe,
    extract_dual_extension,
    make_duality_input,
    omega_membership,
)
from .errors import GerbeError, InputError, NoSolutionAtLevel, WitnessError
from .gerbe import canonical_representation, make_gerbe, representation_exists
from .group import (
    CentralExtensionData,
    FiniteAbelianGroup,
    FiniteGroup,
    abelian_group,
    central_extension,
    cyclic_group,
    make_group_from_permutations,
    make_group_from_table,
    quotient_by_central,
)
from .spectral import e2_page, fiber_restriction

__all__ = [
    "ActionGroupoid",
    "BilinearForm",
    "CentralExtensionData",
    "Character",
    "CircleValue",
    "Cochain",
    "FiniteAbelianGroup",
    "FiniteGroup",
    "GerbeError",
    "Group",
    "InputError",
    "NoSolutionAtLevel",
    "WitnessError",
    "abelian_group",
    "build_explicit_pair",
    "canonical_representation",
    "central_extension",
    "classes_equal",
    "cohomology_group",
    "cyclic_group",
    "delta",
    "double_dual_check",
    "dual_gerbe",
    "dual_group",
    "e2_page",
    "extract_dual_extension",
    "fiber_restriction",
    "finite_fiber_pair",
    "is_cocycle",
    "make_duality_input",
    "make_gerbe",
    "make_group_from_permutations",
    "make_group_from_table",
    "omega_membership",
    "quotient_by_central",
    "representation_exists",
    "solve_coboundary",
    "validate_crossed_module",
]
