import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import order8_extensions
from sweeps import BASES, base_group, explicit_sweep, trivial_gerbe_duality

from gerbes.circle import dual_group
from gerbes.cochain import (
    AbelianCochain,
    Cochain,
    Group,
    abelian_classes,
    classes_equal,
    cohomology_group,
    delta,
)
from gerbes.duality import (
    ExplicitFormulaData,
    build_explicit_pair,
    compatible_epsilon,
    cup_pairing,
    double_dual_check,
    dual_gerbe,
    explicit_input,
    extension_comparison,
    extract_dual_extension,
    in_omega,
    make_duality_input,
    omega_membership,
)
from gerbes.errors import ComparisonNotIso, CompatibilityFailed, NoSolutionAtLevel
from gerbes.gerbe import make_gerbe
from gerbes.group import FiniteAbelianGroup, abelian_invariants, cyclic_group


@pytest.mark.parametrize("factors", [[2], [3], [4], [2, 2], [6], [2, 4]])
def test_classical_duality(factors):
    S = FiniteAbelianGroup(factors)
    G = S.as_group()
    inp = make_duality_input(make_gerbe(G), range(G.order), (S, np.arange(G.order)))
    report = double_dual_check(inp)
    dual = report.dual
    assert abelian_invariants(dual.G_hat)[0].factors == S.factors
    assert report.classes["alpha_hat_trivial"]
    assert report.comparison.is_bijective()


def test_omega_rejects_class_nontrivial_on_fibre():
    G = cyclic_group(2)
    gerbe = make_gerbe(G, cohomology_group(G, 3).generators[0])
    inp = make_duality_input(gerbe, [0, 1])
    with pytest.raises(NoSolutionAtLevel) as exc:
        omega_membership(inp)
    assert exc.value.stage == "beta"
    assert not in_omega(inp)


def test_omega_witness_checks(d8):
    inp = make_duality_input(make_gerbe(d8), d8.center)
    witness = omega_membership(inp)
    assert witness.check(inp)
    bad = type(witness)(witness.beta + _bump(witness.beta), witness.gamma)
    assert not bad.check(inp)


def _bump(beta):
    num = np.zeros_like(beta.num)
    num[(0,) + (1,) * (num.ndim - 1)] = 1
    return Cochain(beta.base, beta.degree, num, 4)


@pytest.mark.parametrize("case", range(10))
def test_trivial_gerbes_are_mutually_dual(case):
    G, S_el, K, F = order8_extensions()[case]
    checks = trivial_gerbe_duality(G, S_el, K, F)
    assert all(checks.values()), checks


def test_dual_of_d8_has_nontrivial_class(d8):
    inp = make_duality_input(make_gerbe(d8), d8.center)
    dual = dual_gerbe(inp)
    assert dual.G_hat.order == 8 and dual.G_hat.is_abelian()
    assert not classes_equal(dual.alpha_hat, Cochain.zero(Group(dual.G_hat), 3))


SMALL = [(s, k) for s in BASES for k in BASES if (s, k) != ("Z2xZ2", "Z2xZ2")]


@pytest.mark.parametrize("s_name, k_name", SMALL)
def test_explicit_formula_sweep(s_name, k_name):
    factors = [] if BASES[s_name] == [1] else BASES[s_name]
    stats = explicit_sweep(factors, base_group(k_name))
    assert stats.compatible >= 1
    assert stats.ok, stats.failures[:3]


def test_double_dual_on_smallest_sweep():
    stats = explicit_sweep([2], cyclic_group(2), double=True)
    assert stats.double_dual_run == stats.samples == 12
    assert stats.double_dual_ok == stats.double_dual_run and not stats.failures


def test_incompatible_pair_has_no_epsilon():
    S = FiniteAbelianGroup([2])
    K = base_group("Z2xZ2")
    S_hat, _ = dual_group(S)
    found = 0
    for F in abelian_classes(K, S):
        for Fh in abelian_classes(K, S_hat):
            if compatible_epsilon(S, F, Fh) is None:
                found += 1
                eps = Cochain.zero(Group(K), 3)
                with pytest.raises(CompatibilityFailed):
                    build_explicit_pair(ExplicitFormulaData(S, K, F, Fh, eps))
    assert found == 64 - 28


def test_cup_pairing_vanishes_against_zero():
    S = FiniteAbelianGroup([2, 2])
    K = cyclic_group(4)
    S_hat, _ = dual_group(S)
    zero = AbelianCochain.zero(Group(K), 2, S_hat)
    for F in abelian_classes(K, S):
        assert cup_pairing(S, F, zero).is_zero()


@given(st.lists(st.integers(0, 7), min_size=9, max_size=9))
def test_epsilon_shift_by_coboundary_keeps_dual_class(entries):
    S = FiniteAbelianGroup([2])
    K = cyclic_group(4)
    S_hat, _ = dual_group(S)
    F = abelian_classes(K, S)[1]
    Fh = abelian_classes(K, S_hat)[1]
    eps0 = compatible_epsilon(S, F, Fh)
    r = np.zeros((4, 4), dtype=np.int64)
    r[1:, 1:] = np.reshape(entries, (3, 3))
    eps = eps0 + delta(Cochain(Group(K), 2, r, 8))
    data = ExplicitFormulaData(S, K, F, Fh, eps)
    gerbe, _ = build_explicit_pair(data)
    inp = explicit_input(data, gerbe)
    ext = extract_dual_extension(inp, omega_membership(inp))
    assert classes_equal(ext.F_hat, Fh)


def test_extension_comparison():
    S = FiniteAbelianGroup([2])
    K = cyclic_group(2)
    F0 = np.zeros((2, 2, 1), dtype=np.int64)
    F1 = F0.copy()
    F1[1, 1] = 1
    with pytest.raises(ComparisonNotIso):
        extension_comparison(S, K, F0, F1)
    # a coboundary shift of the trivial class
    c = np.array([[0], [1]])
    dc = (c[:, None] + c[None, :] - c[K.table]) % 2
    comp = extension_comparison(S, K, F0, dc)
    assert comp.map.is_homomorphism() and comp.map.is_bijective()
