"""One test per acceptance criterion, each timed against its budget.

Every test records a ``PASS``/``FAIL`` line; the terminal summary prints them.
"""

import time

import numpy as np

from conftest import dihedral8, order8_extensions, quaternion8, symmetric3
from oracles import abelian_order_profile, circle_cohomology, cyclic, h2_with_coefficients, isomorphic, product
from sweeps import BASES, SweepStats, abelian_groups_up_to, base_group, explicit_sweep, trivial_gerbe_duality

from gerbes.circle import BilinearForm
from gerbes.cochain import (
    AbelianCochain,
    ActionGroupoid,
    Cochain,
    Group,
    KValuedCochain,
    abelian_classes,
    classes_equal,
    cohomology_group,
    d_K,
    delta,
    delta_inner,
    pullback,
    solve_coboundary,
)
from gerbes.crossmod import finite_fiber_pair, validate_crossed_module
from gerbes.duality import double_dual_check, make_duality_input
from gerbes.gerbe import canonical_representation, make_gerbe, point_action, representation_exists
from gerbes.group import (
    CentralExtensionData,
    FiniteAbelianGroup,
    abelian_group,
    abelian_invariants,
    central_extension,
    cyclic_group,
    quotient_by_central,
)

RESULTS = {}


def record(number, title, ok, elapsed, budget=None, detail=""):
    within = budget is None or elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    limit = f" (budget {budget:g} s)" if budget is not None else ""
    line = f"criterion {number} {status}: {title} in {elapsed:.2f} s{limit}"
    if detail:
        line += f"; {detail}"
    RESULTS[number] = line
    print(line)
    assert ok, line
    assert within, line


def test_criterion_1_cohomology_oracle():
    t = time.perf_counter()
    table = cyclic(2)
    got = [list(cohomology_group(cyclic_group(2), n).factors) for n in (1, 2, 3)]
    oracle = [circle_cohomology(table, n, 4) for n in (1, 2, 3)]
    ok = got == [[2], [], [2]] and all(abelian_order_profile(f) == o for f, o in zip(got, oracle))
    record(1, "H^n(Z/2) for n = 1, 2, 3 against enumeration", ok, time.perf_counter() - t, 5, f"factors {got}")


def test_criterion_2_extension_classes():
    t = time.perf_counter()
    S, K = FiniteAbelianGroup([2]), cyclic_group(2)
    classes = abelian_classes(K, S)
    ok = len(classes) == 2 == h2_with_coefficients(cyclic(2), [2])
    shapes = []
    for F in classes:
        G, iota, _, _ = central_extension(CentralExtensionData(S, K, F.values))
        shapes.append("Z4" if isomorphic(G.table.tolist(), cyclic(4)) else
                      "Z2xZ2" if isomorphic(G.table.tolist(), product(cyclic(2), cyclic(2))) else "?")
        q = quotient_by_central(G, iota.image, (S, iota.image))
        back = AbelianCochain(Group(q.K), 2, S, q.F)
        ok = ok and np.array_equal(q.K.table, K.table) and classes_equal(back, F)
    ok = ok and sorted(shapes) == ["Z2xZ2", "Z4"]
    record(2, "central extensions of Z/2 by Z/2", ok, time.perf_counter() - t, 1, f"groups {sorted(shapes)}")


def test_criterion_3_classical_duality():
    t = time.perf_counter()
    bad = []
    lists = abelian_groups_up_to(16)
    for factors in lists:
        S = FiniteAbelianGroup(factors)
        G = S.as_group()
        inp = make_duality_input(make_gerbe(G), range(G.order), (S, np.arange(G.order)))
        try:
            report = double_dual_check(inp)
        except Exception as exc:  # recorded, then reported as a failure
            bad.append((factors, type(exc).__name__))
            continue
        dual_factors = abelian_invariants(report.dual.G_hat)[0].factors
        if dual_factors != S.factors or not report.classes["alpha_hat_trivial"]:
            bad.append((factors, dual_factors))
    record(3, f"dual of <S, 0> for all {len(lists)} abelian S with |S| <= 16", not bad,
           time.perf_counter() - t, 30, f"failures {bad}" if bad else "")


def test_criterion_4_trivial_gerbes():
    t = time.perf_counter()
    cases = order8_extensions()
    nonabelian = {G.census() for G, *_ in cases if not G.is_abelian()}
    ok = len(nonabelian) == 2
    bad = []
    for i, (G, S_el, K, F) in enumerate(cases):
        checks = trivial_gerbe_duality(G, S_el, K, F)
        if not all(checks.values()):
            bad.append((i, [k for k, v in checks.items() if not v]))
    record(4, f"duals of trivial gerbes over {len(cases)} extensions of order 8", ok and not bad,
           time.perf_counter() - t, 300, f"failures {bad}" if bad else "")


def test_criterion_5_explicit_formula():
    t = time.perf_counter()
    stats = SweepStats()
    for s_name, factors in BASES.items():
        for k_name in BASES:
            explicit_sweep([] if factors == [1] else factors, base_group(k_name), 3, stats=stats)
    detail = (f"{stats.pairs} class pairs, {stats.compatible} compatible, {stats.samples} samples, "
              f"{stats.cocycle_ok} cocycle pairs, {stats.f_hat_recovered} F_hat recovered")
    ok = stats.ok and stats.samples >= 3 * stats.compatible
    record(5, "explicit formula sweep for |S|, |K| <= 4", ok, time.perf_counter() - t, 600, detail)


def test_criterion_6_double_dual():
    t = time.perf_counter()
    stats = explicit_sweep([2], cyclic_group(2), 3, double=True)
    ok = not stats.failures and stats.double_dual_ok == stats.double_dual_run == stats.samples > 0
    record(6, "double dual on the |S| = |K| = 2 sweep", ok, time.perf_counter() - t, None,
           f"{stats.double_dual_ok}/{stats.samples} round trips")


def test_criterion_7_crossed_modules():
    t = time.perf_counter()
    G = dihedral8()
    b = BilinearForm(FiniteAbelianGroup([2]), (("1/2",),))
    pair = finite_fiber_pair(G, G.center, b)
    ok = bool(validate_crossed_module(pair.X1)) and bool(validate_crossed_module(pair.X2))
    ok = ok and pair.pi0_iso_G.is_bijective() and pair.pi0_iso_G.is_homomorphism()
    ok = ok and pair.pi0_iso_SK.is_bijective() and pair.pi0_iso_SK.is_homomorphism()
    ok = ok and pair.S_times_K.census() == abelian_group([2, 2, 2]).census()
    ok = ok and pair.seq1.pi1.factors == pair.seq2.pi1.factors == (2,)
    ok = ok and pair.non_isomorphic
    record(7, "crossed module pair for the dihedral group of order 8", ok, time.perf_counter() - t, 10)


def groups_up_to_eight():
    out = [cyclic_group(n) for n in range(1, 9)]
    out += [abelian_group([2, 2]), abelian_group([2, 4]), abelian_group([2, 2, 2])]
    out += [symmetric3(), dihedral8(), quaternion8()]
    return out


def test_criterion_8_representation_criterion():
    t = time.perf_counter()
    bad = []
    groups = groups_up_to_eight()
    total = 0
    for G in groups:
        gens = cohomology_group(G, 3).generators
        alphas = [Cochain.zero(Group(G), 3)] + gens + ([gens[0] + gens[-1]] if len(gens) > 1 else [])
        for alpha in alphas:
            total += 1
            gerbe = make_gerbe(G, alpha)
            if not canonical_representation(gerbe).check():
                bad.append((G.order, "canonical"))
            trivial = classes_equal(gerbe.alpha, Cochain.zero(Group(G), 3))
            exists = representation_exists(gerbe, point_action(G)) is not None
            if exists != trivial:
                bad.append((G.order, "point"))
    record(8, f"representation criterion on {total} gerbes over {len(groups)} groups", not bad,
           time.perf_counter() - t, 120, f"failures {bad}" if bad else "")


def test_criterion_9_differential_algebra():
    from test_cochain import HOMS, SMALL_GROUPS, TRANSLATIONS, coset_action, subgroups, translation

    t = time.perf_counter()
    failures = 0
    checks = 0
    for name, G in SMALL_GROUPS.items():
        base = Group(G)
        for seed in range(3):
            rng = np.random.default_rng(seed)
            for n in range(3):
                f = Cochain(base, n, rng.integers(0, 12, size=base.shape(n)), 12)
                checks += 1
                failures += not delta(delta(f)).is_zero()
                if G.order ** (n + 1) <= 300:
                    c = delta(f)
                    checks += 1
                    failures += delta(solve_coboundary(c)) != c
        for H in subgroups(G):
            act = coset_action(G, H)
            groupoid = ActionGroupoid(len(act), G, act)
            for n in range(2):
                rng = np.random.default_rng(n)
                f = Cochain(groupoid, n, rng.integers(0, 6, size=groupoid.shape(n)), 6)
                checks += 2
                failures += not delta(delta(f)).is_zero()
                c = delta(f)
                failures += delta(solve_coboundary(c)) != c
    for G, S in TRANSLATIONS:
        K, groupoid = translation(G, S)
        for outer in range(2):
            for inner in range(2):
                rng = np.random.default_rng(outer * 2 + inner)
                shape = (K.order,) * outer + groupoid.shape(inner)
                F = KValuedCochain(K, outer, groupoid, inner, rng.integers(0, 12, size=shape), 12)
                checks += 3
                failures += not d_K(d_K(F)).is_zero()
                failures += not delta_inner(delta_inner(F)).is_zero()
                failures += not (d_K(delta_inner(F)) - delta_inner(d_K(F))).is_zero()
    for i, phi in enumerate(HOMS):
        rng = np.random.default_rng(i)
        for n in range(3):
            base = Group(phi.target)
            f = Cochain(base, n, rng.integers(0, 6, size=base.shape(n)), 6)
            checks += 1
            failures += pullback(delta(f), phi) != delta(pullback(f, phi))
    record(9, "differential algebra suite", failures == 0, time.perf_counter() - t, None,
           f"{checks} checks, {failures} failures")
