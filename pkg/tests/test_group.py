import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import cyclic, element_orders, extension_table, isomorphic, product

from gerbes.errors import (
    InputError,
    NoIdentity,
    NotACocycle,
    NotAbelian,
    NotAssociative,
    NotCentral,
    NotInvertible,
    NotSubgroup,
    OrderLimitExceeded,
)
from gerbes.config import settings
from gerbes.group import (
    CentralExtensionData,
    FiniteAbelianGroup,
    FiniteGroup,
    GroupHom,
    abelian_group,
    abelian_invariants,
    central_extension,
    cyclic_group,
    direct_product,
    make_group_from_permutations,
    make_group_from_table,
    quotient_by_central,
    quotient_group,
    subgroup,
)


def test_trivial_group():
    G, perm = make_group_from_table([[0]])
    assert G.order == 1 and G.exponent == 1 and list(perm) == [0]


def test_relabels_identity_to_zero():
    # Z/3 written with the identity at position 2
    table = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
    G, perm = make_group_from_table(table)
    assert perm[2] == 0
    assert np.array_equal(G.table[0], np.arange(3))
    for x in range(3):
        for y in range(3):
            assert G.table[perm[x], perm[y]] == perm[table[x][y]]


@pytest.mark.parametrize(
    "table, error",
    [
        ([[0, 1], [1, 1]], NotInvertible),
        ([[1, 0], [0, 1]], None),  # identity at 1: valid after relabelling
        ([[0, 1, 2], [1, 0, 0], [2, 0, 1]], NotInvertible),
        ([[0, 1], [0, 1]], NoIdentity),
        ([[0, 1, 2], [1, 2, 0]], InputError),
    ],
)
def test_table_validation(table, error):
    if error is None:
        make_group_from_table(table)
    else:
        with pytest.raises(error):
            make_group_from_table(table)


def test_non_associative_table_reports_triple():
    # a Latin square with identity that is not associative (order 5 loop)
    table = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(NotAssociative) as exc:
        make_group_from_table(table)
    x, y, z = exc.value.witness
    t = table
    assert t[t[x][y]][z] != t[x][t[y][z]]


def test_order_cap():
    with settings(max_order=5):
        with pytest.raises(OrderLimitExceeded):
            make_group_from_permutations(4, [[1, 2, 3, 0], [1, 0, 2, 3]])


def test_cyclic_six_has_single_factor():
    A, iso = abelian_invariants(cyclic_group(6))
    assert A.factors == (6,)
    assert sorted(iso.tolist()) == list(range(6))


@pytest.mark.parametrize("orders", [[2, 2], [2, 4], [4, 6], [3, 5], [2, 2, 2]])
def test_abelian_invariants_is_isomorphism(orders):
    table = cyclic(orders[0])
    for d in orders[1:]:
        table = product(table, cyclic(d))
    G = FiniteGroup(table)
    A, iso = abelian_invariants(G)
    H = A.as_group()
    phi = GroupHom(G, H, iso)
    assert phi.is_homomorphism() and phi.is_bijective()
    assert isomorphic(G.table.tolist(), H.table.tolist())


def test_abelian_invariants_rejects_nonabelian(d8):
    with pytest.raises(NotAbelian):
        abelian_invariants(d8)


def test_from_orders_normalises():
    assert FiniteAbelianGroup.from_orders([2, 3]).factors == (6,)
    assert FiniteAbelianGroup.from_orders([4, 2, 6]).factors == (2, 2, 12)
    with pytest.raises(InputError):
        FiniteAbelianGroup([4, 2])


def test_permutation_groups(d8, s3):
    assert d8.order == 8 and not d8.is_abelian()
    assert s3.order == 6 and len(d8.center) == 2 and len(s3.center) == 1


def test_extension_example_is_cyclic_of_order_four():
    S = FiniteAbelianGroup([2])
    K = cyclic_group(2)
    F = np.zeros((2, 2, 1), dtype=np.int64)
    F[1, 1] = 1
    G, iota, pi, section = central_extension(CentralExtensionData(S, K, F))
    assert G.census() == cyclic_group(4).census()
    assert element_orders(G.table.tolist()) == [1, 2, 4, 4]
    assert G.element_orders[section[1]] == 4  # (0, 1) generates


def test_extension_matches_brute_force_table():
    S = FiniteAbelianGroup([2])
    K = abelian_group([2, 2])
    F = np.zeros((4, 4, 1), dtype=np.int64)
    Fd = {}
    for k1 in range(4):
        for k2 in range(4):
            v = (k1 & 1) * ((k2 >> 1) & 1)  # bilinear, hence a cocycle
            F[k1, k2] = v
            Fd[(k1, k2)] = (v,)
    G, *_ = central_extension(CentralExtensionData(S, K, F))
    oracle = extension_table([2], K.table.tolist(), Fd)
    assert np.array_equal(G.table, np.array(oracle))


def test_extension_rejects_non_cocycle():
    S = FiniteAbelianGroup([2])
    K = cyclic_group(3)
    F = np.zeros((3, 3, 1), dtype=np.int64)
    F[1, 1] = 1
    with pytest.raises(NotACocycle) as exc:
        central_extension(CentralExtensionData(S, K, F))
    assert exc.value.witness is not None


def test_quotient_round_trip(d8):
    q = quotient_by_central(d8, d8.center)
    iso = q.extension_iso()
    assert iso.is_homomorphism() and iso.is_bijective()
    G2, iota, pi, section = central_extension(q.data)
    q2 = quotient_by_central(G2, iota.image, (q.S, iota.image))
    assert np.array_equal(q2.K.table, q.K.table)
    assert np.array_equal(q2.F, q.F)


def test_quotient_requires_central(s3):
    with pytest.raises((NotCentral, NotSubgroup)):
        quotient_by_central(s3, [0, 1, 2])


def test_quotient_group_and_subgroup(d8):
    H, inc = subgroup(d8, d8.center)
    assert H.order == 2 and inc.is_homomorphism()
    Q, proj, reps = quotient_group(d8, d8.center)
    assert Q.order == 4 and proj.is_homomorphism()
    assert set(proj.kernel()) == set(d8.center)
    with pytest.raises(NotSubgroup):
        subgroup(d8, [0, 1])


def test_direct_product_and_hom_compose():
    G = direct_product(cyclic_group(2), cyclic_group(3))
    assert G.census() == cyclic_group(6).census()
    p = GroupHom(G, cyclic_group(3), np.arange(6) % 3)
    q = GroupHom(cyclic_group(3), cyclic_group(1), np.zeros(3, dtype=np.int64))
    assert p.is_homomorphism() and p.compose(q).is_homomorphism()


@given(st.lists(st.integers(2, 4), min_size=1, max_size=3))
def test_abelian_group_indexing(factors):
    factors = sorted(factors)
    try:
        A = FiniteAbelianGroup(factors)
    except InputError:
        return
    for i in range(A.order):
        assert A.index(A.element(i)) == i
    G = A.as_group()
    a, b = G.order - 1, min(1, G.order - 1)
    assert A.index(A.add(A.element(a), A.element(b))) == G.table[a, b]
