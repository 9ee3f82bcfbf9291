import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from gerbes.linalg import factorize, smith_normal_form, solve_mod

small_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r
        )
    )
)


def _minor_gcd(A, k):
    """gcd of all k x k minors, by brute force."""
    import itertools

    A = np.array(A, dtype=object)
    g = 0
    for rows in itertools.combinations(range(A.shape[0]), k):
        for cols in itertools.combinations(range(A.shape[1]), k):
            sub = A[np.ix_(rows, cols)]
            g = math.gcd(g, int(round(np.linalg.det(sub.astype(float)))))
    return g


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}


@given(small_matrices)
def test_smith_diagonal_matches_minor_gcds(A):
    diag, V = smith_normal_form(A)
    d = [abs(x) for x in diag]
    for a, b in zip(d, d[1:]):
        assert b == 0 or (a != 0 and b % a == 0)
    # product of the first k invariant factors is the gcd of the k x k minors
    for k in range(1, len(d) + 1):
        assert math.prod(d[:k]) == _minor_gcd(A, k)
    assert abs(round(np.linalg.det(np.array(V, dtype=float)))) == 1


@given(small_matrices, st.sampled_from([2, 4, 6, 8, 9, 12]), st.data())
def test_solve_mod_round_trip(A, m, data):
    A = np.array(A, dtype=np.int64)
    x = np.array(data.draw(st.lists(st.integers(0, m - 1), min_size=A.shape[1], max_size=A.shape[1])))
    b = (A @ x) % m
    y = solve_mod(A, b, m)
    assert y is not None
    assert np.array_equal((A @ y) % m, b)


def test_solve_mod_reports_no_solution():
    assert solve_mod(np.array([[2]]), np.array([1]), 4) is None
    assert solve_mod(np.array([[2, 4]]), np.array([1]), 8) is None
