import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from gerbes.cochain import abelian_classes  # noqa: E402
from gerbes.group import (  # noqa: E402
    CentralExtensionData,
    FiniteAbelianGroup,
    abelian_group,
    central_extension,
    cyclic_group,
    make_group_from_permutations,
    make_group_from_table,
)

settings.register_profile(
    "repo",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def dihedral8():
    return make_group_from_permutations(4, [[1, 2, 3, 0], [3, 2, 1, 0]])


def quaternion8():
    # units +-1, +-i, +-j, +-k as (sign, basis) with basis 0..3 = 1, i, j, k
    mult = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }  # fmt: skip
    elems = [(s, b) for s in (1, -1) for b in range(4)]
    index = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, b1 in elems:
        row = []
        for s2, b2 in elems:
            s, b = mult[(b1, b2)]
            row.append(index[(s * s1 * s2, b)])
        table.append(row)
    return make_group_from_table(np.array(table))[0]


def symmetric3():
    return make_group_from_permutations(3, [[1, 2, 0], [1, 0, 2]])


def order8_extensions():
    """One representative ``(G, S_elements, K, F)`` per class in H^2(K, Z/2), |K| = 4."""
    S = FiniteAbelianGroup([2])
    out = []
    for K in (cyclic_group(4), abelian_group([2, 2])):
        for c in abelian_classes(K, S):
            F = np.asarray(c.values)
            G, iota, _, _ = central_extension(CentralExtensionData(S, K, F))
            out.append((G, iota.image, K, F))
    return out


@pytest.fixture(scope="session")
def d8():
    return dihedral8()


@pytest.fixture(scope="session")
def q8():
    return quaternion8()


@pytest.fixture(scope="session")
def s3():
    return symmetric3()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
