"""Fixture sweeps shared by the duality tests and the acceptance run."""

from dataclasses import dataclass, field
import itertools

import numpy as np

from oracles import isomorphic

from gerbes.circle import dual_group, pairing_numerators
from gerbes.cochain import (
    AbelianCochain,
    Cochain,
    Group,
    abelian_classes,
    classes_equal,
    cohomology_group,
    delta,
    is_cocycle,
    pullback,
)
from gerbes.duality import (
    ExplicitFormulaData,
    build_explicit_pair,
    compatible_epsilon,
    double_dual_check,
    dual_gerbe,
    dual_input,
    explicit_input,
    extension_comparison,
    extract_dual_extension,
    make_duality_input,
    omega_membership,
)
from gerbes.errors import GerbeError
from gerbes.gerbe import make_gerbe
from gerbes.group import (
    CentralExtensionData,
    FiniteAbelianGroup,
    abelian_group,
    central_extension,
    cyclic_group,
    direct_product,
)

FIBRES = [[2], [3], [4], [2, 2]]
BASES = {"Z1": [1], "Z2": [2], "Z3": [3], "Z4": [4], "Z2xZ2": [2, 2]}


def base_group(name):
    orders = BASES[name]
    return cyclic_group(orders[0]) if len(orders) == 1 else abelian_group(orders)


def abelian_groups_up_to(n):
    """Invariant-factor lists of every abelian group of order at most ``n``."""
    out = [[]]
    for order in range(2, n + 1):
        seen = set()
        for r in range(1, 5):
            for fac in itertools.product(range(2, order + 1), repeat=r):
                if int(np.prod(fac)) != order or any(b % a for a, b in zip(fac, fac[1:])):
                    continue
                if fac not in seen:
                    seen.add(fac)
                    out.append(list(fac))
    return out


def sample_epsilons(K, eps0, count=3, seed=0):
    """``eps0`` plus cocycles: H^3 generators and random normalized coboundaries."""
    rng = np.random.default_rng(seed)
    base = Group(K)
    gens = cohomology_group(K, 3).generators if K.order > 1 else []
    out = [eps0]
    for i in range(1, count):
        shape = base.shape(2)
        r = rng.integers(0, 6, size=shape)
        r[0, :] = 0
        r[:, 0] = 0
        z = delta(Cochain(base, 2, r, 6))
        if gens:
            z = z + gens[i % len(gens)] * i
        out.append(eps0 + z)
    return out


@dataclass
class SweepStats:
    pairs: int = 0
    compatible: int = 0
    samples: int = 0
    cocycle_ok: int = 0
    f_hat_recovered: int = 0
    double_dual_ok: int = 0
    double_dual_run: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures and self.cocycle_ok == self.samples == self.f_hat_recovered


def explicit_sweep(S_factors, K, eps_count=3, double=False, stats=None):
    """Run the explicit-formula checks over every (F, F_hat) class pair."""
    S = FiniteAbelianGroup(S_factors)
    S_hat, _ = dual_group(S)
    stats = stats if stats is not None else SweepStats()
    Fs = abelian_classes(K, S)
    Fhs = abelian_classes(K, S_hat)
    for i, F in enumerate(Fs):
        for j, Fh in enumerate(Fhs):
            stats.pairs += 1
            eps0 = compatible_epsilon(S, F, Fh)
            if eps0 is None:
                continue
            stats.compatible += 1
            for t, eps in enumerate(sample_epsilons(K, eps0, eps_count, seed=31 * i + j)):
                stats.samples += 1
                label = (tuple(S_factors), K.order, i, j, t)
                try:
                    data = ExplicitFormulaData(S, K, F, Fh, eps)
                    gerbe, gerbe_hat = build_explicit_pair(data)
                    if is_cocycle(gerbe.alpha) and is_cocycle(gerbe_hat.alpha):
                        stats.cocycle_ok += 1
                    inp = explicit_input(data, gerbe)
                    witness = omega_membership(inp)
                    ext = extract_dual_extension(inp, witness)
                    if classes_equal(ext.F_hat, Fh):
                        stats.f_hat_recovered += 1
                    else:
                        stats.failures.append((label, "F_hat class"))
                    if double:
                        stats.double_dual_run += 1
                        double_dual_check(inp, witness)
                        stats.double_dual_ok += 1
                except GerbeError as exc:
                    stats.failures.append((label, f"{type(exc).__name__}: {exc}"))
    return stats


def rho_f_cochain(S, K, F):
    """``rho_1(F(k_2, k_3))`` on ``S_hat x K`` with index ``rho * |K| + k``."""
    e = S.exponent
    P = pairing_numerators(S)
    nK = K.order
    r, k = np.divmod(np.arange(S.order * nK), nK)
    fi = S.indices(np.asarray(F))
    num = P[r[:, None, None], fi[k[None, :, None], k[None, None, :]]]
    product = central_extension(CentralExtensionData(S, K, np.zeros_like(np.asarray(F))))[0]
    return Cochain(Group(product), 3, num, e)


def trivial_gerbe_duality(G, S_el, K, F):
    """Checks for the dual of ``<G, 0>`` over a central ``Z/2``; a dict of booleans."""
    S = FiniteAbelianGroup([2])
    inp = make_duality_input(make_gerbe(G), S_el, (S, np.asarray(S_el)))
    dual = dual_gerbe(inp)
    S_hat = dual.extension.S_hat
    K = inp.K
    zero_F = AbelianCochain.zero(Group(K), 2, S_hat)
    result = {"F_hat_trivial": classes_equal(dual.F_hat, zero_F)}
    product = direct_product(S_hat.as_group(), K)
    result["dual_is_K_times_S_hat"] = isomorphic(dual.G_hat.table.tolist(), product.table.tolist())
    # carry alpha_hat to the split extension S_hat x K before comparing
    comp = extension_comparison(S_hat, K, zero_F.values, dual.F_hat.values)
    pulled = pullback(dual.alpha_hat, comp.map)
    expected = rho_f_cochain(S, K, inp.quotient.F)
    result["alpha_hat_is_rho_F"] = classes_equal(pulled, expected)
    back = dual_gerbe(dual_input(dual))
    result["reverse_group_is_G"] = isomorphic(back.G_hat.table.tolist(), G.table.tolist())
    zero = Cochain.zero(Group(back.G_hat), 3)
    result["reverse_class_trivial"] = classes_equal(back.alpha_hat, zero)
    return result
