"""Finite crossed modules and the pair attached to a finite abelian fibre.

A crossed module is ``phi: N -> E`` with a right action ``n^e`` of ``E`` on
``N`` by automorphisms such that ``phi(n^e) = e^-1 phi(n) e`` and
``n^phi(m) = m^-1 n m``.  Its homotopy groups are ``pi_1 = ker phi`` and
``pi_0 = coker phi``.
"""

from dataclasses import dataclass

import numpy as np

from .circle import b_sharp
from .cochain import CocycleCheck
from .errors import LevelTooCoarse, NotNondegenerate
from .group import (
    FiniteGroup,
    GroupHom,
    abelian_invariants,
    direct_product,
    quotient_by_central,
    quotient_group,
    subgroup,
)


@dataclass(frozen=True, eq=False)
class CrossedModule:
    N: FiniteGroup
    E: FiniteGroup
    phi: GroupHom
    action: np.ndarray  # action[n, e] = n^e

    def to_json(self):
        return {
            "N": self.N.to_json(),
            "E": self.E.to_json(),
            "phi": self.phi.image.tolist(),
            "action": np.asarray(self.action).tolist(),
        }


@dataclass(frozen=True)
class CrossedModuleCheck(CocycleCheck):
    reason: str = None


def validate_crossed_module(X):
    """Exhaustive check; on failure reports the first violating pair and the law."""
    N, E = X.N, X.E
    act = np.asarray(X.action, dtype=np.int64)
    phi = X.phi.image
    nN, nE = N.order, E.order

    def fail(reason, bad):
        return CrossedModuleCheck(False, tuple(int(v) for v in bad), reason)

    if act.shape != (nN, nE) or (act < 0).any() or (act >= nN).any():
        return fail("shape", (0, 0))
    if not X.phi.is_homomorphism():
        bad = np.argwhere(phi[N.table] != E.table[np.ix_(phi, phi)])
        return fail("phi is not a homomorphism", bad[0] if len(bad) else (0, 0))
    bad = np.nonzero(act[:, 0] != np.arange(nN))[0]
    if len(bad):
        return fail("identity does not act trivially", (bad[0], 0))
    bad = np.argwhere(act[act] != act[:, E.table])  # (n^a)^b = n^(ab)
    if len(bad):
        return fail("not a right action", bad[0])
    # each n -> n^e is a homomorphism of N
    lhs = act[N.table]  # (n1 n2)^e, axes (n1, n2, e)
    rhs = N.table[act[:, None, :], act[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        return fail("action is not by automorphisms", bad[0])
    for e in range(nE):
        if len(set(act[:, e].tolist())) != nN:
            return fail("action is not by automorphisms", (0, e))
    # equivariance: phi(n^e) = e^-1 phi(n) e
    Einv = E.inverse
    conj = E.table[E.table[Einv[None, :], phi[:, None]], np.arange(nE)[None, :]]
    bad = np.argwhere(phi[act] != conj)
    if len(bad):
        return fail("phi is not equivariant", bad[0])
    # Peiffer: n^phi(m) = m^-1 n m
    lhs = act[:, phi]  # axes (n, m)
    rhs = N.table[N.table[N.inverse[None, :], np.arange(nN)[:, None]], np.arange(nN)[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        return fail("Peiffer identity fails", bad[0])
    return CrossedModuleCheck(True)


@dataclass(frozen=True, eq=False)
class FourTermSequence:
    """``pi_1 -> N -> E -> pi_0`` with the structure maps."""

    pi1: object  # FiniteAbelianGroup
    kernel: tuple  # elements of N forming ker phi, in pi1 tuple order
    pi0: FiniteGroup
    projection: GroupHom  # E -> pi0
    image: tuple  # elements of E forming im phi

    def to_json(self):
        return {
            "pi1": self.pi1.to_json(),
            "pi0": self.pi0.to_json(),
            "kernel": list(self.kernel),
            "image": list(self.image),
        }


def four_term(X):
    """Homotopy groups of a valid crossed module; ``ker phi`` is checked abelian."""
    kernel = X.phi.kernel()
    Kn, inc = subgroup(X.N, kernel)
    A, iso = abelian_invariants(Kn)
    ordered = np.empty(A.order, dtype=np.int64)
    ordered[iso] = inc.image
    image = sorted(set(X.phi.image.tolist()))
    pi0, proj, _ = quotient_group(X.E, image)
    return FourTermSequence(A, tuple(int(x) for x in ordered), pi0, proj, tuple(image))


@dataclass(frozen=True, eq=False)
class FiniteFiberPair:
    X1: CrossedModule
    X2: CrossedModule
    seq1: FourTermSequence
    seq2: FourTermSequence
    level: int
    pi0_iso_G: GroupHom  # pi0(X1) -> G
    pi0_iso_SK: GroupHom  # pi0(X2) -> S x K
    S_times_K: FiniteGroup

    @property
    def non_isomorphic(self):
        return self.seq1.pi0.census() != self.seq2.pi0.census()

    def to_json(self):
        return {
            "level": self.level,
            "X1": self.X1.to_json(),
            "X2": self.X2.to_json(),
            "pi0_X1": self.seq1.pi0.to_json(),
            "pi0_X2": self.seq2.pi0.to_json(),
            "pi1_X1": self.seq1.pi1.to_json(),
            "pi1_X2": self.seq2.pi1.to_json(),
            "pi0_census": [list(self.seq1.pi0.census()), list(self.seq2.pi0.census())],
            "non_isomorphic_pi0": self.non_isomorphic,
        }


def finite_fiber_pair(G, S_elements, b, level=None, literal=False):
    """The two crossed modules of a central ``S`` with a nondegenerate form ``b``.

    Both have ``N = S x Z/level`` (pairs ``(sbar, lam)``) and ``E = S x G``;
    ``phi_1(sbar, lam) = (sbar, e)`` and ``phi_2(sbar, lam) = (0, sbar)``.
    ``X2`` carries the conjugation action ``(sbar, lam)^(s, g) = (sbar, lam + b(sbar, s))``.
    With that action ``X1`` breaks the Peiffer identity as soon as ``b`` is
    nonzero, so ``X1`` uses the trivial action unless ``literal`` is set.
    """
    q = quotient_by_central(G, S_elements)
    S = q.S
    if S.factors != b.domain.factors:
        raise NotNondegenerate("form lives on a different group than S")
    _, iso = b_sharp(b)
    if not iso:
        raise NotNondegenerate("b_sharp is not an isomorphism")
    level = S.exponent if level is None else int(level)
    B = b.numerators(level)
    if B is None:
        raise LevelTooCoarse(f"form values are not in (1/{level})Z/Z", witness=level)
    nG = G.order
    Sg = S.as_group()
    Zl = FiniteGroup((np.arange(level)[:, None] + np.arange(level)[None, :]) % level, check=False)
    N = direct_product(Sg, Zl)  # index sbar * level + lam
    E = direct_product(Sg, G)  # index s * |G| + g
    sbar, lam = np.divmod(np.arange(N.order), level)
    s, g = np.divmod(np.arange(E.order), nG)
    conj = sbar[:, None] * level + (lam[:, None] + B[sbar[:, None], s[None, :]]) % level
    trivial = np.broadcast_to(np.arange(N.order)[:, None], (N.order, E.order)).copy()
    phi1 = GroupHom(N, E, sbar * nG)
    phi2 = GroupHom(N, E, q.s_elements[sbar])
    X1 = CrossedModule(N, E, phi1, conj if literal else trivial)
    X2 = CrossedModule(N, E, phi2, conj)
    seq1 = four_term(X1)
    seq2 = four_term(X2)
    # pi0(X1) -> G: the coset of (s, g) goes to g
    reps1 = _coset_reps(seq1)
    iso1 = GroupHom(seq1.pi0, G, g[reps1])
    # pi0(X2) -> S x K: the coset of (s, g) goes to (s, pi(g))
    SK = direct_product(Sg, q.K)
    reps2 = _coset_reps(seq2)
    iso2 = GroupHom(seq2.pi0, SK, s[reps2] * q.K.order + q.pi.image[g[reps2]])
    return FiniteFiberPair(X1, X2, seq1, seq2, level, iso1, iso2, SK)


def _coset_reps(seq):
    proj = seq.projection.image
    reps = np.empty(seq.pi0.order, dtype=np.int64)
    for x in range(len(proj) - 1, -1, -1):
        reps[proj[x]] = x
    return reps


def normal_inclusion(E, normal):
    """Inclusion of a normal subgroup with the conjugation action ``n^e = e^-1 n e``."""
    Nsub, inc = subgroup(E, normal)
    img = inc.image
    pos = -np.ones(E.order, dtype=np.int64)
    pos[img] = np.arange(Nsub.order)
    conj = E.table[E.table[E.inverse[None, :], img[:, None]], np.arange(E.order)[None, :]]
    return CrossedModule(Nsub, E, inc, pos[conj])
