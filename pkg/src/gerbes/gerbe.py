"""Multiplicative gerbes over finite groups and their representations.

In the finite case a multiplicative gerbe is a pair ``(G, alpha)`` with
``alpha`` a normalized Q/Z-valued 3-cocycle.  A representation on a right
``G``-set ``N`` is a 2-cochain ``beta`` on the action groupoid with
``d beta = pi* alpha``; a morphism ``(F, gamma)`` between two of them satisfies
``beta - F* beta' = d gamma``.
"""

from dataclasses import dataclass

import numpy as np

from .cochain import (
    ActionGroupoid,
    CocycleCheck,
    Cochain,
    Group,
    delta,
    groupoid_cohomology_order,
    is_cocycle,
    normalize,
    pullback_to_groupoid,
    solve_coboundary,
)
from .errors import (
    DomainMismatch,
    InternalVerificationFailed,
    NoSolutionAtLevel,
    NotACocycle,
    NotEquivariant,
)


@dataclass(frozen=True, eq=False)
class MultiplicativeGerbe:
    G: object
    alpha: Cochain

    @property
    def base(self):
        return self.alpha.base

    def to_json(self):
        return {"group": self.G.to_json(), "alpha": self.alpha.to_json()}


def make_gerbe(G, alpha=None):
    """Validate ``alpha`` as a 3-cocycle on ``G`` and store it normalized."""
    base = Group(G)
    if alpha is None:
        alpha = Cochain.zero(base, 3)
    if alpha.degree != 3 or not isinstance(alpha.base, Group) or alpha.G != G:
        raise DomainMismatch("alpha must be a degree-3 cochain on G")
    check = is_cocycle(alpha)
    if not check:
        raise NotACocycle("alpha is not a 3-cocycle", witness=check.witness)
    alpha, _ = normalize(alpha)
    return MultiplicativeGerbe(G, alpha.reduced())


@dataclass(frozen=True, eq=False)
class GerbeRepresentation:
    gerbe: MultiplicativeGerbe
    groupoid: ActionGroupoid
    beta: Cochain

    def check(self):
        """Exact check of ``d beta = pi* alpha``; the witness is the first bad tuple."""
        diff = delta(self.beta) - pullback_to_groupoid(self.gerbe.alpha, self.groupoid)
        bad = np.argwhere(diff.num != 0)
        if len(bad):
            return CocycleCheck(False, tuple(int(v) for v in bad[0]))
        return CocycleCheck(True)

    def to_json(self):
        out = self.gerbe.to_json()
        out.update(
            {
                "space_size": self.groupoid.npts,
                "action": self.groupoid.act.tolist(),
                "beta": self.beta.to_json(),
            }
        )
        return out


def regular_action(G):
    """``G`` acting on itself by right multiplication."""
    return ActionGroupoid(G.order, G, G.table, check=False)


def point_action(G):
    return ActionGroupoid(1, G, np.zeros((1, G.order), dtype=np.int64), check=False)


def canonical_representation(gerbe):
    """The representation on ``G`` itself with ``beta(k; g1, g2) = alpha(k, g1, g2)``."""
    groupoid = regular_action(gerbe.G)
    beta = Cochain(groupoid, 2, gerbe.alpha.num, gerbe.alpha.den)
    rep = GerbeRepresentation(gerbe, groupoid, beta)
    if not rep.check():
        raise InternalVerificationFailed("canonical representation fails its defining equation")
    return rep


def representation_exists(gerbe, groupoid, level_multiplier=None):
    """A representation on ``groupoid`` if ``pi* alpha`` is exact, else None."""
    if groupoid.G != gerbe.G:
        raise DomainMismatch("action is by a different group")
    groupoid.validate()
    c = pullback_to_groupoid(gerbe.alpha, groupoid)
    try:
        beta = solve_coboundary(c, level_multiplier)
    except NoSolutionAtLevel:
        return None
    return GerbeRepresentation(gerbe, groupoid, beta)


def count_representation_classes(gerbe, groupoid, method="transfer"):
    """Number of representations on ``groupoid`` up to equivalence.

    When one exists the set is a torsor for ``H^2`` of the action groupoid,
    which is the product of ``H^2`` of the orbit stabilizers.  Returns 0 when
    there is no representation at all.
    """
    if representation_exists(gerbe, groupoid) is None:
        return 0
    return groupoid_cohomology_order(groupoid, 2, method=method)


@dataclass(frozen=True, eq=False)
class RepMorphism:
    source: GerbeRepresentation
    target: GerbeRepresentation
    F: np.ndarray
    gamma: Cochain

    def compose(self, other):
        """``other`` after ``self``: ``(F' F, gamma + F* gamma')``."""
        F = np.asarray(other.F)[np.asarray(self.F)]
        pulled = Cochain(self.source.groupoid, 1, other.gamma.num[np.asarray(self.F)], other.gamma.den)
        return RepMorphism(self.source, other.target, F, self.gamma + pulled)


def validate_rep_morphism(m):
    """Check ``beta - F* beta' = d gamma`` on every tuple after checking equivariance."""
    src, tgt = m.source.groupoid, m.target.groupoid
    F = np.asarray(m.F, dtype=np.int64)
    if src.G != tgt.G or F.shape != (src.npts,):
        raise DomainMismatch("morphism does not match its representations")
    bad = np.argwhere(F[src.act] != tgt.act[F])
    if len(bad):
        raise NotEquivariant("map does not commute with the action", witness=tuple(int(v) for v in bad[0]))
    pulled = Cochain(src, 2, m.target.beta.num[F], m.target.beta.den)
    diff = m.source.beta - pulled - delta(m.gamma)
    nz = np.argwhere(diff.num != 0)
    if len(nz):
        return CocycleCheck(False, tuple(int(v) for v in nz[0]))
    return CocycleCheck(True)
