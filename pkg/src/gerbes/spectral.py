"""The low rows of the LHS spectral sequence for a central extension.

For ``S -> G -> K`` with ``S`` central, ``K`` acts trivially on ``H^q(S, Q/Z)``,
so ``E_2^{p,q} = H^p(K, H^q(S, Q/Z))``.  The rows used here are

- ``q = 0``: ``H^p(K, Q/Z)``; the corner ``E_2^{0,0} = Q/Z`` is infinite,
- ``q = 1``: ``H^p(K, S_hat)`` with ``S_hat`` the Pontryagin dual,
- ``q = 2``: ``H^p(K, H^2(S, Q/Z))``,

each finite coefficient group split into cyclic summands ``Z/d``.
"""

from dataclasses import dataclass, field
import math

from .cochain import classes_equal, cohomology_group, cohomology_mod, restrict_to_subgroup
from .group import FiniteAbelianGroup


@dataclass(frozen=True)
class E2Term:
    p: int
    q: int
    orders: tuple = ()  # cyclic summands; empty with infinite=False means trivial
    infinite: bool = False
    coefficients: tuple = field(default=())

    @property
    def order(self):
        return math.inf if self.infinite else math.prod(self.orders)

    @property
    def invariants(self):
        if self.infinite:
            return None
        return FiniteAbelianGroup.from_orders([d for d in self.orders if d > 1]).factors

    def to_json(self):
        return {
            "p": self.p,
            "q": self.q,
            "infinite": self.infinite,
            "order": None if self.infinite else self.order,
            "invariants": None if self.infinite else list(self.invariants),
            "coefficients": list(self.coefficients),
        }


def fiber_coefficients(S, q):
    """Cyclic summands of ``H^q(S, Q/Z)`` for ``q`` = 1, 2, 3 (``q = 0`` is ``Q/Z``)."""
    if q == 0:
        return None
    if q == 1:
        return tuple(S.factors)  # S_hat is isomorphic to S
    return tuple(cohomology_group(S.as_group(), q).factors)


def e2_term(K, S, p, q):
    """``E_2^{p,q}`` for a central extension of ``K`` by the abelian group ``S``."""
    if q == 0:
        if p == 0:
            return E2Term(0, 0, infinite=True)
        return E2Term(p, 0, tuple(cohomology_group(K, p).factors))
    coeffs = fiber_coefficients(S, q)
    orders = []
    for d in coeffs:
        orders.extend(cohomology_mod(K, p, d)[0])
    return E2Term(p, q, tuple(d for d in orders if d > 1), coefficients=coeffs)


def e2_page(K, S, p_max=3, q_max=2):
    return {(p, q): e2_term(K, S, p, q) for q in range(q_max + 1) for p in range(p_max + 1)}


def degree_three_bound(K, S):
    """Upper bound for ``|H^3(G, Q/Z)|`` from the ``E_2`` terms of total degree 3."""
    terms = [e2_term(K, S, 3 - q, q) for q in range(3)]
    top = E2Term(0, 3, tuple(d for d in fiber_coefficients(S, 3) if d > 1))
    return math.prod(t.order for t in terms) * top.order, terms + [top]


@dataclass(frozen=True)
class FiberRestriction:
    trivial: bool
    level: int


def fiber_restriction(gerbe, S_elements, level_multiplier=None):
    """Whether ``alpha`` restricted to ``S`` is a coboundary (the ``E^{0,3}`` edge map)."""
    r = restrict_to_subgroup(gerbe.alpha, S_elements)
    zero = r * 0
    ok = classes_equal(r, zero, level_multiplier)
    level = r.den * r.G.order * (level_multiplier or 1)
    return FiberRestriction(bool(ok), level)
