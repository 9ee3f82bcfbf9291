"""Finite groups as multiplication tables, plus abelian structure and central extensions.

Elements are integer indices; the identity is always index 0.  Central
extensions are stored with element ``(a, k)`` at index ``A.index(a) * |K| + k``
so inclusion, projection and section are index arithmetic.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np

from .config import get_settings
from .errors import (
    InputError,
    NoIdentity,
    NotAbelian,
    NotACocycle,
    NotAssociative,
    NotCentral,
    NotInvertible,
    NotSubgroup,
    OrderLimitExceeded,
)
from .linalg import smith_normal_form


class FiniteGroup:
    """A validated group table with identity 0.

    Construct through :func:`make_group_from_table` or
    :func:`make_group_from_permutations` unless the table is already known to
    be canonical (internal constructions pass ``check=False``).
    """

    def __init__(self, table, labels=None, check=True):
        table = np.array(table, dtype=np.int64)
        table.setflags(write=False)
        self.table = table
        self.element_labels = tuple(labels) if labels is not None else None
        if check:
            _validate_table(table)
            if (table[0] != np.arange(len(table))).any():
                raise NoIdentity("element 0 is not the identity", witness=0)

    @property
    def order(self):
        return len(self.table)

    def __len__(self):
        return len(self.table)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def mul(self, x, y):
        return int(self.table[x, y])

    @cached_property
    def inverse(self):
        inv = np.argmin(self.table, axis=1)  # row x has its 0 at column x^-1
        inv.setflags(write=False)
        return inv

    def inv(self, x):
        return int(self.inverse[x])

    def power(self, x, n):
        y = 0
        for _ in range(n):
            y = self.mul(y, x)
        return y

    @cached_property
    def element_orders(self):
        orders = np.ones(self.order, dtype=np.int64)
        for x in range(1, self.order):
            y, n = x, 1
            while y != 0:
                y = self.mul(y, x)
                n += 1
            orders[x] = n
        return orders

    @cached_property
    def exponent(self):
        return int(np.lcm.reduce(self.element_orders)) if self.order else 1

    def is_abelian(self):
        return bool((self.table == self.table.T).all())

    @cached_property
    def center(self):
        return tuple(int(x) for x in range(self.order) if (self.table[x] == self.table[:, x]).all())

    def census(self):
        """Isomorphism-invariant summary used as a cheap non-isomorphism test."""
        return (
            self.order,
            self.is_abelian(),
            tuple(sorted(int(o) for o in self.element_orders)),
            len(self.center),
        )

    def is_subgroup(self, elements):
        s = set(int(x) for x in elements)
        if 0 not in s:
            return False
        idx = np.array(sorted(s))
        prods = self.table[np.ix_(idx, idx)]
        return set(np.unique(prods).tolist()) <= s

    def to_json(self):
        out = {"kind": "table", "order": self.order, "table": self.table.tolist()}
        if self.element_labels is not None:
            out["labels"] = list(self.element_labels)
        return out


def _validate_table(table):
    n = len(table)
    if table.ndim != 2 or table.shape != (n, n) or n == 0:
        raise InputError("group table must be a non-empty square array")
    if (table < 0).any() or (table >= n).any():
        raise InputError("group table entries out of range")
    ident = None
    ar = np.arange(n)
    for e in range(n):
        if (table[e] == ar).all() and (table[:, e] == ar).all():
            ident = e
            break
    if ident is None:
        raise NoIdentity("no two-sided identity element")
    for x in range(n):
        if len(set(table[x].tolist())) != n:
            raise NotInvertible(f"row {x} is not a permutation", witness=x)
        if len(set(table[:, x].tolist())) != n:
            raise NotInvertible(f"column {x} is not a permutation", witness=x)
    # associativity: (xy)z == x(yz) for all triples
    left = table[table]  # left[x, y, z] = table[table[x, y], z]
    right = table[:, table]  # right[x, y, z] = table[x, table[y, z]]
    bad = np.argwhere(left != right)
    if len(bad):
        raise NotAssociative("table is not associative", witness=tuple(int(v) for v in bad[0]))
    return ident


def make_group_from_table(table, labels=None):
    """Validate ``table`` and relabel so that the identity is index 0.

    Returns ``(G, perm)`` where ``perm[old] = new``.
    """
    table = np.asarray(table)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.size == 0:
        raise InputError("group table must be a non-empty square array")
    if not np.issubdtype(table.dtype, np.integer):
        raise InputError("group table entries must be integers")
    table = table.astype(np.int64)
    ident = _validate_table(table)
    n = len(table)
    if n > get_settings().max_order:
        raise OrderLimitExceeded(f"group order {n} exceeds cap {get_settings().max_order}")
    old_of_new = [ident] + [x for x in range(n) if x != ident]
    perm = np.empty(n, dtype=np.int64)
    perm[old_of_new] = np.arange(n)
    new = perm[table[np.ix_(old_of_new, old_of_new)]]
    if labels is not None:
        labels = [labels[o] for o in old_of_new]
    return FiniteGroup(new, labels, check=False), perm


def make_group_from_permutations(degree, generators, max_order=None):
    """Enumerate the permutation group generated by ``generators``.

    Permutations are sequences ``p`` with ``p[i]`` the image of ``i``; the
    product ``x*y`` applies ``x`` first.  Elements are numbered breadth-first
    from the identity, trying generators in the given order.
    """
    cap = max_order if max_order is not None else get_settings().max_order
    gens = [tuple(int(v) for v in g) for g in generators]
    for g in gens:
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise InputError(f"{list(g)} is not a permutation of 0..{degree - 1}")
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple(g[x[i]] for i in range(degree))
            if y not in index:
                if len(elements) >= cap:
                    raise OrderLimitExceeded(f"group order exceeds cap {cap}")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    perms = np.array(elements, dtype=np.int64).reshape(len(elements), degree)
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        prods = perms[:, perms[i]]  # prods[j] = x_i * x_j, i.e. x_j after x_i
        table[i] = [index[tuple(row)] for row in prods.tolist()]
    labels = [" ".join(map(str, e)) for e in elements]
    return FiniteGroup(table, labels, check=False)


# --------------------------------------------------------------------------
# homomorphisms, subgroups and quotients


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: np.ndarray

    def __post_init__(self):
        img = np.asarray(self.image, dtype=np.int64)
        img.setflags(write=False)
        object.__setattr__(self, "image", img)

    def __call__(self, x):
        return int(self.image[x])

    def is_homomorphism(self):
        img = self.image
        return bool(
            img[0] == 0
            and (img[self.source.table] == self.target.table[np.ix_(img, img)]).all()
        )

    def is_bijective(self):
        return len(set(self.image.tolist())) == self.source.order == self.target.order

    def kernel(self):
        return tuple(int(x) for x in np.nonzero(self.image == 0)[0])

    def compose(self, other):
        """``other`` after ``self``."""
        return GroupHom(self.source, other.target, other.image[self.image])


def subgroup(G, elements):
    """The subgroup on ``elements`` as a group of its own, with its inclusion."""
    elems = sorted(set(int(x) for x in elements))
    if not G.is_subgroup(elems):
        raise NotSubgroup("element set is not closed under the product", witness=elems)
    pos = {g: i for i, g in enumerate(elems)}
    sub = G.table[np.ix_(elems, elems)]
    table = np.vectorize(pos.__getitem__, otypes=[np.int64])(sub)
    H = FiniteGroup(table, check=False)
    return H, GroupHom(H, G, np.array(elems))


def quotient_group(G, normal):
    """Quotient by a normal subgroup.

    Cosets are ordered by their least element index, and that least element
    is the chosen representative.  Returns ``(Q, projection, reps)``.
    """
    normal = sorted(set(int(x) for x in normal))
    if not G.is_subgroup(normal):
        raise NotSubgroup("not a subgroup", witness=normal)
    n = G.order
    coset = -np.ones(n, dtype=np.int64)
    reps = []
    for g in range(n):
        if coset[g] < 0:
            members = G.table[g, normal]
            coset[members] = len(reps)
            reps.append(g)
    reps = np.array(reps, dtype=np.int64)
    table = coset[G.table[np.ix_(reps, reps)]]
    Q = FiniteGroup(table, check=False)
    for g in range(n):
        # left and right cosets must agree for a well-defined quotient
        if set(coset[G.table[normal, g]].tolist()) != {int(coset[g])}:
            raise NotSubgroup("subgroup is not normal", witness=g)
    return Q, GroupHom(G, Q, coset), reps


def direct_product(G, H):
    """Elements ``(g, h)`` at index ``g * |H| + h``."""
    m, n = G.order, H.order
    gi, hi = np.divmod(np.arange(m * n), n)
    table = G.table[np.ix_(gi, gi)] * n + H.table[np.ix_(hi, hi)]
    return FiniteGroup(table, check=False)


# --------------------------------------------------------------------------
# finite abelian groups in invariant-factor form


class FiniteAbelianGroup:
    """Z/d_1 x ... x Z/d_r with d_i | d_{i+1}, elements as residue tuples.

    Flat index of a tuple is its mixed-radix value with the first factor most
    significant.
    """

    def __init__(self, factors):
        factors = tuple(int(d) for d in factors)
        for d in factors:
            if d < 2:
                raise InputError(f"invariant factors must be >= 2, got {factors}")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise InputError(f"invariant factors must divide each other: {factors}")
        self.factors = factors

    @classmethod
    def from_orders(cls, orders):
        """Normalise an arbitrary list of cyclic orders into invariant factors."""
        from .linalg import factorize

        primary = {}
        for d in orders:
            for p, e in factorize(d).items():
                primary.setdefault(p, []).append(p**e)
        r = max((len(v) for v in primary.values()), default=0)
        inv = [1] * r
        for p, powers in primary.items():
            powers.sort(reverse=True)
            for j, q in enumerate(powers):
                inv[j] *= q
        return cls(sorted(d for d in inv if d > 1))

    @property
    def rank(self):
        return len(self.factors)

    @property
    def order(self):
        return math.prod(self.factors)

    @property
    def exponent(self):
        return self.factors[-1] if self.factors else 1

    def __len__(self):
        return self.order

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return f"FiniteAbelianGroup({list(self.factors)})"

    @cached_property
    def _strides(self):
        strides = []
        acc = 1
        for d in reversed(self.factors):
            strides.append(acc)
            acc *= d
        return np.array(strides[::-1], dtype=np.int64)

    @cached_property
    def elements(self):
        """Array of shape (order, rank) listing tuples in index order."""
        idx = np.arange(self.order, dtype=np.int64)
        if not self.factors:
            return np.zeros((1, 0), dtype=np.int64)
        return (idx[:, None] // self._strides) % np.array(self.factors)

    def index(self, tup):
        tup = np.asarray(tup, dtype=np.int64) % np.array(self.factors, dtype=np.int64)
        return int((tup * self._strides).sum()) if self.factors else 0

    def indices(self, tuples):
        """Vectorised :meth:`index` over the last axis."""
        tuples = np.asarray(tuples, dtype=np.int64)
        if not self.factors:
            return np.zeros(tuples.shape[:-1], dtype=np.int64)
        return ((tuples % np.array(self.factors)) * self._strides).sum(axis=-1)

    def element(self, i):
        return tuple(int(v) for v in self.elements[i])

    def add(self, a, b):
        return tuple((np.asarray(a) + np.asarray(b)) % np.array(self.factors))

    def neg(self, a):
        return tuple((-np.asarray(a)) % np.array(self.factors))

    @cached_property
    def neg_index(self):
        return self.indices(-self.elements)

    def as_group(self):
        el = self.elements
        table = self.indices(el[:, None, :] + el[None, :, :])
        return FiniteGroup(table, check=False)

    def to_json(self):
        return {"kind": "abelian", "factors": list(self.factors)}


def abelian_invariants(G):
    """Invariant factors of an abelian group with an explicit isomorphism.

    Returns ``(A, iso)`` with ``iso[g]`` the index in ``A`` of the tuple for
    element ``g``.  Relations ``x_g + x_h - x_{gh}`` and ``ord(g_i) e_i`` over
    a greedy generating set are diagonalised by Smith normal form.
    """
    if not G.is_abelian():
        bad = np.argwhere(G.table != G.table.T)[0]
        raise NotAbelian("group is not abelian", witness=tuple(int(v) for v in bad))
    n = G.order
    if n == 1:
        return FiniteAbelianGroup(()), np.zeros(1, dtype=np.int64)
    # greedy generators; coefficient vectors of every element by BFS
    gens = []
    coeff = {0: ()}
    span = {0}
    for g in range(1, n):
        if g in span:
            continue
        gens.append(g)
        coeff = {0: (0,) * len(gens)}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for j, s in enumerate(gens):
                y = G.mul(x, s)
                if y not in coeff:
                    c = list(coeff[x])
                    c[j] += 1
                    coeff[y] = tuple(c)
                    queue.append(y)
        span = set(coeff)
    r = len(gens)
    rels = []
    for j, s in enumerate(gens):
        row = [0] * r
        row[j] = int(G.element_orders[s])
        rels.append(row)
    for x in range(n):
        for y in range(x, n):
            row = [a + b - c for a, b, c in zip(coeff[x], coeff[y], coeff[G.mul(x, y)])]
            if any(row):
                rels.append(row)
    diag, V = smith_normal_form(rels)
    V = np.array(V, dtype=object)
    keep = [i for i, d in enumerate(diag) if d != 1]
    factors = [diag[i] for i in keep]
    A = FiniteAbelianGroup(factors)
    iso = np.zeros(n, dtype=np.int64)
    for g in range(n):
        y = np.array(coeff[g], dtype=object) @ V
        iso[g] = A.index([int(y[i]) % diag[i] for i in keep])
    if len(set(iso.tolist())) != n:
        raise AssertionError("abelian_invariants produced a non-injective map")
    return A, iso


# --------------------------------------------------------------------------
# central extensions


@dataclass(frozen=True, eq=False)
class CentralExtensionData:
    """``(S, K, F)`` with ``F[k1, k2]`` an S-tuple; presents S -> S x_F K -> K."""

    S: FiniteAbelianGroup
    K: FiniteGroup
    F: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F, dtype=np.int64).reshape(self.K.order, self.K.order, self.S.rank)
        F = F % np.array(self.S.factors, dtype=np.int64) if self.S.rank else F
        F.setflags(write=False)
        object.__setattr__(self, "F", F)


def two_cocycle_violation(S, K, F):
    """First ``(k1, k2, k3)`` where the S-valued 2-cocycle identity fails, else None."""
    if S.rank == 0:
        return None
    T = K.table
    mods = np.array(S.factors)
    a = np.arange(K.order)
    # lhs[k1,k2,k3] = F(k2,k3) + F(k1,k2k3); rhs = F(k1k2,k3) + F(k1,k2)
    lhs = (F[None, :, :, :] + F[a[:, None, None], T[None, :, :]]) % mods
    rhs = (F[T[:, :, None], a[None, None, :]] + F[:, :, None, :]) % mods
    bad = np.argwhere((lhs != rhs).any(axis=-1))
    return tuple(int(v) for v in bad[0]) if len(bad) else None


def central_extension(data):
    """Assemble ``S x_F K`` with product ``(a1 + a2 + F(k1,k2), k1 k2)``.

    Returns ``(G, iota, pi, section)``; ``section[k]`` is the index of ``(0, k)``.
    """
    S, K, F = data.S, data.K, data.F
    if S.rank and ((F[0] != 0).any() or (F[:, 0] != 0).any()):
        raise NotACocycle("F is not normalized", witness=(0, 0))
    bad = two_cocycle_violation(S, K, F)
    if bad is not None:
        raise NotACocycle("F fails the 2-cocycle identity", witness=bad)
    n, m = S.order, K.order
    if n * m > get_settings().max_order:
        raise OrderLimitExceeded(f"extension order {n * m} exceeds cap")
    ai, ki = np.divmod(np.arange(n * m), m)
    el = S.elements
    a_sum = el[ai][:, None, :] + el[ai][None, :, :] + F[np.ix_(ki, ki)]
    table = S.indices(a_sum) * m + K.table[np.ix_(ki, ki)]
    G = FiniteGroup(table, check=False)
    Sg = S.as_group()
    iota = GroupHom(Sg, G, np.arange(n) * m)
    pi = GroupHom(G, K, ki)
    section = np.arange(m, dtype=np.int64)
    return G, iota, pi, section


@dataclass(frozen=True, eq=False)
class CentralQuotient:
    """Result of :func:`quotient_by_central`.

    ``s_index[g]`` gives the tuple index in ``S`` of each element of the
    central subgroup (and -1 elsewhere); ``s_elements[i]`` is the element of
    ``G`` with tuple index ``i``.
    """

    G: FiniteGroup
    S: FiniteAbelianGroup
    s_elements: np.ndarray
    s_index: np.ndarray
    K: FiniteGroup
    pi: GroupHom
    F: np.ndarray
    section: np.ndarray

    @property
    def data(self):
        return CentralExtensionData(self.S, self.K, self.F)

    def __iter__(self):
        return iter((self.K, self.pi, self.F, self.section))

    def decompose(self):
        """Arrays ``(a, k)`` with ``g = s_elements[a] * section[k]`` for every g."""
        k = self.pi.image
        sec_inv = self.G.inverse[self.section[k]]
        s = self.G.table[np.arange(self.G.order), sec_inv]
        return self.s_index[s], k

    def extension_iso(self):
        """Isomorphism ``central_extension(S, K, F) -> G``, ``(a, k) -> a * section(k)``."""
        E, _, _, _ = central_extension(self.data)
        m = self.K.order
        a, k = np.divmod(np.arange(E.order), m)
        img = self.G.table[self.s_elements[a], self.section[k]]
        return GroupHom(E, self.G, img)


def quotient_by_central(G, S_elements, s_structure=None):
    """Quotient ``G`` by the central subgroup ``S_elements``.

    The section picks the least element index in each coset.  ``s_structure``
    optionally fixes the abelian structure of S as ``(A, s_elements)`` where
    ``s_elements[i]`` is the element of G with tuple index ``i``; otherwise it
    comes from :func:`abelian_invariants`.
    """
    S_elements = sorted(set(int(x) for x in S_elements))
    if not G.is_subgroup(S_elements):
        raise NotSubgroup("S is not a subgroup", witness=S_elements)
    center = set(G.center)
    for s in S_elements:
        if s not in center:
            g = int(np.nonzero(G.table[s] != G.table[:, s])[0][0])
            raise NotCentral("S is not central", witness=(s, g))
    if s_structure is None:
        H, inc = subgroup(G, S_elements)
        A, iso = abelian_invariants(H)
        s_elements = np.empty(A.order, dtype=np.int64)
        s_elements[iso] = inc.image
    else:
        A, s_elements = s_structure
        s_elements = np.asarray(s_elements, dtype=np.int64)
        if sorted(s_elements.tolist()) != S_elements:
            raise InputError("s_structure does not enumerate S")
        Tsub = G.table[np.ix_(s_elements, s_elements)]
        el = A.elements
        expect = s_elements[A.indices(el[:, None, :] + el[None, :, :])]
        if (Tsub != expect).any():
            raise InputError("s_structure is not a group isomorphism")
    s_index = -np.ones(G.order, dtype=np.int64)
    s_index[s_elements] = np.arange(A.order)
    K, pi, reps = quotient_group(G, S_elements)
    T = G.table
    prod = T[np.ix_(reps, reps)]
    target = reps[K.table]
    Fel = T[prod, G.inverse[target]]
    F = A.elements[s_index[Fel]] if A.rank else np.zeros(Fel.shape + (0,), dtype=np.int64)
    return CentralQuotient(G, A, s_elements, s_index, K, pi, F, reps)


def cyclic_group(n):
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, check=False)


def abelian_group(factors):
    return FiniteAbelianGroup(factors).as_group()
