"""Bar cochains on finite groups and action groupoids.

Circle-valued cochains store integer numerators over one common
denominator: ``value = num / den mod 1``.  A degree-n cochain on ``G`` is an
array of shape ``(|G|,) * n``; on an action groupoid ``N x G`` it has an extra
leading axis for the point.  Abelian-group-valued cochains carry a trailing
axis with one residue per invariant factor.

Conventions (additive throughout):

* group:    df(g1..g_{n+1}) = f(g2..) + sum_i (-1)^i f(..g_i g_{i+1}..) + (-1)^{n+1} f(g1..g_n)
* groupoid: df(k; g1..) = f(k g1; g2..) + sum_i (-1)^i f(k; ..g_i g_{i+1}..) + (-1)^{l+1} f(k; g1..g_l)
* module:   (d_K F)(k1..k_{i+1}) = F(k2..) + sum_r (-1)^r F(..k_r k_{r+1}..) + (-1)^{i+1} F(k1..k_i).k_{i+1}
  with the right action (f.h)(k; ...) = f(hk; ...).
"""

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from .circle import CircleValue
from .config import get_settings
from .errors import (
    DomainMismatch,
    InputError,
    InternalVerificationFailed,
    InvalidAction,
    NoSolutionAtLevel,
    NotACocycle,
    SizeLimitExceeded,
)
from .group import subgroup
from .linalg import INT64_SAFE, factorize, local_smith, solve_mod


# --------------------------------------------------------------------------
# bases


class Group:
    """The one-object groupoid of ``G``."""

    npts = None

    def __init__(self, G):
        self.G = G

    def shape(self, n):
        return (self.G.order,) * n

    @property
    def order(self):
        return self.G.order

    def __eq__(self, other):
        return type(other) is Group and other.G == self.G

    def __hash__(self):
        return hash(("group", self.G))

    def __repr__(self):
        return f"Group(order={self.G.order})"

    def to_json(self):
        return {"kind": "group", "group": self.G.to_json()}


class ActionGroupoid:
    """Action groupoid of a right action ``act[n, g] = n.g`` of ``G`` on ``npts`` points."""

    def __init__(self, npts, G, act, check=True):
        act = np.asarray(act, dtype=np.int64)
        if act.shape != (npts, G.order):
            raise InvalidAction(f"action table must have shape ({npts}, {G.order})")
        act.setflags(write=False)
        self.npts = int(npts)
        self.G = G
        self.act = act
        if check:
            self.validate()

    @classmethod
    def translation(cls, K, pi):
        """``K`` as a right ``G``-set through ``pi: G -> K`` acting by right multiplication."""
        return cls(K.order, pi.source, K.table[:, pi.image], check=False)

    def validate(self):
        act, T = self.act, self.G.table
        if (act < 0).any() or (act >= self.npts).any():
            raise InvalidAction("action table entries out of range")
        bad = np.nonzero(act[:, 0] != np.arange(self.npts))[0]
        if len(bad):
            raise InvalidAction("identity does not fix every point", witness=(int(bad[0]), 0))
        lhs = act[act]  # lhs[n, g, h] = (n.g).h
        rhs = act[:, T]  # rhs[n, g, h] = n.(gh)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            raise InvalidAction("action is not compatible with the product", witness=tuple(int(v) for v in bad[0]))

    def shape(self, n):
        return (self.npts,) + (self.G.order,) * n

    @property
    def order(self):
        return self.G.order

    @cached_property
    def orbits(self):
        seen = -np.ones(self.npts, dtype=np.int64)
        out = []
        for p in range(self.npts):
            if seen[p] < 0:
                members = np.unique(self.act[p])
                seen[members] = len(out)
                out.append(members)
        return out

    def __eq__(self, other):
        return (
            type(other) is ActionGroupoid
            and other.G == self.G
            and np.array_equal(other.act, self.act)
        )

    def __hash__(self):
        return hash(("groupoid", self.G, self.act.tobytes()))

    def __repr__(self):
        return f"ActionGroupoid(points={self.npts}, order={self.G.order})"

    def to_json(self):
        return {
            "kind": "groupoid",
            "group": self.G.to_json(),
            "points": self.npts,
            "action": self.act.tolist(),
        }


def _lead(base):
    return 1 if isinstance(base, ActionGroupoid) else 0


# --------------------------------------------------------------------------
# array-level differentials


def _grids(shape):
    """Open index grids for the leading axes listed in ``shape``."""
    k = len(shape)
    out = []
    for i, size in enumerate(shape):
        s = [1] * k
        s[i] = size
        out.append(np.arange(size).reshape(s))
    return out


def delta_array(f, n, table, act=None):
    """Differential of a raw cochain array (no modular reduction).

    ``f`` has ``n`` group axes, a leading point axis when ``act`` is given,
    and any number of trailing axes that ride along untouched.
    """
    m = table.shape[0]
    lead = 0 if act is None else 1
    out_shape = ((act.shape[0],) if lead else ()) + (m,) * (n + 1)
    idx = _grids(out_shape)
    pts = idx[:lead]
    g = idx[lead:]
    terms = []
    if lead:
        first = [act[pts[0], g[0]]] + g[1:]
    else:
        first = g[1:]
    terms.append(f[tuple(first)])
    for i in range(n):
        args = pts + g[:i] + [table[g[i], g[i + 1]]] + g[i + 2:]
        t = f[tuple(args)]
        terms.append(-t if i % 2 == 0 else t)
    last = f[tuple(pts + g[:n])]
    terms.append(-last if n % 2 == 0 else last)
    out = np.zeros(out_shape + f.shape[lead + n:], dtype=f.dtype)
    for t in terms:
        out = out + t
    return out


def module_delta_array(F, i, table, point_table=None, proj=None):
    """``d_K`` on an array with ``i`` outer axes followed by an inner cochain.

    Outer arguments multiply with ``table``.  The inner cochain's first axis
    is the point axis moved by the right action ``(f.h)(k; ...) = f(hk; ...)``
    with ``hk = point_table[proj[h], k]``; by default the outer group is the
    point group itself.
    """
    point_table = table if point_table is None else point_table
    k = table.shape[0]
    out_shape = (k,) * (i + 1)
    idx = _grids(out_shape + (F.shape[i],))
    ks, p = idx[:-1], idx[-1]
    kk = [x[..., 0] for x in ks]
    terms = [F[tuple(kk[1:])]]
    for r in range(i):
        args = kk[:r] + [table[kk[r], kk[r + 1]]] + kk[r + 2:]
        t = F[tuple(args)]
        terms.append(-t if r % 2 == 0 else t)
    h = ks[i] if proj is None else proj[ks[i]]
    twisted = F[tuple(ks[:i]) + (point_table[h, p],)]
    terms.append(-twisted if i % 2 == 0 else twisted)
    out = np.zeros(out_shape + F.shape[i:], dtype=F.dtype)
    for t in terms:
        out = out + t
    return out


def normalized_index(size, n):
    """Index arrays of all n-tuples avoiding 0, lexicographic."""
    if n == 0:
        return ()
    grid = np.indices((size - 1,) * n).reshape(n, -1) + 1
    return tuple(grid)


def _delta_matrix(base, n, normalized=True):
    """Integer matrix of d: C^n -> C^{n+1} in (normalized) coordinates.

    Cached on the base; columns are tuples of ``C^n`` in lexicographic order.
    """
    cache = base.__dict__.setdefault("_matrices", {})
    key = (n, normalized)
    if key in cache:
        return cache[key]
    table = base.G.table
    lead = _lead(base)
    in_idx = _coord_index(base, n, normalized)
    out_idx = _coord_index(base, n + 1, normalized)
    ncols = len(in_idx[0]) if in_idx else 1
    nrows = len(out_idx[0]) if out_idx else 1
    cap = get_settings().max_matrix_dim
    if max(ncols, nrows) > cap:
        raise SizeLimitExceeded(f"matrix of size {nrows}x{ncols} exceeds dimension cap {cap}")
    basis = np.zeros(base.shape(n) + (ncols,), dtype=np.int64)
    basis[in_idx + (np.arange(ncols),)] = 1
    act = base.act if lead else None
    out = delta_array(basis, n, table, act)
    D = out[out_idx] if out_idx else out.reshape(1, ncols)
    D.setflags(write=False)
    cache[key] = D
    return D


def _coord_index(base, n, normalized):
    lead = _lead(base)
    m = base.G.order
    if normalized:
        group_part = normalized_index(m, n)
        if lead:
            if n == 0:
                return (np.arange(base.npts),)
            count = len(group_part[0])
            pts = np.repeat(np.arange(base.npts), count)
            return (pts,) + tuple(np.tile(x, base.npts) for x in group_part)
        return group_part
    shape = base.shape(n)
    if not shape:
        return ()
    return tuple(np.indices(shape).reshape(len(shape), -1))


# --------------------------------------------------------------------------
# cochains


def _as_num(values, den):
    dtype = object if den >= INT64_SAFE else np.int64
    arr = np.asarray(values)
    if arr.dtype == object or dtype is object:
        arr = np.array(arr, dtype=object)
    else:
        arr = arr.astype(np.int64)
    return arr % den


class Cochain:
    """A Q/Z-valued cochain ``num / den`` on a group or action groupoid."""

    def __init__(self, base, degree, num, den=1):
        den = int(den)
        if den <= 0:
            raise InputError("denominator must be positive")
        num = _as_num(num, den)
        if num.shape != base.shape(degree):
            raise DomainMismatch(f"values of shape {num.shape} do not fit degree {degree} on {base}")
        num.setflags(write=False)
        self.base = base
        self.degree = int(degree)
        self.num = num
        self.den = den

    @classmethod
    def zero(cls, base, degree):
        return cls(base, degree, np.zeros(base.shape(degree), dtype=np.int64), 1)

    @classmethod
    def from_function(cls, base, degree, func):
        """Tabulate ``func(*args)`` returning anything CircleValue accepts."""
        shape = base.shape(degree)
        vals = {}
        for args in np.ndindex(*shape) if shape else [()]:
            v = func(*args)
            if not isinstance(v, CircleValue):
                v = CircleValue.parse(v) if isinstance(v, str) else _circle(v)
            vals[args] = v
        den = math.lcm(*[v.denominator for v in vals.values()]) if vals else 1
        num = np.zeros(shape, dtype=object if den >= INT64_SAFE else np.int64)
        for args, v in vals.items():
            num[args] = v.numerator * (den // v.denominator)
        return cls(base, degree, num, den)

    @property
    def G(self):
        return self.base.G

    def __getitem__(self, args):
        if not isinstance(args, tuple):
            args = (args,)
        return CircleValue(int(self.num[args]), self.den)

    value = __getitem__

    def at_level(self, level):
        """Numerators over ``level``; ``den`` must divide ``level``."""
        if level % self.den:
            raise InputError(f"level {level} is not a multiple of {self.den}")
        f = level // self.den
        return _as_num(self.num * f if f != 1 else self.num, level)

    def _common(self, other):
        if self.base != other.base or self.degree != other.degree:
            raise DomainMismatch("cochains live on different bases or degrees")
        den = math.lcm(self.den, other.den)
        return self.at_level(den), other.at_level(den), den

    def __add__(self, other):
        a, b, den = self._common(other)
        return Cochain(self.base, self.degree, a + b, den)

    def __sub__(self, other):
        a, b, den = self._common(other)
        return Cochain(self.base, self.degree, a - b, den)

    def __neg__(self):
        return Cochain(self.base, self.degree, -self.num, self.den)

    def __mul__(self, n):
        return Cochain(self.base, self.degree, self.num * int(n), self.den)

    __rmul__ = __mul__

    def reduced(self):
        g = math.gcd(self.den, *[int(x) for x in np.unique(self.num)])
        if g <= 1:
            return self
        return Cochain(self.base, self.degree, self.num // g, self.den // g)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        if self.base != other.base or self.degree != other.degree:
            return False
        a, b, _ = self._common(other)
        return bool((a == b).all())

    __hash__ = None

    def is_zero(self):
        return not np.any(self.num)

    @property
    def normalized(self):
        return is_normalized_array(self.num, self.degree, _lead(self.base))

    def __repr__(self):
        return f"Cochain(degree={self.degree}, den={self.den}, base={self.base!r})"

    def entries(self):
        """Nonzero ``(args, CircleValue)`` pairs in lexicographic order."""
        nz = np.argwhere(self.num != 0)
        return [(tuple(int(v) for v in a), self[tuple(a)]) for a in nz]

    def to_json(self):
        return {
            "base": self.base.to_json(),
            "degree": self.degree,
            "normalized": self.normalized,
            "entries": [{"args": list(a), "value": str(v)} for a, v in self.entries()],
        }


def _circle(v):
    from fractions import Fraction

    fr = Fraction(v)
    return CircleValue(fr.numerator, fr.denominator)


def is_normalized_array(arr, degree, lead=0):
    for i in range(degree):
        sl = (slice(None),) * (lead + i) + (0,)
        if np.any(arr[sl]):
            return False
    return True


class AbelianCochain:
    """A cochain valued in a finite abelian group ``A`` (tuple coordinates)."""

    def __init__(self, base, degree, A, values):
        values = np.asarray(values, dtype=np.int64)
        shape = base.shape(degree) + (A.rank,)
        if values.shape != shape:
            values = values.reshape(shape)
        if A.rank:
            values = values % np.array(A.factors, dtype=np.int64)
        values.setflags(write=False)
        self.base = base
        self.degree = int(degree)
        self.A = A
        self.values = values

    @classmethod
    def zero(cls, base, degree, A):
        return cls(base, degree, A, np.zeros(base.shape(degree) + (A.rank,), dtype=np.int64))

    @property
    def G(self):
        return self.base.G

    def __getitem__(self, args):
        if not isinstance(args, tuple):
            args = (args,)
        return tuple(int(v) for v in self.values[args])

    def _check(self, other):
        if self.base != other.base or self.degree != other.degree or self.A != other.A:
            raise DomainMismatch("abelian cochains do not match")

    def __add__(self, other):
        self._check(other)
        return AbelianCochain(self.base, self.degree, self.A, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return AbelianCochain(self.base, self.degree, self.A, self.values - other.values)

    def __neg__(self):
        return AbelianCochain(self.base, self.degree, self.A, -self.values)

    def __eq__(self, other):
        if not isinstance(other, AbelianCochain):
            return NotImplemented
        return (
            self.base == other.base
            and self.degree == other.degree
            and self.A == other.A
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def is_zero(self):
        return not np.any(self.values)

    @property
    def normalized(self):
        return is_normalized_array(self.values, self.degree, _lead(self.base))

    def component(self, i):
        """The ``i``-th coordinate as a Z/d_i-valued Cochain (values ``x / d_i``)."""
        return Cochain(self.base, self.degree, self.values[..., i], self.A.factors[i])

    def __repr__(self):
        return f"AbelianCochain(degree={self.degree}, A={self.A!r})"

    def to_json(self):
        nz = np.argwhere((self.values != 0).any(axis=-1)) if self.A.rank else []
        return {
            "base": self.base.to_json(),
            "degree": self.degree,
            "coefficients": self.A.to_json(),
            "normalized": self.normalized,
            "entries": [
                {"args": [int(v) for v in a], "value": list(self[tuple(a)])} for a in nz
            ],
        }


class KValuedCochain:
    """``F(k_1..k_i)`` a groupoid cochain on ``K x G`` for every i-tuple of ``K``.

    ``num`` has shape ``(|K|,) * outer_degree + inner_base.shape(inner_degree)``.
    The inner groupoid has the points of ``K`` and the module action is
    ``(f.h)(k; ...) = f(hk; ...)``.
    """

    def __init__(self, K, outer_degree, inner_base, inner_degree, num, den):
        if inner_base.npts != K.order:
            raise DomainMismatch("inner groupoid must have the points of K")
        self.K = K
        self.outer_degree = int(outer_degree)
        self.inner_base = inner_base
        self.inner_degree = int(inner_degree)
        shape = (K.order,) * outer_degree + inner_base.shape(inner_degree)
        num = _as_num(num, den)
        if num.shape != shape:
            raise DomainMismatch(f"values of shape {num.shape}, expected {shape}")
        num.setflags(write=False)
        self.num = num
        self.den = int(den)

    def inner(self, *ks):
        return Cochain(self.inner_base, self.inner_degree, self.num[tuple(ks)], self.den)

    def act(self, h):
        """The right action by ``h`` on every inner cochain."""
        i = self.outer_degree
        moved = np.take(self.num, self.K.table[h], axis=i)
        return KValuedCochain(self.K, i, self.inner_base, self.inner_degree, moved, self.den)

    def __sub__(self, other):
        den = math.lcm(self.den, other.den)
        a = self.num * (den // self.den)
        b = other.num * (den // other.den)
        return KValuedCochain(self.K, self.outer_degree, self.inner_base, self.inner_degree, a - b, den)

    def is_zero(self):
        return not np.any(self.num)


# --------------------------------------------------------------------------
# differentials


def delta_group(f):
    if not isinstance(f.base, Group):
        raise DomainMismatch("delta_group needs a group base")
    return _delta(f)


def delta_groupoid(f):
    if not isinstance(f.base, ActionGroupoid):
        raise DomainMismatch("delta_groupoid needs an action-groupoid base")
    return _delta(f)


def delta(f):
    """The bar differential on whichever base ``f`` lives."""
    return _delta(f)


def _delta(f):
    act = f.base.act if isinstance(f.base, ActionGroupoid) else None
    if isinstance(f, AbelianCochain):
        vals = delta_array(f.values, f.degree, f.G.table, act)
        return AbelianCochain(f.base, f.degree + 1, f.A, vals)
    out = delta_array(f.num, f.degree, f.G.table, act)
    return Cochain(f.base, f.degree + 1, out, f.den)


def d_K(F):
    """The module differential with the right-action twist on the last face."""
    out = module_delta_array(F.num, F.outer_degree, F.K.table)
    return KValuedCochain(F.K, F.outer_degree + 1, F.inner_base, F.inner_degree, out, F.den)


def delta_inner(F):
    """Apply the groupoid differential to every inner cochain of ``F``."""
    base = F.inner_base
    i = F.outer_degree
    arr = np.moveaxis(F.num, list(range(i)), list(range(F.num.ndim - i, F.num.ndim)))
    out = delta_array(arr, F.inner_degree, base.G.table, base.act)
    out = np.moveaxis(out, list(range(out.ndim - i, out.ndim)), list(range(i)))
    return KValuedCochain(F.K, i, base, F.inner_degree + 1, out, F.den)


@dataclass(frozen=True)
class CocycleCheck:
    ok: bool
    witness: tuple = None

    def __bool__(self):
        return self.ok


def is_cocycle(f):
    """Whether the relevant differential vanishes; otherwise the first bad tuple."""
    if isinstance(f, KValuedCochain):
        d = d_K(f).num
    elif isinstance(f, AbelianCochain):
        d = _delta(f).values
        d = d.any(axis=-1) if f.A.rank else np.zeros(d.shape[:-1], dtype=bool)
    else:
        d = _delta(f).num
    bad = np.argwhere(d != 0)
    if len(bad):
        return CocycleCheck(False, tuple(int(v) for v in bad[0]))
    return CocycleCheck(True)


def require_cocycle(f, what="cochain"):
    check = is_cocycle(f)
    if not check:
        raise NotACocycle(f"{what} is not a cocycle", witness=check.witness)


# --------------------------------------------------------------------------
# pullbacks and restriction


def pullback(f, pi):
    """Precompose every argument slot with ``pi: G -> K``."""
    if not isinstance(f.base, Group) or pi.target != f.G:
        raise DomainMismatch("pullback needs a cochain on the target group")
    base = Group(pi.source)
    if f.degree == 0:
        idx = ()
    else:
        idx = np.ix_(*([pi.image] * f.degree))
    if isinstance(f, AbelianCochain):
        return AbelianCochain(base, f.degree, f.A, f.values[idx])
    return Cochain(base, f.degree, f.num[idx], f.den)


def pullback_to_groupoid(f, groupoid):
    """Forget the point: ``(pi* f)(k; g...) = f(g...)``."""
    if not isinstance(f.base, Group) or f.G != groupoid.G:
        raise DomainMismatch("cochain and groupoid have different groups")
    shape = groupoid.shape(f.degree)
    if isinstance(f, AbelianCochain):
        vals = np.broadcast_to(f.values, shape + (f.A.rank,)).copy()
        return AbelianCochain(groupoid, f.degree, f.A, vals)
    return Cochain(groupoid, f.degree, np.broadcast_to(f.num, shape).copy(), f.den)


def restrict_to_subgroup(f, elements):
    """Restrict the arguments to a subgroup, returned as a cochain on that group."""
    H, inc = subgroup(f.G, elements)
    return pullback(f, inc)


# --------------------------------------------------------------------------
# normalization


def normalize(c):
    """A normalized cocycle cohomologous to ``c``; returns ``(c', u)`` with ``c = c' + du``."""
    if c.normalized:
        return c, Cochain.zero(c.base, c.degree - 1)
    require_cocycle(c)
    n = c.degree
    level = c.den * c.base.order
    D = _delta_matrix(c.base, n - 1, normalized=False)
    # rows of D belonging to degenerate tuples
    full = _coord_index(c.base, n, False)
    lead = _lead(c.base)
    degenerate = np.zeros(len(full[0]), dtype=bool)
    for i in range(lead, lead + n):
        degenerate |= full[i] == 0
    rhs = c.at_level(level)[full][degenerate]
    x = solve_mod(D[degenerate], rhs, level)
    if x is None:
        raise InternalVerificationFailed("normalization failed; cochain is not a cocycle")
    u = Cochain(c.base, n - 1, _scatter(c.base, n - 1, x, False), level)
    out = c - delta(u)
    if not out.normalized:
        raise InternalVerificationFailed("normalization left degenerate entries")
    return out, u


def _scatter(base, n, x, normalized):
    arr = np.zeros(base.shape(n), dtype=np.asarray(x).dtype)
    idx = _coord_index(base, n, normalized)
    if idx:
        arr[idx] = x
    else:
        arr[()] = x[0]
    return arr


# --------------------------------------------------------------------------
# coboundary solving


def solve_level(c, level_multiplier=None):
    mult = get_settings().level_multiplier if level_multiplier is None else int(level_multiplier)
    return c.den * c.base.order * mult


def solve_coboundary(c, level_multiplier=None, check=True):
    """A cochain ``b`` with ``db = c``.

    Works at level ``L = den(c) * |G| * multiplier``.  For cocycles of degree
    at least one that level always suffices: an exact ``c`` lifts to an
    integer cocycle ``z / den`` and ``|G| z`` is an integer coboundary.
    Raises :class:`NoSolutionAtLevel` when no solution exists there.  The
    result is normalized whenever ``c`` is.
    """
    n = c.degree
    if n < 1:
        raise InputError("only cochains of degree >= 1 can be coboundaries")
    if check:
        require_cocycle(c)
    level = solve_level(c, level_multiplier)
    if isinstance(c.base, ActionGroupoid):
        from .transfer import solve_groupoid

        num = solve_groupoid(c.base, n, c.at_level(level)[..., None], level, c.normalized)
        if num is None:
            raise NoSolutionAtLevel("no primitive exists at this level", level=level)
        b = Cochain(c.base, n - 1, num[..., 0], level)
    else:
        x = solve_group_array(c.G, n, c.at_level(level)[..., None], level, c.normalized)
        if x is None:
            raise NoSolutionAtLevel("no primitive exists at this level", level=level)
        b = Cochain(c.base, n - 1, x[..., 0], level)
    if delta(b) != c:
        raise InternalVerificationFailed("coboundary solve produced a wrong primitive")
    return b.reduced()


def solve_group_array(G, n, rhs, modulus, normalized=True):
    """Solve ``db = rhs`` mod ``modulus`` for raw arrays with a trailing batch axis.

    ``rhs`` has shape ``(|G|,) * n + (batch,)``.  Returns the primitive array
    of shape ``(|G|,) * (n - 1) + (batch,)`` or None.
    """
    base = _group_base(G)
    batch = rhs.shape[-1]
    if not np.any(rhs % modulus):
        return np.zeros(base.shape(n - 1) + (batch,), dtype=np.int64)
    if n == 1 and normalized:
        # normalized 0-cochains are constants with zero differential
        if np.any(rhs % modulus):
            return None
        return np.zeros((batch,), dtype=np.int64)
    D = _delta_matrix(base, n - 1, normalized)
    out_idx = _coord_index(base, n, normalized)
    B = rhs[out_idx] if out_idx else rhs.reshape(1, batch)
    x = solve_cached(base, ("group", n - 1, normalized), D, B, modulus)
    if x is None:
        return None
    arr = np.zeros(base.shape(n - 1) + (batch,), dtype=x.dtype)
    in_idx = _coord_index(base, n - 1, normalized)
    if in_idx:
        arr[in_idx] = x
    else:
        arr[...] = x[0]
    return arr


def _group_base(G):
    base = G.__dict__.get("_bar_base")
    if base is None:
        base = Group(G)
        G.__dict__["_bar_base"] = base
    return base


def solve_cached(owner, key, D, B, modulus):
    """``solve_mod`` with the per-prime eliminations of ``D`` cached on ``owner``."""
    cache = owner.__dict__.setdefault("_factorizations", {})
    if D.shape[1] == 0 or D.shape[0] > 600:
        # the remembered transform is rows x rows; not worth it for big systems
        return solve_mod(D, B, modulus)
    X = None
    for p, e in factorize(modulus).items():
        q = p**e
        fk = key + (p, e)
        fac = cache.get(fk)
        if fac is None:
            fac = _Elimination(D, p, e)
            cache[fk] = fac
        Xp = fac.solve(B % q)
        if Xp is None:
            return None
        cof = modulus // q
        c = (cof * pow(cof % q, -1, q)) % modulus
        term = (Xp.astype(object) * c) if modulus >= INT64_SAFE else Xp * c
        X = term if X is None else X + term
    return X % modulus


class _Elimination:
    """Row-reduction of ``D`` over Z/p^e remembered as a transform ``U``.

    ``U @ D`` is upper-staircase with unit-times-power pivots; applying ``U``
    to a new right-hand side makes each solve a back substitution.
    """

    def __init__(self, D, p, e):
        M = p**e
        rows = D.shape[0]
        ls = local_smith(D, p, e, B=np.eye(rows, dtype=np.int64))
        self.p, self.e, self.M = p, e, M
        self.R = ls.A
        self.U = ls.B
        self.pivots = ls.pivots
        self.units = ls.units
        self.colperm = ls.colperm

    def solve(self, B):
        M = self.M
        B = (self.U @ (B % M)) % M
        rank = len(self.pivots)
        if np.any(B[rank:] % M):
            return None
        cols = self.R.shape[1]
        X = np.zeros((cols, B.shape[1]), dtype=B.dtype)
        for (r, _, t), uinv in zip(reversed(self.pivots), reversed(self.units)):
            rhs = (B[r] - self.R[r, r + 1:] @ X[r + 1:]) % M if r + 1 < cols else B[r] % M
            pt = self.p**t
            if np.any(rhs % pt):
                return None
            X[r] = ((rhs // pt) * uinv) % M
        out = np.zeros_like(X)
        out[self.colperm] = X
        return out


def classes_equal(c1, c2, level_multiplier=None):
    """Whether two cocycles differ by a coboundary."""
    require_cocycle(c1)
    require_cocycle(c2)
    diff = c1 - c2
    if diff.is_zero():
        return True
    if isinstance(c1, AbelianCochain):
        return solve_abelian_coboundary(diff) is not None
    try:
        solve_coboundary(diff, level_multiplier, check=False)
    except NoSolutionAtLevel:
        return False
    return True


def solve_abelian_coboundary(c):
    """``b`` with ``db = c`` for an ``A``-valued cocycle (exact, no level), or None."""
    n = c.degree
    if n < 1:
        raise InputError("only cochains of degree >= 1 can be coboundaries")
    A = c.A
    out = np.zeros(c.base.shape(n - 1) + (A.rank,), dtype=np.int64)
    for i, d in enumerate(A.factors):
        rhs = c.values[..., i][..., None]
        if isinstance(c.base, ActionGroupoid):
            from .transfer import solve_groupoid

            x = solve_groupoid(c.base, n, rhs, d, c.normalized, level_fixed=True)
        else:
            x = solve_group_array(c.G, n, rhs, d, c.normalized)
        if x is None:
            return None
        out[..., i] = x[..., 0]
    b = AbelianCochain(c.base, n - 1, A, out)
    if delta(b) != c:
        raise InternalVerificationFailed("abelian coboundary solve failed verification")
    return b


# --------------------------------------------------------------------------
# cohomology via integer coefficients one degree up


@dataclass
class CohomologyGroup:
    """Invariant factors with one representative cocycle per factor."""

    factors: tuple
    generators: list = field(default_factory=list)

    @property
    def order(self):
        return math.prod(self.factors)

    def to_json(self):
        return {"factors": list(self.factors), "generators": [g.to_json() for g in self.generators]}


def cohomology_group(G, n):
    """``H^n(G, Q/Z)`` for ``n >= 1`` as the torsion of ``coker(d_n)`` over Z.

    ``H^n(G, Q/Z) = H^{n+1}(G, Z)`` and both are killed by ``|G|``, so local
    Smith forms modulo ``p^(v_p(|G|) + 1)`` see every torsion factor.  The
    generator for a factor ``p^t`` is the column transform divided by ``p^t``.
    """
    if n < 1:
        raise InputError("cohomology_group needs n >= 1")
    base = _group_base(G)
    cache = base.__dict__.setdefault("_cohomology", {})
    if n not in cache:
        cache[n] = _torsion_cohomology(base, n)
    hit = cache[n]
    return CohomologyGroup(hit.factors, list(hit.generators))


def _torsion_cohomology(base, n):
    m = base.order
    if m == 1:
        return CohomologyGroup(())
    D = _delta_matrix(base, n, normalized=True)
    per_prime = []
    for p, v in factorize(m).items():
        e = v + 1
        ls = local_smith(D, p, e, track_columns=True)
        cyc = []
        for (r, _, t) in ls.pivots:
            if 0 < t < e:
                cyc.append((p**t, ls.Q[:, r] % (p**e), p**t))
        cyc.sort(key=lambda x: -x[0])
        per_prime.append(cyc)
    rank = max((len(c) for c in per_prime), default=0)
    factors = []
    gens = []
    for j in range(rank):
        order = 1
        total = None
        for cyc in per_prime:
            if j < len(cyc):
                q, col, pt = cyc[j]
                order *= q
                part = Cochain(base, n, _scatter(base, n, col, True), pt)
                total = part if total is None else total + part
        factors.append(order)
        gens.append(total.reduced())
    factors.reverse()
    gens.reverse()
    for g in gens:
        if not is_cocycle(g):
            raise InternalVerificationFailed("cohomology generator is not a cocycle")
    return CohomologyGroup(tuple(factors), gens)


def groupoid_cohomology_order(groupoid, n, method="transfer"):
    """``|H^n(N x G, Q/Z)|`` for ``n >= 1``.

    With ``method="transfer"`` this is the product over orbits of the
    stabilizer cohomology; ``"direct"`` runs the Smith form on the groupoid
    complex itself.
    """
    if method == "direct":
        return _torsion_cohomology(groupoid, n).order
    from .transfer import orbit_transfers

    total = 1
    for tr in orbit_transfers(groupoid):
        total *= cohomology_group(tr.H, n).order
    return total


def cohomology_mod(G, p, d):
    """``H^p(G, Z/d)`` with Z/d-valued representative cocycles (as integer arrays).

    Uses the universal coefficient splitting
    ``H^p(Z/d) = H^p(Z) (x) Z/d  +  Tor(H^{p+1}(Z), Z/d)`` with
    ``H^p(Z) = H^{p-1}(Q/Z)`` for ``p >= 2``: Bocksteins of the degree
    ``p - 1`` generators and the d-torsion of the degree ``p`` generators.
    Returns ``(orders, reps)`` with each rep an integer array mod ``d``.
    """
    if p == 0:
        return [d], [np.ones((), dtype=np.int64)]
    orders, reps = [], []
    if p >= 2:
        low = cohomology_group(G, p - 1)
        for a, chi in zip(low.factors, low.generators):
            g = math.gcd(a, d)
            if g == 1:
                continue
            x = chi.at_level(a).astype(np.int64)
            z = delta_array(x, p - 1, G.table) // a
            orders.append(g)
            reps.append(z % d)
    top = cohomology_group(G, p)
    for a, y in zip(top.factors, top.generators):
        g = math.gcd(a, d)
        if g == 1:
            continue
        x = y.at_level(a).astype(np.int64)
        orders.append(g)
        reps.append((x * (d // g)) % d)
    for z in reps:
        if np.any(delta_array(z, p, G.table) % d):
            raise InternalVerificationFailed("mod-d representative is not a cocycle")
    return orders, reps


def abelian_classes(K, S, p=2):
    """All classes of ``H^p(K, S)`` as one representative AbelianCochain each.

    Enumerates products of the per-factor universal-coefficient generators.
    """
    base = _group_base(K)
    comps = []
    for i, d in enumerate(S.factors):
        orders, reps = cohomology_mod(K, p, d)
        comps.append((orders, reps))
    out = []
    ranges = [list(np.ndindex(*orders)) if orders else [()] for orders, _ in comps]
    import itertools

    for choice in itertools.product(*ranges):
        vals = np.zeros(base.shape(p) + (S.rank,), dtype=np.int64)
        for i, ((orders, reps), coeffs) in enumerate(zip(comps, choice)):
            for c, z in zip(coeffs, reps):
                vals[..., i] += c * z
        out.append(AbelianCochain(base, p, S, vals))
    return out
