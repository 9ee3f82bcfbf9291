"""JSON readers for groups, abelian groups and cochains.

Writers live on the types themselves (``to_json``); everything written
re-parses here.  Index-valued fields given alongside a table group refer to
the input labelling and are mapped through the relabelling permutation.
"""

import math

import numpy as np

from .circle import BilinearForm, CircleValue
from .cochain import ActionGroupoid, Cochain, Group
from .config import get_settings
from .errors import InputError, OrderLimitExceeded
from .group import (
    FiniteAbelianGroup,
    cyclic_group,
    direct_product,
    make_group_from_permutations,
    make_group_from_table,
)


def _require(obj, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise InputError(f"field {key!r} has the wrong type")
    return value


def _int_list(value, what):
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise InputError(f"{what} must be a list of integers")
    return [int(v) for v in value]


def parse_group(obj):
    """Group description to ``(G, relabel)`` with ``relabel[input index] = G index``."""
    kind = _require(obj, "kind", str)
    if kind == "table":
        table = _require(obj, "table", list)
        rows = [_int_list(r, "table row") for r in table]
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InputError("group table must be a non-empty square array")
        return make_group_from_table(np.array(rows, dtype=np.int64), obj.get("labels"))
    if kind == "perm":
        degree = _require(obj, "degree", int)
        gens = [_int_list(g, "generator") for g in _require(obj, "generators", list)]
        G = make_group_from_permutations(degree, gens)
        return G, np.arange(G.order)
    if kind == "abelian":
        G = cyclic_product(_int_list(_require(obj, "factors"), "factors"))
        return G, np.arange(G.order)
    raise InputError(f"unknown group kind {kind!r}")


def cyclic_product(orders):
    """``Z/d_1 x ... x Z/d_r`` in the given order, first factor most significant."""
    for d in orders:
        if d < 1:
            raise InputError(f"cyclic orders must be positive, got {d}")
    cap = get_settings().max_order
    if math.prod(orders) > cap:
        raise OrderLimitExceeded(f"group order {math.prod(orders)} exceeds cap {cap}")
    G = cyclic_group(1)
    for d in orders:
        G = direct_product(G, cyclic_group(d))
    return G


def parse_abelian(value):
    """A list of invariant factors, or ``{"kind": "abelian", "factors": [...]}``."""
    if isinstance(value, dict):
        value = _require(value, "factors")
    return FiniteAbelianGroup(_int_list(value, "factors"))


def remap(indices, relabel):
    relabel = np.asarray(relabel)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= len(relabel)):
        raise InputError("element index out of range")
    return relabel[idx]


def parse_base(obj):
    """A cochain base: a group description, ``{"kind": "group", ...}`` or a groupoid."""
    kind = _require(obj, "kind", str)
    if kind == "group":
        G, relabel = parse_group(_require(obj, "group", dict))
        return Group(G), relabel, None
    if kind == "groupoid":
        G, relabel = parse_group(_require(obj, "group", dict))
        npts = _require(obj, "points", int)
        act = np.array([_int_list(r, "action row") for r in _require(obj, "action", list)])
        if act.shape != (npts, G.order):
            raise InputError("action table has the wrong shape")
        new = np.empty_like(act)
        new[:, relabel] = act
        return ActionGroupoid(npts, G, new), relabel, None
    G, relabel = parse_group(obj)
    return Group(G), relabel, None


def parse_value(v):
    return CircleValue.parse(v)


def parse_cochain(obj, base=None, relabel=None):
    """Cochain JSON; ``base`` overrides (or supplies) the ``"base"`` field."""
    if base is None:
        base, relabel, _ = parse_base(_require(obj, "base", dict))
    degree = _require(obj, "degree", int)
    if degree < 0:
        raise InputError("degree must be non-negative")
    entries = obj.get("entries", [])
    if not isinstance(entries, list):
        raise InputError("entries must be a list")
    lead = 1 if isinstance(base, ActionGroupoid) else 0
    shape = base.shape(degree)
    parsed = []
    for e in entries:
        args = _int_list(_require(e, "args"), "args")
        if len(args) != len(shape):
            raise InputError(f"entry {args} has the wrong number of arguments")
        if lead:
            pt = args[0]
            if not 0 <= pt < shape[0]:
                raise InputError("point index out of range")
            args = [pt] + list(remap(args[1:], relabel))
        else:
            args = list(remap(args, relabel))
        parsed.append((tuple(args), parse_value(_require(e, "value"))))
    den = math.lcm(1, *(v.denominator for _, v in parsed))
    num = np.zeros(shape, dtype=np.int64)
    for args, v in parsed:
        num[args] = v.numerator * (den // v.denominator) % den
    return Cochain(base, degree, num, den)


def parse_form(S, value):
    """A bilinear form as a square matrix of circle values on the basis of ``S``."""
    rows = value.get("matrix") if isinstance(value, dict) else value
    if not isinstance(rows, list) or len(rows) != S.rank or any(
        not isinstance(r, list) or len(r) != S.rank for r in rows
    ):
        raise InputError(f"form must be a {S.rank}x{S.rank} matrix")
    return BilinearForm(S, tuple(tuple(parse_value(v) for v in r) for r in rows))


def parse_s_valued(S, value):
    """An element of ``S``: a residue tuple, an integer (rank one) or ``"p/q"`` (rank one)."""
    if isinstance(value, list):
        t = _int_list(value, "S element")
        if len(t) != S.rank:
            raise InputError("S element has the wrong length")
        return [x % d for x, d in zip(t, S.factors)]
    if S.rank != 1:
        raise InputError("scalar S values need S cyclic")
    d = S.factors[0]
    if isinstance(value, int) and not isinstance(value, bool):
        return [value % d]
    v = parse_value(value)
    if d % v.denominator:
        raise InputError(f"{value} is not in the subgroup (1/{d})Z/Z")
    return [v.numerator * (d // v.denominator) % d]


def parse_s_cochain(S, K, relabel, obj):
    """``F`` with shape ``(|K|, |K|, rank)`` from ``[{"args": [k1, k2], "value": ...}]``."""
    F = np.zeros((K.order, K.order, S.rank), dtype=np.int64)
    entries = obj.get("entries", []) if isinstance(obj, dict) else obj
    if not isinstance(entries, list):
        raise InputError("F entries must be a list")
    for e in entries:
        args = remap(_int_list(_require(e, "args"), "args"), relabel)
        if len(args) != 2:
            raise InputError("F takes two arguments")
        F[args[0], args[1]] = parse_s_valued(S, _require(e, "value"))
    return F


def s_cochain_json(S, F):
    """Inverse of :func:`parse_s_cochain` (nonzero entries only)."""
    F = np.asarray(F)
    nz = np.argwhere(F.any(axis=-1))
    return [{"args": [int(a), int(b)], "value": [int(v) for v in F[a, b]]} for a, b in nz]
