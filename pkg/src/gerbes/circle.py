"""Exact Q/Z arithmetic, characters of finite abelian groups and bilinear forms.

A character of ``S = Z/d_1 x ... x Z/d_r`` is stored by its values on the
standard generators.  The dual group is identified with tuples ``r`` where
``rho(g_i) = r_i / d_i``, so the dual basis and tuple coordinates coincide.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import DomainMismatch, InputError
from .group import FiniteAbelianGroup, GroupHom


class CircleValue:
    """An element of Q/Z held as a reduced fraction in [0, 1)."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator=0, denominator=1):
        numerator, denominator = int(numerator), int(denominator)
        if denominator <= 0:
            raise InputError("denominator must be positive")
        numerator %= denominator
        g = math.gcd(numerator, denominator)
        if numerator == 0:
            numerator, denominator = 0, 1
        else:
            numerator //= g
            denominator //= g
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    def __setattr__(self, name, value):
        raise AttributeError("CircleValue is immutable")

    @classmethod
    def parse(cls, text):
        """Read ``"p/q"``, ``"0"`` or an integer; the inverse of ``str``."""
        if isinstance(text, int):
            return cls(text, 1)
        try:
            frac = Fraction(str(text).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a circle value: {text!r}") from exc
        return cls(frac.numerator, frac.denominator)

    def as_fraction(self):
        return Fraction(self.numerator, self.denominator)

    def __add__(self, other):
        other = _coerce(other)
        return CircleValue(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self):
        return CircleValue(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, n):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        return CircleValue(self.numerator * int(n), self.denominator)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.numerator == 0
        if not isinstance(other, CircleValue):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __bool__(self):
        return self.numerator != 0

    @property
    def order(self):
        return self.denominator

    def __str__(self):
        return "0" if self.numerator == 0 else f"{self.numerator}/{self.denominator}"

    def __repr__(self):
        return f"CircleValue({self.numerator}, {self.denominator})"


def _coerce(x):
    if isinstance(x, CircleValue):
        return x
    if isinstance(x, (int, np.integer)):
        return CircleValue(int(x), 1)
    if isinstance(x, Fraction):
        return CircleValue(x.numerator, x.denominator)
    if isinstance(x, str):
        return CircleValue.parse(x)
    raise TypeError(f"cannot treat {x!r} as an element of Q/Z")


ZERO = CircleValue(0, 1)


@dataclass(frozen=True)
class Character:
    """A homomorphism ``S -> Q/Z`` given by its values on the generators of ``S``."""

    domain: FiniteAbelianGroup
    values: tuple

    def __post_init__(self):
        vals = tuple(_coerce(v) for v in self.values)
        if len(vals) != self.domain.rank:
            raise DomainMismatch("one value per invariant factor is required")
        for d, v in zip(self.domain.factors, vals):
            if d % v.denominator:
                raise InputError(f"value {v} is not killed by {d}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_tuple(cls, S, r):
        """The character with ``rho(g_i) = r_i / d_i``."""
        return cls(S, tuple(CircleValue(int(x), d) for x, d in zip(r, S.factors)))

    def to_tuple(self):
        return tuple(
            (v.numerator * (d // v.denominator)) % d for v, d in zip(self.values, self.domain.factors)
        )

    def __call__(self, s):
        return evaluate(self, s)

    def __add__(self, other):
        if other.domain != self.domain:
            raise DomainMismatch("characters on different groups")
        return Character(self.domain, tuple(a + b for a, b in zip(self.values, other.values)))

    def to_json(self):
        return {"factors": list(self.domain.factors), "values": [str(v) for v in self.values]}


def dual_group(S):
    """The character group with its dual basis; same invariant factors as ``S``."""
    S_hat = FiniteAbelianGroup(S.factors)
    basis = [
        Character.from_tuple(S, [int(i == j) for j in range(S.rank)]) for i in range(S.rank)
    ]
    return S_hat, basis


def evaluate(rho, s):
    """``rho(s)`` for ``s`` an element tuple of ``rho.domain``."""
    s = tuple(int(x) for x in s)
    if len(s) != rho.domain.rank:
        raise DomainMismatch(f"element {s} does not belong to {rho.domain}")
    total = ZERO
    for x, v in zip(s, rho.values):
        total = total + v * x
    return total


def pairing_numerators(S):
    """Array ``P[i, j]`` with ``rho_i(s_j) = P[i, j] / exp(S)`` over all indices.

    Rows run over the dual group (tuple coordinates), columns over ``S``.
    """
    m = S.exponent
    el = S.elements
    weights = np.array([m // d for d in S.factors], dtype=np.int64)
    return ((el * weights) @ el.T) % m if S.rank else np.zeros((1, 1), dtype=np.int64)


def double_dual_iso(S):
    """The evaluation map ``S -> dual(dual(S))``.

    In dual-basis coordinates it is the identity on tuples; bijectivity is
    checked against the full pairing table rather than assumed.
    """
    S_hat, _ = dual_group(S)
    S_hathat, _ = dual_group(S_hat)
    P = pairing_numerators(S)  # P[rho, s]
    Q = pairing_numerators(S_hat)  # Q[x, rho] with x in the double dual
    # s goes to the x whose pairing with every rho matches rho(s)
    lookup = {tuple(Q[x].tolist()): x for x in range(S_hathat.order)}
    image = np.array([lookup[tuple(P[:, s].tolist())] for s in range(S.order)], dtype=np.int64)
    hom = GroupHom(S.as_group(), S_hathat.as_group(), image)
    if not hom.is_bijective():
        raise AssertionError("evaluation map is not bijective")
    return hom


@dataclass(frozen=True)
class BilinearForm:
    """``b(g_i, g_j) = matrix[i][j]`` on generators, extended bilinearly."""

    domain: FiniteAbelianGroup
    matrix: tuple

    def __post_init__(self):
        r = self.domain.rank
        rows = tuple(tuple(_coerce(v) for v in row) for row in self.matrix)
        if len(rows) != r or any(len(row) != r for row in rows):
            raise DomainMismatch("matrix must be rank x rank")
        d = self.domain.factors
        for i in range(r):
            for j in range(r):
                if d[i] % rows[i][j].denominator or d[j] % rows[i][j].denominator:
                    raise InputError(f"entry ({i},{j}) is not killed by the factor orders")
        object.__setattr__(self, "matrix", rows)

    def __call__(self, s, t):
        total = ZERO
        for i, x in enumerate(s):
            for j, y in enumerate(t):
                total = total + self.matrix[i][j] * (int(x) * int(y))
        return total

    def numerators(self, level):
        """All values as integers mod ``level``: ``table[s, t] = level * b(s, t)``."""
        el = self.domain.elements
        r = self.domain.rank
        B = np.zeros((r, r), dtype=np.int64)
        for i in range(r):
            for j in range(r):
                v = self.matrix[i][j]
                if level % v.denominator:
                    return None
                B[i, j] = v.numerator * (level // v.denominator)
        return (el @ B @ el.T) % level


def b_sharp(b):
    """``s -> b(s, -)`` as characters, plus whether this map is bijective."""
    S = b.domain
    chars = []
    for idx in range(S.order):
        s = S.element(idx)
        chars.append(Character(S, tuple(b(s, S.element(S.index(_unit(S.rank, j)))) for j in range(S.rank))))
    tuples = {c.to_tuple() for c in chars}
    return chars, len(tuples) == S.order


def _unit(r, j):
    return tuple(int(i == j) for i in range(r))
