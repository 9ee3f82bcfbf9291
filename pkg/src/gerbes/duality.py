"""The fibrewise Pontrjagin dual of a multiplicative gerbe.

Given ``(G, alpha)`` and a central subgroup ``S`` with quotient ``K``:

1. ``beta`` on the action groupoid ``K x G`` with ``d beta = pi* alpha``;
2. ``gamma(h)`` with ``d gamma(h) = beta - beta.h`` for every ``h`` in ``K``;
3. ``F_hat(k1, k2)`` is minus ``(d_K gamma)(k1, k2)`` restricted to the
   fibre over the base point, a character of ``S``;
4. ``alpha_hat`` on ``G_hat = S_hat x_{F_hat} K`` comes from the explicit
   route: ``Phi(rho, k) = psi(rho)`` with ``psi(rho)(k, g) = rho(E(k, g))``,
   the defect ``D = p_hat*(d_K gamma) - d Phi`` vanishes on the fibre, is
   integrated along the section to ``eta``, and ``alpha_hat = d eta`` is
   constant in the point.

The two signs are the ones for which the explicit pair is reproduced:
the extracted class is ``[F_hat]`` and the dual of ``(G, 0)`` is
``rho_1(F(k_2, k_3))`` on the nose.

Everything is additive in Q/Z.  Numerators of characters use the pairing
table of :func:`gerbes.circle.pairing_numerators`.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .circle import double_dual_iso, dual_group, pairing_numerators
from .cochain import (
    AbelianCochain,
    ActionGroupoid,
    Cochain,
    Group,
    KValuedCochain,
    classes_equal,
    d_K,
    delta,
    delta_inner,
    is_cocycle,
    module_delta_array,
    pullback,
    pullback_to_groupoid,
    solve_abelian_coboundary,
    solve_coboundary,
    solve_level,
)
from .errors import (
    ClassMismatch,
    CompatibilityFailed,
    ComparisonNotIso,
    EtaSolveFailed,
    InternalVerificationFailed,
    NoSolutionAtLevel,
    NotACocycle,
    RestrictionNotCharacter,
)
from .gerbe import MultiplicativeGerbe, make_gerbe
from .group import (
    CentralExtensionData,
    FiniteAbelianGroup,
    GroupHom,
    central_extension,
    quotient_by_central,
    two_cocycle_violation,
)
from .transfer import solve_groupoid


@dataclass(frozen=True, eq=False)
class DualityInput:
    """A gerbe with a chosen central subgroup and the derived quotient data."""

    gerbe: MultiplicativeGerbe
    quotient: object  # CentralQuotient

    @property
    def G(self):
        return self.gerbe.G

    @property
    def S(self):
        return self.quotient.S

    @property
    def K(self):
        return self.quotient.K

    @property
    def groupoid(self):
        q = self.quotient
        cache = self.__dict__.get("_groupoid")
        if cache is None:
            cache = ActionGroupoid.translation(q.K, q.pi)
            object.__setattr__(self, "_groupoid", cache)
        return cache

    def fibre_index(self):
        """``E[k, g] = sigma(k) g sigma(k pi(g))^-1`` as a tuple index of ``S``."""
        cache = self.__dict__.get("_fibre")
        if cache is None:
            q = self.quotient
            G = q.G
            sec = q.section
            k = np.arange(q.K.order)[:, None]
            g = np.arange(G.order)[None, :]
            target = q.K.table[k, q.pi.image[g]]
            E = G.table[G.table[sec[k], g], G.inverse[sec[target]]]
            cache = q.s_index[E]
            if (cache < 0).any():
                raise InternalVerificationFailed("fibre transport left S")
            object.__setattr__(self, "_fibre", cache)
        return cache


def make_duality_input(gerbe, S_elements, s_structure=None):
    return DualityInput(gerbe, quotient_by_central(gerbe.G, S_elements, s_structure))


@dataclass(frozen=True, eq=False)
class OmegaWitness:
    beta: Cochain
    gamma: KValuedCochain

    def check(self, inp):
        """Both defining equations, exactly."""
        c = pullback_to_groupoid(inp.gerbe.alpha, inp.groupoid)
        if delta(self.beta) != c:
            return False
        g = self.gamma
        lhs = delta_inner(g)
        beta_k = KValuedCochain(
            inp.K, 0, inp.groupoid, 2, self.beta.num, self.beta.den
        )
        rhs = d_K(beta_k)
        den = math.lcm(lhs.den, rhs.den)
        return bool(
            ((lhs.num * (den // lhs.den) - rhs.num * (den // rhs.den)) % den == 0).all()
        )


def omega_membership(inp, level_multiplier=None):
    """The ``(beta, gamma)`` witness for membership in Omega(G, S).

    Raises :class:`NoSolutionAtLevel` carrying the failing stage.
    """
    groupoid = inp.groupoid
    c = pullback_to_groupoid(inp.gerbe.alpha, groupoid)
    try:
        beta = solve_coboundary(c, level_multiplier, check=False)
    except NoSolutionAtLevel as exc:
        raise NoSolutionAtLevel(
            "pi* alpha is not exact on the action groupoid", level=exc.level, stage="beta"
        ) from None
    K = inp.K
    level = solve_level(beta, level_multiplier)
    bnum = beta.at_level(level)
    # rhs[..., h] = beta - beta.h with (beta.h)(k; ...) = beta(hk; ...)
    moved = bnum[K.table.T]  # moved[h, k] = beta(hk), axes (h, k, g1, g2)
    rhs = np.moveaxis(bnum[None] - moved, 0, -1) % level
    sol = solve_groupoid(groupoid, 2, rhs, level, normalized=True)
    if sol is None:
        raise NoSolutionAtLevel("beta - beta.h is not exact for some h", level=level, stage="gamma")
    gamma = KValuedCochain(K, 1, groupoid, 1, np.moveaxis(sol, -1, 0), level)
    witness = OmegaWitness(beta, gamma)
    if not witness.check(inp):
        raise InternalVerificationFailed("Omega witness fails its equations")
    return witness


def in_omega(inp, level_multiplier=None):
    try:
        omega_membership(inp, level_multiplier)
    except NoSolutionAtLevel:
        return False
    return True


@dataclass(frozen=True, eq=False)
class DualExtension:
    S_hat: FiniteAbelianGroup
    F_hat: AbelianCochain
    G_hat: object
    iota: GroupHom
    pi: GroupHom
    section: np.ndarray


def _character_tuples(vals, den, S):
    """Read numerators ``vals[..., s] / den`` over ``S`` as dual-group tuples.

    Returns None if some slice is not a homomorphism.
    """
    if S.rank == 0:
        return np.zeros(vals.shape[:-1] + (0,), dtype=np.int64)
    e = S.exponent
    level = math.lcm(den, e)
    v = (vals * (level // den)) % level
    gens = [S.index([int(i == j) for j in range(S.rank)]) for i in range(S.rank)]
    r = np.stack([v[..., g] * d for g, d in zip(gens, S.factors)], axis=-1)
    if np.any(r % level):
        return None
    r = (r // level) % np.array(S.factors)
    P = pairing_numerators(S)  # P[rho, s] over e
    rho = S.indices(r)
    predicted = P[rho] * (level // e)
    if np.any((predicted - v) % level):
        return None
    return r


def extract_dual_extension(inp, witness):
    """The dual extension class ``F_hat`` read off from ``d_K gamma``."""
    q = inp.quotient
    S, K = q.S, q.K
    S_hat, _ = dual_group(S)
    dkg = d_K(witness.gamma)
    # restriction to the fibre over the base point: (e; s) for s in S
    vals = -dkg.num[:, :, 0][:, :, q.s_elements]
    r = _character_tuples(vals, dkg.den, S)
    if r is None:
        raise RestrictionNotCharacter("restriction of d_K gamma is not a character")
    bad = two_cocycle_violation(S_hat, K, r)
    if bad is not None:
        raise NotACocycle("extracted F_hat is not a 2-cocycle", witness=bad)
    F_hat = AbelianCochain(Group(K), 2, S_hat, r)
    G_hat, iota, pi, section = central_extension(CentralExtensionData(S_hat, K, r))
    return DualExtension(S_hat, F_hat, G_hat, iota, pi, section)


@dataclass(frozen=True, eq=False)
class DualGerbe:
    F_hat: AbelianCochain
    G_hat: object
    alpha_hat: Cochain
    extension: DualExtension
    eta_level: int

    @property
    def gerbe(self):
        return MultiplicativeGerbe(self.G_hat, self.alpha_hat)

    def s_hat_elements(self):
        """Indices of ``(rho, e)`` in ``G_hat`` in tuple order of ``S_hat``."""
        return self.extension.iota.image

    def to_json(self):
        return {
            "dual_group": self.G_hat.to_json(),
            "S_hat": self.extension.S_hat.to_json(),
            "F_hat": self.F_hat.to_json(),
            "alpha_hat": self.alpha_hat.to_json(),
        }


def dual_gerbe(inp, witness=None, level_multiplier=None):
    """The dual gerbe on ``G_hat`` through the explicit eta route."""
    if witness is None:
        witness = omega_membership(inp, level_multiplier)
    ext = extract_dual_extension(inp, witness)
    q = inp.quotient
    S, K = q.S, q.K
    G_hat = ext.G_hat
    nK, nH = K.order, G_hat.order
    e = S.exponent
    dkg = d_K(witness.gamma)
    level = math.lcm(dkg.den, e)
    P = pairing_numerators(S) * (level // e)  # P[rho, s] over level
    E = inp.fibre_index()
    rho_of = np.arange(nH) // nK
    k_of = np.arange(nH) % nK
    # Phi(rho, k) = psi(rho), a groupoid 1-cochain on K x G
    phi = P[rho_of][:, E] % level  # shape (nH, nK, nG)
    d_phi = module_delta_array(phi, 1, G_hat.table, K.table, k_of)
    dk = dkg.num * (level // dkg.den)
    D = (dk[k_of[:, None], k_of[None, :]] - d_phi) % level  # (nH, nH, nK, nG)
    eta = D[:, :, 0, q.section]  # integrate from the base point along the section
    # check d eta = D on the groupoid: eta(k.pi(g)) - eta(k)
    pk = K.table[:, q.pi.image]  # (nK, nG)
    d_eta = (eta[:, :, pk] - eta[:, :, :, None]) % level
    bad = np.argwhere(d_eta != D)
    if len(bad):
        raise EtaSolveFailed(
            "eta does not integrate the defect", witness=tuple(int(v) for v in bad[0]), level=level
        )
    a = module_delta_array(eta, 2, G_hat.table, K.table, k_of) % level
    if np.any(a != a[..., :1]):
        raise EtaSolveFailed("d eta depends on the point", level=level)
    alpha_hat = Cochain(Group(G_hat), 3, a[..., 0], level)
    check = is_cocycle(alpha_hat)
    if not check:
        raise NotACocycle("alpha_hat is not a 3-cocycle", witness=check.witness)
    return DualGerbe(ext.F_hat, G_hat, alpha_hat.reduced(), ext, level)


def dual_input(dual):
    """The dual gerbe as a duality input over its fibre ``S_hat``."""
    S_hat = dual.extension.S_hat
    gerbe = make_gerbe(dual.G_hat, dual.alpha_hat)
    return make_duality_input(gerbe, dual.s_hat_elements(), (S_hat, dual.s_hat_elements()))


# --------------------------------------------------------------------------
# the explicit formula


@dataclass(frozen=True, eq=False)
class ExplicitFormulaData:
    """``F`` in Z^2(K, S), ``F_hat`` in Z^2(K, S_hat) and a 3-cochain ``epsilon`` on K."""

    S: FiniteAbelianGroup
    K: object
    F: AbelianCochain
    F_hat: AbelianCochain
    epsilon: Cochain


def cup_pairing(S, F, F_hat):
    """``F_hat(k1, k2)(F(k3, k4))`` as a Q/Z 4-cochain on ``K``."""
    K = F.G
    e = S.exponent
    if S.rank == 0:
        return Cochain.zero(Group(K), 4)
    P = pairing_numerators(S)
    fi = S.indices(F.values)
    hi = S.indices(F_hat.values)
    num = P[hi[:, :, None, None], fi[None, None, :, :]]
    return Cochain(Group(K), 4, num, e)


def compatible_epsilon(S, F, F_hat, level_multiplier=None):
    """One ``epsilon`` with ``d epsilon = F_hat(F)``, or None when none exists."""
    c = cup_pairing(S, F, F_hat)
    try:
        return solve_coboundary(c, level_multiplier)
    except NoSolutionAtLevel:
        return None


def build_explicit_pair(data):
    """Both gerbes of the explicit formula, validated.

    ``alpha((a1,k1),(a2,k2),(a3,k3)) = F_hat(k1,k2)(a3) + epsilon(k1,k2,k3)`` on
    ``S x_F K`` and ``alpha_hat((r1,k1),(r2,k2),(r3,k3)) = epsilon(k1,k2,k3) + r1(F(k2,k3))``
    on ``S_hat x_{F_hat} K``.
    """
    S, K = data.S, data.K
    S_hat, _ = dual_group(S)
    cup = cup_pairing(S, data.F, data.F_hat)
    diff = delta(data.epsilon) - cup
    bad = np.argwhere(diff.num != 0)
    if len(bad):
        raise CompatibilityFailed(
            "d epsilon differs from F_hat(F)", witness=tuple(int(v) for v in bad[0])
        )
    e = S.exponent
    eps = data.epsilon
    level = math.lcm(eps.den, e)
    epsn = eps.at_level(level)
    P = pairing_numerators(S) * (level // e)
    nK = K.order

    G, _, _, _ = central_extension(CentralExtensionData(S, K, data.F.values))
    a, k = np.divmod(np.arange(G.order), nK)
    fh = S.indices(data.F_hat.values)  # (nK, nK) -> S_hat index
    alpha = (
        P[fh[k[:, None, None], k[None, :, None]], a[None, None, :]]
        + epsn[np.ix_(k, k, k)]
    ) % level

    G_hat, _, _, _ = central_extension(CentralExtensionData(S_hat, K, data.F_hat.values))
    r, kh = np.divmod(np.arange(G_hat.order), nK)
    fi = S.indices(data.F.values)
    alpha_hat = (
        epsn[np.ix_(kh, kh, kh)] + P[r[:, None, None], fi[kh[None, :, None], kh[None, None, :]]]
    ) % level

    gerbe = make_gerbe(G, Cochain(Group(G), 3, alpha, level))
    gerbe_hat = make_gerbe(G_hat, Cochain(Group(G_hat), 3, alpha_hat, level))
    return gerbe, gerbe_hat


def explicit_input(data, gerbe):
    """Duality input for the first gerbe of an explicit pair, fibre in tuple order."""
    S = data.S
    s_elements = np.arange(S.order) * data.K.order
    return make_duality_input(gerbe, s_elements, (S, s_elements))


# --------------------------------------------------------------------------
# double dual


@dataclass(frozen=True, eq=False)
class ExtensionComparison:
    map: GroupHom
    correction: AbelianCochain


def extension_comparison(A, K, F_from, F_to):
    """Isomorphism ``A x_{F_from} K -> A x_{F_to} K``, ``(a, k) -> (a + c(k), k)``.

    ``c`` solves ``dc = F_from - F_to``; raises :class:`ComparisonNotIso` when
    the two classes differ.
    """
    base = Group(K)
    diff = AbelianCochain(base, 2, A, np.asarray(F_from) - np.asarray(F_to))
    c = solve_abelian_coboundary(diff) if not diff.is_zero() else AbelianCochain.zero(base, 1, A)
    if c is None:
        raise ComparisonNotIso("extension classes differ")
    src, _, _, _ = central_extension(CentralExtensionData(A, K, F_from))
    dst, _, _, _ = central_extension(CentralExtensionData(A, K, F_to))
    a, k = np.divmod(np.arange(src.order), K.order)
    image = A.indices(A.elements[a] + c.values[k]) * K.order + k
    hom = GroupHom(src, dst, image)
    if not (hom.is_homomorphism() and hom.is_bijective()):
        raise InternalVerificationFailed("extension comparison is not an isomorphism")
    return ExtensionComparison(hom, c)


@dataclass
class DoubleDualReport:
    dual: DualGerbe
    double: DualGerbe
    comparison: GroupHom
    correction: AbelianCochain
    transported: Cochain
    classes: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "dual_group": self.dual.G_hat.to_json(),
            "double_dual_group": self.double.G_hat.to_json(),
            "comparison": self.comparison.image.tolist(),
            "classes": self.classes,
        }


def double_dual_check(inp, witness=None, level_multiplier=None):
    """Dualize twice and compare with the input along the evaluation map.

    The comparison sends ``a sigma(k)`` to ``(ev(a) + c(k), k)`` where ``c``
    solves ``dc = F - F_hathat``; it must be an isomorphism and must carry
    the double-dual class back to ``[alpha]``.
    """
    first = dual_gerbe(inp, witness, level_multiplier)
    inp2 = dual_input(first)
    second = dual_gerbe(inp2, None, level_multiplier)
    q = inp.quotient
    S, K, G = q.S, q.K, q.G
    if not np.array_equal(inp2.K.table, K.table):
        raise ComparisonNotIso("dual quotient is not the original K")
    ev = double_dual_iso(S).image  # tuple index -> double-dual tuple index
    F_ev = S.elements[ev[S.indices(q.F)]]
    F_hh = second.F_hat.values
    try:
        shift = extension_comparison(S, K, F_ev, F_hh)
    except ComparisonNotIso:
        raise ComparisonNotIso("F and the double-dual class differ") from None
    c = shift.correction
    a, k = q.decompose()
    psi = GroupHom(G, second.G_hat, shift.map.image[ev[a] * K.order + k])
    if not (psi.is_homomorphism() and psi.is_bijective()):
        raise ComparisonNotIso("comparison map is not an isomorphism")
    transported = pullback(second.alpha_hat, psi)
    if not classes_equal(transported, inp.gerbe.alpha):
        raise ClassMismatch("double dual does not recover the class of alpha")
    classes = {
        "alpha_trivial": classes_equal(inp.gerbe.alpha, Cochain.zero(Group(G), 3)),
        "alpha_hat_trivial": classes_equal(first.alpha_hat, Cochain.zero(Group(first.G_hat), 3)),
        "alpha_hathat_trivial": classes_equal(second.alpha_hat, Cochain.zero(Group(second.G_hat), 3)),
        "round_trip_equal": True,
    }
    return DoubleDualReport(first, second, psi, c, transported, classes)
