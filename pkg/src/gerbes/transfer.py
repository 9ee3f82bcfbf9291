"""Reduce action-groupoid cochain problems to stabilizer subgroups.

For a transitive right ``G``-set with base point ``n0`` and stabilizer ``H``,
choose ``tau(n)`` with ``n0 . tau(n) = n`` (least such element, ``tau(n0) = e``).
Then ``E(n, g) = tau(n) g tau(ng)^-1`` lies in ``H`` and defines a retraction
``Phi`` of the groupoid onto ``H``.  Restriction ``iota*`` to the base point and
``Phi*`` are mutually inverse in cohomology, and the prism operator

    (hc)(n; g1..gl) = sum_j (-1)^j c(n; g1..gj, tau(n_j)^-1, E(n_j, g_{j+1}), ..., E(n_{l-1}, g_l))

with ``n_j = n g1...gj`` is a chain homotopy ``dh + hd = Phi* iota* - id``.
A primitive of ``c`` is therefore ``Phi* b - h(c - d Phi* b)`` where ``db = iota* c``
is solved on ``H``, a much smaller system.
"""

from dataclasses import dataclass

import numpy as np

from .cochain import _grids, delta_array, solve_group_array
from .group import FiniteGroup, subgroup


@dataclass(frozen=True, eq=False)
class OrbitTransfer:
    points: np.ndarray  # groupoid point indices in this orbit, ascending
    act: np.ndarray  # action restricted to the orbit, in local point indices
    G: FiniteGroup
    H: FiniteGroup
    h_in_g: np.ndarray  # H index -> G index
    tau: np.ndarray  # local point -> G element
    theta: np.ndarray  # tau inverse, G element
    E: np.ndarray  # (local point, g) -> G element lying in H
    E_h: np.ndarray  # same, as H indices

    def restrict(self, arr, n):
        """``iota*``: the base-point slice with arguments in ``H``."""
        if n == 0:
            return arr[0]
        idx = np.ix_(*([self.h_in_g] * n))
        return arr[0][idx]

    def pull(self, b, n, as_group=False):
        """``Phi*`` of an ``H``-cochain array (trailing axes allowed)."""
        m = self.G.order
        npts = len(self.points)
        idx = _grids((npts,) + (m,) * n)
        pt = idx[0]
        args = []
        for j in range(n):
            g = idx[j + 1]
            args.append(self.E_h[pt, g])
            pt = self.act[pt, g]
        out = b[tuple(args)] if n else b
        shape = (npts,) + (m,) * n
        return np.broadcast_to(out, shape + b.shape[n:]).copy()

    def homotopy(self, c, l):
        """The prism operator on a degree ``l + 1`` array, giving degree ``l``."""
        m = self.G.order
        npts = len(self.points)
        shape = (npts,) + (m,) * l
        idx = _grids(shape)
        pts = [idx[0]]
        for j in range(l):
            pts.append(self.act[pts[-1], idx[j + 1]])
        gs = idx[1:]
        out = np.zeros(shape + c.shape[l + 2:], dtype=c.dtype)
        for j in range(l + 1):
            args = [idx[0]] + gs[:j] + [self.theta[pts[j]]]
            args += [self.E[pts[i - 1], gs[i - 1]] for i in range(j + 1, l + 1)]
            t = c[tuple(args)]
            out = out - t if j % 2 else out + t
        return out


def make_transfer(points, act, G):
    points = np.asarray(points, dtype=np.int64)
    local = -np.ones(act.shape[0], dtype=np.int64)
    local[points] = np.arange(len(points))
    a = local[act[points]]
    n0_row = a[0]
    tau = np.empty(len(points), dtype=np.int64)
    seen = np.zeros(len(points), dtype=bool)
    for g in range(G.order):  # least g reaching each point
        p = n0_row[g]
        if not seen[p]:
            seen[p] = True
            tau[p] = g
    stab = np.nonzero(n0_row == 0)[0]
    H, inc = subgroup(G, stab)
    h_of_g = -np.ones(G.order, dtype=np.int64)
    h_of_g[inc.image] = np.arange(H.order)
    T, inv = G.table, G.inverse
    theta = inv[tau]
    E = T[T[tau[:, None], np.arange(G.order)[None, :]], inv[tau[a]]]
    E_h = h_of_g[E]
    if (E_h < 0).any():
        raise AssertionError("retraction left the stabilizer")
    return OrbitTransfer(points, a, G, H, inc.image, tau, theta, E, E_h)


def orbit_transfers(groupoid):
    cache = groupoid.__dict__.get("_transfers")
    if cache is None:
        cache = [make_transfer(orb, groupoid.act, groupoid.G) for orb in groupoid.orbits]
        groupoid.__dict__["_transfers"] = cache
    return cache


def solve_groupoid(groupoid, n, rhs, modulus, normalized=True, level_fixed=False):
    """Solve ``d beta = rhs`` mod ``modulus`` on an action groupoid.

    ``rhs`` has shape ``groupoid.shape(n) + (batch,)``.  Returns the primitive
    array or None when some orbit has no solution.
    """
    out = np.zeros(groupoid.shape(n - 1) + rhs.shape[-1:], dtype=rhs.dtype)
    for tr in orbit_transfers(groupoid):
        c = rhs[tr.points] % modulus
        res = solve_transitive(tr, n, c, modulus, normalized)
        if res is None:
            return None
        out[tr.points] = res
    return out


def solve_transitive(tr, n, c, modulus, normalized=True):
    ch = tr.restrict(c, n)
    if tr.H.order == 1 and normalized:
        if np.any(ch % modulus):
            return None
        b = np.zeros((1,) * (n - 1) + ch.shape[n:], dtype=c.dtype)
    else:
        b = solve_group_array(tr.H, n, ch, modulus, normalized)
        if b is None:
            return None
    B = tr.pull(b, n - 1) % modulus
    rest = (c - delta_array(B, n - 1, tr.G.table, tr.act)) % modulus
    beta = (B - tr.homotopy(rest, n - 1)) % modulus
    return beta
