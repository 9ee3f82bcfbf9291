"""Exact integer linear algebra.

Two engines live here:

* :func:`smith_normal_form` -- exact Smith form over Z with the column
  transform, for the small relation matrices of abelian groups.
* :func:`local_smith` / :func:`solve_mod` -- elimination over Z/p^e with
  full pivoting on minimal p-adic valuation, which is the Smith form over the
  local ring.  Systems modulo a composite L are split by prime powers and
  glued with the Chinese remainder theorem.

Pivot order is deterministic: least valuation, then least row, then least
column of the active block.
"""

from dataclasses import dataclass, field

import numpy as np

INT64_SAFE = 2**31


def factorize(n):
    """Prime factorisation as ``{p: e}`` by trial division."""
    n = int(n)
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def int_array(values, modulus=None):
    """Integer array whose dtype can hold products of residues mod ``modulus``."""
    if modulus is not None and modulus >= INT64_SAFE:
        arr = np.array(values, dtype=object)
        return arr
    return np.asarray(values, dtype=np.int64)


# --------------------------------------------------------------------------
# exact Smith normal form over Z (small dense matrices)


def smith_normal_form(matrix):
    """Return ``(diag, V)`` with ``U @ A @ V = D`` for some unimodular ``U``.

    ``diag`` lists the diagonal of ``D`` (length ``min(rows, cols)``, trailing
    zeros included).  ``V`` is returned as a list of lists of Python ints.
    """
    A = [[int(x) for x in row] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_col(dst, src, f):
        # col_dst += f * col_src
        for row in A:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        # least nonzero |entry| in the active block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % A[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                A[t] = [a + b for a, b in zip(A[t], A[bad])]
                continue
            # move the smallest entry of row/column t to the pivot
            best = (t, t)
            for i in range(t, m):
                if A[i][t] and abs(A[i][t]) < abs(A[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, n):
                if A[t][j] and abs(A[t][j]) < abs(A[best[0]][best[1]]):
                    best = (t, j)
            i, j = best
            A[t], A[i] = A[i], A[t]
            swap_cols(t, j)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
        diag.append(A[t][t])
        t += 1
    diag.extend([0] * (min(m, n) - len(diag)))
    return diag, V


# --------------------------------------------------------------------------
# local elimination over Z/p^e


@dataclass
class LocalSmith:
    """Result of :func:`local_smith`.

    ``pivots`` holds ``(row, col, t)`` in elimination order: the active entry
    at that position was ``p**t`` times a unit.  ``colperm[j]`` is the original
    column now sitting at position ``j``.  ``Q`` (if requested) maps reduced
    column coordinates back to original ones, so ``A @ Q[:, r]`` is divisible
    by ``p**t_r``.
    """

    p: int
    e: int
    pivots: list
    A: np.ndarray
    B: np.ndarray = None
    colperm: np.ndarray = None
    Q: np.ndarray = None
    units: list = field(default_factory=list)

    @property
    def modulus(self):
        return self.p**self.e

    def valuations(self):
        return [t for (_, _, t) in self.pivots]


def local_smith(A, p, e, B=None, track_columns=False):
    """Eliminate ``A`` (rows x cols) over Z/p^e.

    Rows are reduced below each pivot (forward elimination).  With
    ``track_columns`` the pivot row is also cleared to the right by column
    operations recorded in ``Q``, which yields the full local Smith form.
    ``B`` (rows x k) receives the same row operations.
    """
    M = p**e
    A = int_array(A, M) % M
    rows, cols = A.shape
    A = A.copy()
    if B is not None:
        B = int_array(B, M) % M
        B = B.reshape(rows, -1).copy()
    colperm = np.arange(cols)
    Q = None
    if track_columns:
        Q = int_array(np.eye(cols, dtype=np.int64), M)
    pivots = []
    units = []
    powers = [p**t for t in range(e + 1)]
    r = 0
    while r < min(rows, cols):
        block = A[r:, r:]
        found = None
        for t in range(e):
            hit = (block % powers[t + 1]) != 0
            if hit.any():
                flat = int(np.argmax(hit.reshape(-1)))
                found = (divmod(flat, block.shape[1]), t)
                break
        if found is None:
            break
        (i, j), t = found
        i += r
        j += r
        if i != r:
            A[[r, i]] = A[[i, r]]
            if B is not None:
                B[[r, i]] = B[[i, r]]
        if j != r:
            A[:, [r, j]] = A[:, [j, r]]
            colperm[[r, j]] = colperm[[j, r]]
            if Q is not None:
                Q[:, [r, j]] = Q[:, [j, r]]
        pt = powers[t]
        unit = int(A[r, r]) // pt
        uinv = pow(unit, -1, M)
        below = A[r + 1:, r]
        nz = np.nonzero(below)[0]
        if nz.size:
            idx = nz + r + 1
            f = ((A[idx, r] // pt) * uinv) % M
            A[np.ix_(idx, np.arange(r, cols))] = (
                A[np.ix_(idx, np.arange(r, cols))] - np.outer(f, A[r, r:])
            ) % M
            if B is not None:
                B[idx] = (B[idx] - np.outer(f, B[r])) % M
        if Q is not None and r + 1 < cols:
            right = A[r, r + 1:]
            nzc = np.nonzero(right)[0]
            if nzc.size:
                jdx = nzc + r + 1
                f = ((A[r, jdx] // pt) * uinv) % M
                Q[:, jdx] = (Q[:, jdx] - np.outer(Q[:, r], f)) % M
                A[r, jdx] = 0
        pivots.append((r, r, t))
        units.append(uinv)
        r += 1
    return LocalSmith(p, e, pivots, A, B, colperm, Q, units)


def _solve_prime_power(A, B, p, e):
    """Solve ``A X = B`` over Z/p^e with free variables zero; None if impossible."""
    M = p**e
    ls = local_smith(A, p, e, B=B)
    A2, B2 = ls.A, ls.B
    rows, cols = A2.shape
    k = B2.shape[1]
    rank = len(ls.pivots)
    if rank < rows and (B2[rank:] % M != 0).any():
        return None
    X = int_array(np.zeros((cols, k), dtype=np.int64), M)
    for (r, _, t), uinv in zip(reversed(ls.pivots), reversed(ls.units)):
        rhs = B2[r] - A2[r, r + 1:] @ X[r + 1:] if r + 1 < cols else B2[r].copy()
        rhs = rhs % M
        pt = p**t
        if (rhs % pt != 0).any():
            return None
        X[r] = ((rhs // pt) * uinv) % M
    out = int_array(np.zeros((cols, k), dtype=np.int64), M)
    out[ls.colperm] = X
    return out


def solve_mod(A, B, modulus):
    """Solve ``A X = B (mod modulus)``; returns X with entries in [0, modulus) or None.

    ``B`` may be a vector or a matrix of right-hand sides (all must be solvable).
    """
    A = np.asarray(A)
    vector = np.ndim(B) == 1
    B = np.asarray(B)
    B = B.reshape(A.shape[0], -1) if A.shape[0] else B.reshape(0, 1 if vector else B.shape[-1])
    if A.shape[0] == 0:
        X = np.zeros((A.shape[1], B.shape[1]), dtype=np.int64)
        return X[:, 0] if vector else X
    if A.shape[1] == 0:
        if (np.asarray(B) % modulus != 0).any():
            return None
        X = np.zeros((0, B.shape[1]), dtype=np.int64)
        return X[:, 0] if vector else X
    if modulus == 1:
        X = np.zeros((A.shape[1], B.shape[1]), dtype=np.int64)
        return X[:, 0] if vector else X
    X = int_array(np.zeros((A.shape[1], B.shape[1]), dtype=np.int64), modulus)
    for p, e in factorize(modulus).items():
        q = p**e
        Xp = _solve_prime_power(A % q, B % q, p, e)
        if Xp is None:
            return None
        cofactor = modulus // q
        c = (cofactor * pow(cofactor % q, -1, q)) % modulus
        X = (X + (Xp % modulus) * c) % modulus
    return X[:, 0] if vector else X
