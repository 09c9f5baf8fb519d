"""Gaussian elimination over a :class:`~agrook.galois.GF`.

Pivoting is deterministic: the first row with a nonzero entry in the current
column is used, so results do not depend on anything but the input.
"""

import numpy as np


def rref(F, M, ncols=None):
    """Reduced row echelon form of ``M``.

    Only the first ``ncols`` columns are used for pivoting, which lets callers
    carry an augmented right-hand side along.  Returns ``(R, pivots)``.
    """
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("rref expects a 2-D array")
    rows, cols = R.shape
    ncols = cols if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = F.mul(R[r], F.inv(int(R[r, c])))
        col = R[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            R[others] = F.sub(R[others], F.mul(col[others, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F, M):
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def residual(F, R, pivots, V):
    """Reduce rows of ``V`` against an RREF basis; zero rows lie in the row space."""
    V = np.array(V, dtype=np.int64, copy=True)
    if V.ndim == 1:
        V = V[None, :]
    for r, c in enumerate(pivots):
        coef = V[:, c].copy()
        hit = np.flatnonzero(coef)
        if hit.size:
            V[hit] = F.sub(V[hit], F.mul(coef[hit, None], R[r][None, :]))
    return V


def in_row_space(F, M, V):
    """True for each row of ``V`` that is a combination of rows of ``M``."""
    M = np.asarray(M, dtype=np.int64)
    V = np.asarray(V, dtype=np.int64)
    if V.ndim == 1:
        V = V[None, :]
    if M.shape[0] == 0:
        return ~np.any(V, axis=1)
    R, piv = rref(F, M)
    return ~np.any(residual(F, R, piv, V), axis=1)


def solve(F, A, B):
    """Particular solution ``X`` of ``A X = B`` with free variables set to zero.

    Returns ``(X, consistent)``.  When the system is inconsistent ``X`` is the
    solution of the consistent part and ``consistent`` is False.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    vector = B.ndim == 1
    if vector:
        B = B[:, None]
    n = A.shape[1]
    R, piv = rref(F, np.hstack([A, B]), ncols=n)
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for r, c in enumerate(piv):
        X[c] = R[r, n:]
    consistent = not np.any(R[len(piv):, n:])
    return (X[:, 0] if vector else X), consistent
