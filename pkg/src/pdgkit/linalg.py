"""Gaussian elimination over a FieldSpec on encoded int64 arrays."""

from __future__ import annotations

import numpy as np

from .field import FieldSpec


def _as(A) -> np.ndarray:
    return np.array(A, dtype=np.int64, copy=True)


def rref(F: FieldSpec, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (lowest index first)."""
    R = _as(A)
    if R.ndim != 2:
        raise ValueError("rref expects a matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = F.mul(R[r], F.inv(int(R[r, c])))
        col = R[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            R[nzr] = F.sub(R[nzr], F.mul(col[nzr, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: FieldSpec, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def nullspace(F: FieldSpec, A) -> np.ndarray:
    """Basis of ``{x : A x = 0}`` as columns; one column per free variable."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = rref(F, A)
    free = [c for c in range(cols) if c not in set(piv)]
    N = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        N[f, k] = 1
        for i, pc in enumerate(piv):
            N[pc, k] = F.neg(int(R[i, f]))
    return N


def colspace(F: FieldSpec, A) -> np.ndarray:
    """Independent columns of ``A`` spanning its image (pivot columns)."""
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=np.int64)
    _, piv = rref(F, A)
    return A[:, piv].copy()


def solve(F: FieldSpec, A, b) -> np.ndarray | None:
    """One solution of ``A x = b`` (columns of ``b`` solved jointly), or None."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    B = b.reshape(A.shape[0], -1)
    n = A.shape[1]
    if A.shape[0] == 0:
        x = np.zeros((n, B.shape[1]), dtype=np.int64)
        return x[:, 0] if vec else x
    R, piv = rref(F, np.hstack([A, B]))
    if piv and piv[-1] >= n:
        return None
    x = np.zeros((n, B.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = R[i, n:]
    return x[:, 0] if vec else x


def inverse(F: FieldSpec, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    R, piv = rref(F, np.hstack([A, np.eye(n, dtype=np.int64)]))
    if [c for c in piv if c < n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:].copy()


def extend_basis(F: FieldSpec, base, cand) -> list[int]:
    """Indices of columns of ``cand`` that extend the column span of ``base``.

    Greedy in column order; result columns are independent modulo ``base``.
    """
    base = np.asarray(base, dtype=np.int64)
    cand = np.asarray(cand, dtype=np.int64)
    if cand.shape[1] == 0:
        return []
    M = np.hstack([base, cand])
    _, piv = rref(F, M)
    k = base.shape[1]
    return [c - k for c in piv if c >= k]


def matpow(F: FieldSpec, A, k: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    out = np.eye(A.shape[0], dtype=np.int64)
    for _ in range(k):
        out = F.matmul(out, A)
    return out


class Subquotient:
    """The quotient ``span(K) / span(I)`` for ``span(I)`` inside ``span(K)``.

    ``reps`` holds columns of ``K`` completing a basis of ``span(I)`` to one of
    ``span(K)``; their classes form the chosen basis of the quotient.
    """

    def __init__(self, F: FieldSpec, K, I):
        self.F = F
        K = np.asarray(K, dtype=np.int64)
        I = np.asarray(I, dtype=np.int64)
        self.ambient = K.shape[0]
        self.image = colspace(F, I) if I.size else np.zeros((self.ambient, 0), dtype=np.int64)
        idx = extend_basis(F, self.image, K)
        self.reps = K[:, idx].copy()
        self.dim = self.reps.shape[1]
        self._frame = np.hstack([self.image, self.reps])

    def coords(self, v) -> np.ndarray:
        """Coordinates of the class of ``v`` (columns allowed) in the rep basis."""
        v = np.asarray(v, dtype=np.int64)
        x = solve(self.F, self._frame, v)
        if x is None:
            raise ValueError("vector does not lie in the cycle space")
        return x[self.image.shape[1]:]

    def contains(self, v) -> bool:
        return solve(self.F, self._frame, np.asarray(v, dtype=np.int64)) is not None

    def is_boundary(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if self.image.shape[1] == 0:
            return not v.any()
        return solve(self.F, self.image, v) is not None
