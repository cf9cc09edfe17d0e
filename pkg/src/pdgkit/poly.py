"""Sparse multivariate polynomials and polynomial matrices over a FieldSpec.

``MultiPoly`` stores a map from exponent tuples to nonzero encoded
coefficients.  ``PolyMatrix`` stores a matrix with polynomial entries as a
map from exponent tuples to dense coefficient matrices, which makes matrix
products a handful of numpy products.  Both optionally truncate: with
``trunc=p`` every monomial with an exponent >= p is dropped, which models
the group algebra k[y_1..y_n]/(y_i^p).
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import FieldElem, FieldSpec, embedding

Exp = tuple[int, ...]


def monomials(n: int, degree: int) -> list[Exp]:
    """All exponent vectors of total ``degree`` in ``n`` variables, lex-descending."""
    if degree < 0:
        return []
    if n == 0:
        return [()] if degree == 0 else []
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(n - 1, degree - first):
            out.append((first,) + rest)
    return out


def _add_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def _keep(e: Exp, trunc: int | None) -> bool:
    return trunc is None or all(x < trunc for x in e)


def _scalar(field: FieldSpec, c) -> int:
    """Encoded value of ``c``; out-of-range ints are read in the prime subfield."""
    c = int(c)
    return c if 0 <= c < field.order else c % field.p


class MultiPoly:
    """A polynomial in ``n`` variables with coefficients in ``field``."""

    __slots__ = ("field", "n", "terms", "trunc")

    def __init__(self, field: FieldSpec, n: int, terms: Mapping[Exp, int] | None = None,
                 trunc: int | None = None):
        self.field = field
        self.n = n
        self.trunc = trunc
        clean: dict[Exp, int] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {n} variables")
            if isinstance(c, FieldElem):
                c = c.value
            c = _scalar(field, c)
            if c and _keep(e, trunc):
                clean[e] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, field, n, trunc=None):
        return cls(field, n, {}, trunc)

    @classmethod
    def constant(cls, field, n, c, trunc=None):
        return cls(field, n, {(0,) * n: c}, trunc)

    @classmethod
    def var(cls, field, n, i, trunc=None):
        e = [0] * n
        e[i] = 1
        return cls(field, n, {tuple(e): 1}, trunc)

    # -- ring operations ------------------------------------------------------
    def _like(self, terms):
        return MultiPoly(self.field, self.n, terms, self.trunc)

    def _check(self, other: "MultiPoly"):
        if other.field != self.field or other.n != self.n:
            raise ValueError("polynomials over different rings")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.field, self.n, _scalar(self.field, other), self.trunc)
        self._check(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = int(F.add(out.get(e, 0), c))
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: int(self.field.neg(c)) for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.field, self.n, _scalar(self.field, other), self.trunc)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = other.value if isinstance(other, FieldElem) else _scalar(self.field, other)
            return self._like({e: int(self.field.mul(v, c)) for e, v in self.terms.items()})
        self._check(other)
        F = self.field
        out: dict[Exp, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                if _keep(e, self.trunc):
                    out[e] = int(F.add(out.get(e, 0), F.mul(c1, c2)))
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = MultiPoly.constant(self.field, self.n, 1, self.trunc)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = MultiPoly.constant(self.field, self.n, _scalar(self.field, other), self.trunc)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.field == other.field and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, self.n, frozenset(self.terms.items())))

    # -- queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max(self.degrees(), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = self.degrees()
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return d is None or degs == {d}

    def coeff(self, e: Exp) -> FieldElem:
        return FieldElem(self.field, self.terms.get(tuple(e), 0))

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.n, 0)

    def eval(self, point: Sequence, field: FieldSpec | None = None) -> FieldElem:
        """Evaluate at ``point``; coefficients are embedded into ``field``."""
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {self.n} variables")
        vals = []
        for x in point:
            if isinstance(x, FieldElem):
                if field is None:
                    field = x.spec
                elif x.spec != field:
                    raise ValueError("point coordinates from different fields")
                vals.append(x.value)
            else:
                vals.append(int(x))
        field = field or self.field
        emb = embedding(self.field, field)
        acc = 0
        for e, c in self.terms.items():
            t = int(emb[c])
            for x, k in zip(vals, e):
                if k:
                    t = int(field.mul(t, field.power(x, k)))
            acc = int(field.add(acc, t))
        return FieldElem(field, acc)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = FieldElem(self.field, self.terms[e])
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            cs = repr(c) if self.field.m == 1 else f"({c!r})"
            if not mono:
                parts.append(cs)
            elif self.terms[e] == 1:
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)


def poly_eval(f: MultiPoly, x: Sequence) -> FieldElem:
    return f.eval(x)


def poly_is_homogeneous(f: MultiPoly, d: int) -> bool:
    return f.is_homogeneous(d)


class PolyMatrix:
    """Matrix with polynomial entries, stored as ``{exponent: coefficient matrix}``."""

    __slots__ = ("field", "n", "shape", "coeffs", "trunc")

    def __init__(self, field: FieldSpec, n: int, shape: tuple[int, int],
                 coeffs: Mapping[Exp, np.ndarray] | None = None, trunc: int | None = None):
        self.field = field
        self.n = n
        self.shape = (int(shape[0]), int(shape[1]))
        self.trunc = trunc
        clean = {}
        for e, A in (coeffs or {}).items():
            e = tuple(int(x) for x in e)
            A = np.asarray(A, dtype=np.int64).reshape(self.shape)
            if A.any() and _keep(e, trunc):
                clean[e] = A
        self.coeffs = clean

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zeros(cls, field, n, shape, trunc=None):
        return cls(field, n, shape, {}, trunc)

    @classmethod
    def identity(cls, field, n, size, trunc=None):
        return cls(field, n, (size, size), {(0,) * n: np.eye(size, dtype=np.int64)}, trunc)

    @classmethod
    def constant(cls, field, n, A, trunc=None):
        A = np.asarray(A, dtype=np.int64)
        return cls(field, n, A.shape, {(0,) * n: A}, trunc)

    @classmethod
    def from_entries(cls, field, n, rows: Sequence[Sequence[MultiPoly | int]], shape=None,
                     trunc=None):
        r = len(rows)
        c = len(rows[0]) if r else (shape[1] if shape else 0)
        coeffs: dict[Exp, np.ndarray] = {}
        for i, row in enumerate(rows):
            if len(row) != c:
                raise ValueError("ragged matrix")
            for j, f in enumerate(row):
                if not isinstance(f, MultiPoly):
                    f = MultiPoly.constant(field, n, _scalar(field, f), trunc)
                for e, v in f.terms.items():
                    if e not in coeffs:
                        coeffs[e] = np.zeros((r, c), dtype=np.int64)
                    coeffs[e][i, j] = v
        return cls(field, n, (r, c), coeffs, trunc)

    # -- entry access ---------------------------------------------------------
    def entry(self, i: int, j: int) -> MultiPoly:
        return MultiPoly(self.field, self.n,
                         {e: int(A[i, j]) for e, A in self.coeffs.items() if A[i, j]}, self.trunc)

    def entries(self) -> list[list[MultiPoly]]:
        return [[self.entry(i, j) for j in range(self.shape[1])] for i in range(self.shape[0])]

    def nonzero_positions(self) -> set[tuple[int, int]]:
        out = set()
        for A in self.coeffs.values():
            out.update(zip(*map(lambda a: a.tolist(), np.nonzero(A))))
        return out

    def const(self) -> np.ndarray:
        return self.coeffs.get((0,) * self.n, np.zeros(self.shape, dtype=np.int64)).copy()

    def linear(self, t: int) -> np.ndarray:
        """Coefficient matrix of the variable ``x_t``."""
        e = [0] * self.n
        e[t] = 1
        return self.coeffs.get(tuple(e), np.zeros(self.shape, dtype=np.int64)).copy()

    def homogeneous_part(self, d: int) -> "PolyMatrix":
        return self._like({e: A for e, A in self.coeffs.items() if sum(e) == d}, self.shape)

    def max_degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- algebra --------------------------------------------------------------
    def _like(self, coeffs, shape):
        return PolyMatrix(self.field, self.n, shape, coeffs, self.trunc)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        F = self.field
        out = dict(self.coeffs)
        for e, A in other.coeffs.items():
            out[e] = F.add(out[e], A) if e in out else A
        return self._like(out, self.shape)

    def __neg__(self):
        return self._like({e: self.field.neg(A) for e, A in self.coeffs.items()}, self.shape)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "PolyMatrix":
        return self._like({e: self.field.mul(A, c) for e, A in self.coeffs.items()}, self.shape)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        F = self.field
        shape = (self.shape[0], other.shape[1])
        out: dict[Exp, np.ndarray] = {}
        for e1, A in self.coeffs.items():
            for e2, B in other.coeffs.items():
                e = _add_exp(e1, e2)
                if not _keep(e, self.trunc):
                    continue
                P = F.matmul(A, B)
                out[e] = F.add(out[e], P) if e in out else P
        return self._like(out, shape)

    def mul_const_left(self, A: np.ndarray) -> "PolyMatrix":
        A = np.asarray(A, dtype=np.int64)
        return self._like({e: self.field.matmul(A, B) for e, B in self.coeffs.items()},
                          (A.shape[0], self.shape[1]))

    def mul_const_right(self, B: np.ndarray) -> "PolyMatrix":
        B = np.asarray(B, dtype=np.int64)
        return self._like({e: self.field.matmul(A, B) for e, A in self.coeffs.items()},
                          (self.shape[0], B.shape[1]))

    def mul_monomial(self, e: Exp) -> "PolyMatrix":
        return self._like({_add_exp(e, k): A for k, A in self.coeffs.items()}, self.shape)

    def power(self, k: int) -> "PolyMatrix":
        if self.shape[0] != self.shape[1]:
            raise ValueError("power of a non-square matrix")
        result = PolyMatrix.identity(self.field, self.n, self.shape[0], self.trunc)
        for _ in range(k):
            result = result @ self
        return result

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        rows, cols = list(rows), list(cols)
        return self._like({e: A[np.ix_(rows, cols)] for e, A in self.coeffs.items()},
                          (len(rows), len(cols)))

    def transpose(self) -> "PolyMatrix":
        return self._like({e: A.T.copy() for e, A in self.coeffs.items()},
                          (self.shape[1], self.shape[0]))

    @staticmethod
    def block(blocks: Sequence[Sequence["PolyMatrix"]]) -> "PolyMatrix":
        """Assemble a block matrix; every block in a row shares its row count."""
        first = blocks[0][0]
        heights = [row[0].shape[0] for row in blocks]
        widths = [b.shape[1] for b in blocks[0]]
        shape = (sum(heights), sum(widths))
        out: dict[Exp, np.ndarray] = {}
        r0 = 0
        for row, h in zip(blocks, heights):
            c0 = 0
            for b, w in zip(row, widths):
                if b.shape != (h, w):
                    raise ValueError("inconsistent block shapes")
                for e, A in b.coeffs.items():
                    if e not in out:
                        out[e] = np.zeros(shape, dtype=np.int64)
                    out[e][r0:r0 + h, c0:c0 + w] = A
                c0 += w
            r0 += h
        return PolyMatrix(first.field, first.n, shape, out, first.trunc)

    def evaluate(self, point: Sequence[int], field: FieldSpec | None = None) -> np.ndarray:
        """Substitute encoded values ``point`` (in ``field``) for the variables."""
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, matrix has {self.n} variables")
        field = field or self.field
        emb = embedding(self.field, field)
        out = np.zeros(self.shape, dtype=np.int64)
        for e, A in self.coeffs.items():
            w = 1
            for x, k in zip(point, e):
                if k:
                    w = int(field.mul(w, field.power(int(x), k)))
            if w:
                out = field.add(out, field.mul(emb[A], w))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.shape != other.shape or self.field != other.field or self.n != other.n:
            return False
        if self.coeffs.keys() != other.coeffs.keys():
            return False
        return all(np.array_equal(A, other.coeffs[e]) for e, A in self.coeffs.items())

    def __repr__(self) -> str:
        rows = ["[" + ", ".join(repr(f) for f in row) + "]" for row in self.entries()]
        return "PolyMatrix(" + ", ".join(rows) + ")"


def all_points(field: FieldSpec, n: int) -> Iterable[tuple[int, ...]]:
    return product(range(field.order), repeat=n)


def polymatrix_inverse(M: PolyMatrix) -> PolyMatrix:
    """Inverse of a square polynomial matrix whose non-constant part is nilpotent.

    With ``P0 = M(0)`` and ``E = I - P0^{-1} M`` we get ``M^{-1} = (Σ_k E^k) P0^{-1}``.
    The series terminates for truncated matrices and for homogeneous changes
    of basis of graded free modules, where ``E`` raises generator degree.
    """
    from .linalg import inverse

    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    P0inv = inverse(M.field, M.const())
    I = PolyMatrix.identity(M.field, M.n, n, M.trunc)
    E = I - M.mul_const_left(P0inv)
    bound = n + 1 if M.trunc is None else max(n + 1, M.n * (M.trunc - 1) + 1)
    acc = I
    term = I
    for _ in range(bound):
        term = term @ E
        if term.is_zero():
            return acc.mul_const_right(P0inv)
        acc = acc + term
    raise ValueError("matrix is not invertible by a terminating series")
