"""Complexes of free modules over the group algebra k[G] = k[y_1..y_n]/(y_i^p).

Matrices act on column vectors: ``d(e_j) = Σ_i d_ij e_i``.  A free module
of rank ``r`` is flattened to ``k^{r p^n}`` with basis ``e_i y^a``, where the
exponent vectors ``a`` are listed in mixed-radix order (``a_1`` most
significant).  Under ι the odd piece ``C_{2i-1}`` sits in degree ``pi-1`` and
the ``p-1`` copies of ``C_{2i}`` in degrees ``pi, ..., pi+p-2``.  For p = 3:

    C_3 -> C_2 = C_2 -> C_1 -> C_0 = C_0 -> C_{-1}
     5      4     3     2      1     0      -1
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Mapping, Sequence

import numpy as np

from .field import FieldSpec, field_make
from .linalg import Subquotient, colspace, nullspace
from .ncomplex import Morphism, NComplexFin, _kron, homotopy_sum, is_morphism, ncx_hom, ncx_homology
from .poly import MultiPoly, PolyMatrix, polymatrix_inverse
from .qcombinat import QContext, default_context


def truncpoly(field: FieldSpec, p: int, n: int, terms: Mapping) -> MultiPoly:
    """An element of k[G] as a truncated polynomial in the y's."""
    return MultiPoly(field, n, terms, trunc=p)


@lru_cache(maxsize=None)
def kg_basis(p: int, n: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of the monomial basis of k[G], in flattening order."""
    return tuple(product(range(p), repeat=n))


def kg_index(a: Sequence[int], p: int) -> int:
    idx = 0
    for x in a:
        idx = idx * p + int(x)
    return idx


@lru_cache(maxsize=None)
def _shift(p: int, n: int, b: tuple[int, ...]) -> np.ndarray:
    size = p**n
    S = np.zeros((size, size), dtype=np.int64)
    for a in kg_basis(p, n):
        c = tuple(x + y for x, y in zip(a, b))
        if all(x < p for x in c):
            S[kg_index(c, p), kg_index(a, p)] = 1
    S.flags.writeable = False
    return S


def multiplication_matrix(p: int, n: int, b: Sequence[int]) -> np.ndarray:
    """Matrix of multiplication by ``y^b`` on k[G] in the flattened basis."""
    return _shift(p, n, tuple(int(x) for x in b))


def y_action(p: int, n: int, t: int, rank_: int) -> np.ndarray:
    e = [0] * n
    e[t] = 1
    return np.kron(np.eye(rank_, dtype=np.int64), multiplication_matrix(p, n, e))


def flatten_matrix(M: PolyMatrix, p: int) -> np.ndarray:
    """k-matrix of a k[G]-matrix: ``Σ_b kron(M_b, S_b)``."""
    F = M.field
    size = p**M.n
    out = np.zeros((M.shape[0] * size, M.shape[1] * size), dtype=np.int64)
    for b, A in M.coeffs.items():
        out = F.add(out, np.kron(A, multiplication_matrix(p, M.n, b)))
    return out


class GComplex:
    """Graded free k[G]-module with a degree -1 map satisfying d^N = 0.

    ``N = 2`` gives a perfect chain complex; ``N = p`` the output of ι.
    """

    def __init__(self, field: FieldSpec, p: int, n: int, N: int, ranks: Mapping[int, int],
                 d: Mapping[int, PolyMatrix] | None = None, check: bool = True):
        if field.p != p:
            raise ValueError(f"field characteristic {field.p} differs from p={p}")
        self.field = field
        self.p = p
        self.n = n
        self.N = N
        self.ranks = {int(l): int(r) for l, r in ranks.items() if int(r) > 0}
        self.d: dict[int, PolyMatrix] = {}
        for l, M in (d or {}).items():
            l = int(l)
            if not isinstance(M, PolyMatrix):
                raise ValueError(f"differential at degree {l} must be a PolyMatrix")
            shape = (self.rank(l - 1), self.rank(l))
            if shape[0] * shape[1] == 0:
                continue
            if M.shape != shape:
                raise ValueError(f"differential at degree {l} has shape {M.shape}, expected {shape}")
            if M.n != n:
                raise ValueError(f"differential at degree {l} uses {M.n} variables, expected {n}")
            if M.trunc != p:
                M = PolyMatrix(M.field, M.n, M.shape, M.coeffs, trunc=p)
            if not M.is_zero():
                self.d[l] = M
        if check:
            bad = gc_first_failure(self)
            if bad is not None:
                raise ValueError(bad)

    def rank(self, l: int) -> int:
        return self.ranks.get(l, 0)

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def dmat(self, l: int) -> PolyMatrix:
        if l in self.d:
            return self.d[l]
        return PolyMatrix.zeros(self.field, self.n, (self.rank(l - 1), self.rank(l)), self.p)

    def ctx(self) -> QContext:
        return default_context(self.p, self.N, self.field.m)

    def __repr__(self) -> str:
        r = ", ".join(f"{l}:{self.ranks[l]}" for l in sorted(self.ranks, reverse=True))
        return f"GComplex(p={self.p}, n={self.n}, N={self.N}, ranks={{{r}}})"


def PerfectComplex(field: FieldSpec, p: int, n: int, ranks, d=None, check: bool = True) -> GComplex:
    return GComplex(field, p, n, 2, ranks, d, check)


def gc_first_failure(C: GComplex) -> str | None:
    for l, M in C.d.items():
        for e in M.coeffs:
            if any(x >= C.p for x in e):
                return f"exponent {e} at degree {l} is not below p"
    for l in C.degrees():
        if not C.rank(l - C.N):
            continue
        acc = PolyMatrix.identity(C.field, C.n, C.rank(l), C.p)
        for j in range(C.N):
            acc = C.dmat(l - j) @ acc
        if not acc.is_zero():
            return f"d^{C.N} is nonzero at degree {l}"
    return None


def gc_validate(C: GComplex) -> bool:
    return gc_first_failure(C) is None


def gc_flatten(C: GComplex) -> NComplexFin:
    size = C.p**C.n
    return NComplexFin(C.ctx(), {l: r * size for l, r in C.ranks.items()},
                       {l: flatten_matrix(M, C.p) for l, M in C.d.items()}, check=False)


def gc_euler(C: GComplex) -> int:
    return C.p**C.n * sum((-1) ** (l % 2) * r for l, r in C.ranks.items())


def gc_shift(C: GComplex, k: int) -> GComplex:
    """``C[k]``; odd shifts negate the differential of an ordinary complex."""
    sign = C.field.p - 1 if (k % 2 and C.N == 2) else 1
    return GComplex(C.field, C.p, C.n, C.N, {l + k: r for l, r in C.ranks.items()},
                    {l + k: M.scale(sign) for l, M in C.d.items()}, check=False)


def gc_direct_sum(*Cs: GComplex) -> GComplex:
    C0 = Cs[0]
    degs = sorted(set().union(*[C.ranks for C in Cs]))
    ranks = {l: sum(C.rank(l) for C in Cs) for l in degs}
    d = {}
    for l in degs:
        if not ranks.get(l - 1):
            continue
        coeffs: dict = {}
        r0 = c0 = 0
        for C in Cs:
            for e, A in C.dmat(l).coeffs.items():
                if e not in coeffs:
                    coeffs[e] = np.zeros((ranks[l - 1], ranks[l]), dtype=np.int64)
                coeffs[e][r0:r0 + A.shape[0], c0:c0 + A.shape[1]] = A
            r0 += C.rank(l - 1)
            c0 += C.rank(l)
        d[l] = PolyMatrix(C0.field, C0.n, (ranks[l - 1], ranks[l]), coeffs, C0.p)
    return GComplex(C0.field, C0.p, C0.n, C0.N, ranks, d, check=False)


def gc_tensor(C: GComplex, D: GComplex) -> GComplex:
    """Tensor product over k[G] of two ordinary complexes (Koszul sign rule)."""
    if C.N != 2 or D.N != 2:
        raise ValueError("gc_tensor is defined for ordinary complexes")
    F = C.field
    layout: dict[int, list[tuple[int, int]]] = {}
    for a in C.degrees():
        for b in D.degrees():
            layout.setdefault(a + b, []).append((a, b))
    ranks = {n: sum(C.rank(a) * D.rank(b) for a, b in pairs) for n, pairs in layout.items()}
    offs = {}
    for n, pairs in layout.items():
        o = 0
        for a, b in sorted(pairs):
            offs[(a, b)] = o
            o += C.rank(a) * D.rank(b)
    d = {}
    for n, pairs in layout.items():
        if not ranks.get(n - 1):
            continue
        coeffs: dict = {}
        shape = (ranks[n - 1], ranks[n])

        def put(e, r0, c0, A):
            if e not in coeffs:
                coeffs[e] = np.zeros(shape, dtype=np.int64)
            blk = coeffs[e][r0:r0 + A.shape[0], c0:c0 + A.shape[1]]
            coeffs[e][r0:r0 + A.shape[0], c0:c0 + A.shape[1]] = F.add(blk, A)

        for a, b in pairs:
            c0 = offs[(a, b)]
            if (a - 1, b) in offs and a in C.d:
                r0 = offs[(a - 1, b)]
                I = np.eye(D.rank(b), dtype=np.int64)
                for e, A in C.d[a].coeffs.items():
                    put(e, r0, c0, _kron(F, A, I))
            if (a, b - 1) in offs and b in D.d:
                r0 = offs[(a, b - 1)]
                I = np.eye(C.rank(a), dtype=np.int64)
                sign = 1 if a % 2 == 0 else F.p - 1
                for e, A in D.d[b].coeffs.items():
                    put(e, r0, c0, F.mul(_kron(F, I, A), sign))
        d[n] = PolyMatrix(F, C.n, shape, coeffs, C.p)
    return GComplex(F, C.p, C.n, 2, ranks, d, check=False)


def gc_circle(p: int, n: int = 1, t: int = 0, field: FieldSpec | None = None) -> GComplex:
    """``k[G] --y_t--> k[G]`` in degrees 1 -> 0."""
    F = field or field_make(p)
    y = MultiPoly.var(F, n, t, trunc=p)
    return PerfectComplex(F, p, n, {1: 1, 0: 1}, {1: PolyMatrix.from_entries(F, n, [[y]], trunc=p)})


def gc_free(p: int, n: int, degree: int = 0, rank_: int = 1, field: FieldSpec | None = None) -> GComplex:
    F = field or field_make(p)
    return PerfectComplex(F, p, n, {degree: rank_}, {})


def gc_torus(n: int, p: int, field: FieldSpec | None = None) -> GComplex:
    """Exterior Koszul complex on y_1..y_n, the tensor of the n circle complexes.

    Degree i has basis ``e_S`` for i-subsets S in lexicographic order, and
    ``d(e_S) = Σ_k (-1)^k y_{S_k} e_{S minus S_k}``.
    """
    if n < 1:
        raise ValueError("the torus complex needs n >= 1")
    F = field or field_make(p)
    subsets = {i: list(combinations(range(n), i)) for i in range(n + 1)}
    index = {i: {S: k for k, S in enumerate(subsets[i])} for i in subsets}
    d = {}
    for i in range(1, n + 1):
        rows = [[MultiPoly.zero(F, n, p) for _ in subsets[i]] for _ in subsets[i - 1]]
        for j, S in enumerate(subsets[i]):
            for k, t in enumerate(S):
                T = S[:k] + S[k + 1:]
                coef = 1 if k % 2 == 0 else p - 1
                rows[index[i - 1][T]][j] = rows[index[i - 1][T]][j] + MultiPoly.var(F, n, t, p) * coef
        d[i] = PolyMatrix.from_entries(F, n, rows, trunc=p)
    return PerfectComplex(F, p, n, {i: len(subsets[i]) for i in subsets}, d)


# -- modules and homology --------------------------------------------------------

@dataclass
class GModule:
    field: FieldSpec
    dim: int
    actions: list[np.ndarray]

    def check(self, p: int) -> None:
        F = self.field
        for i, Y in enumerate(self.actions):
            Yp = np.eye(self.dim, dtype=np.int64)
            for _ in range(p):
                Yp = F.matmul(Yp, Y)
            if Yp.any():
                raise ValueError(f"y_{i + 1} does not act p-nilpotently")
            for Z in self.actions[i + 1:]:
                if not np.array_equal(F.matmul(Y, Z), F.matmul(Z, Y)):
                    raise ValueError("actions do not commute")


def gc_loewy_length(M: GModule) -> int:
    """Least l with J^l M = 0."""
    F = M.field
    if M.dim == 0:
        return 0
    cur = np.eye(M.dim, dtype=np.int64)
    l = 0
    while cur.shape[1]:
        l += 1
        imgs = [F.matmul(Y, cur) for Y in M.actions]
        nxt = np.hstack(imgs) if imgs else np.zeros((M.dim, 0), dtype=np.int64)
        cur = colspace(F, nxt) if nxt.size else np.zeros((M.dim, 0), dtype=np.int64)
    return l


def induced_action(F: FieldSpec, sq: Subquotient, Y: np.ndarray) -> np.ndarray:
    if sq.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return sq.coords(F.matmul(Y, sq.reps))


def gc_homology(C: GComplex) -> dict[int, GModule]:
    """H_i(C) with the induced y-actions, for every degree of the support."""
    if C.N != 2:
        raise ValueError("gc_homology expects an ordinary complex")
    X = gc_flatten(C)
    H = ncx_homology(X, 1)
    out = {}
    for l in C.degrees():
        sq = H.subq[l]
        acts = [induced_action(C.field, sq, y_action(C.p, C.n, t, C.rank(l))) for t in range(C.n)]
        out[l] = GModule(C.field, sq.dim, acts)
    return out


# -- the iota construction ---------------------------------------------------------

def iota_degrees(l: int, p: int) -> list[int]:
    """Degrees of ι C occupied by C_l (one for odd l, p-1 for even l)."""
    if l % 2:
        return [p * ((l + 1) // 2) - 1]
    i = l // 2
    return [p * i + j for j in range(p - 1)]


def iota_source(deg: int, p: int) -> tuple[int, int]:
    """(degree in C, copy index) of the piece of ι C in degree ``deg``."""
    i, r = divmod(deg + 1, p)
    if r == 0:
        return 2 * i - 1, 0
    return 2 * i, r - 1


def gc_iota(C: GComplex) -> GComplex:
    if C.N != 2:
        raise ValueError("ι is defined on ordinary complexes")
    p = C.p
    ranks = {}
    for l in C.degrees():
        for deg in iota_degrees(l, p):
            ranks[deg] = C.rank(l)
    d = {}
    for deg in ranks:
        l, j = iota_source(deg, p)
        if not ranks.get(deg - 1):
            continue
        if l % 2 == 0 and j >= 1:
            d[deg] = PolyMatrix.identity(C.field, C.n, C.rank(l), p)
        else:
            d[deg] = C.dmat(l)
    return GComplex(C.field, p, C.n, p, ranks, d, check=False)


def iota_flat(X: NComplexFin, p: int, ctx: QContext | None = None) -> NComplexFin:
    """ι on a k-level chain complex; the result is a p-complex."""
    ctx = ctx or default_context(p, p, X.field.m)
    dims = {}
    for l in X.degrees():
        for deg in iota_degrees(l, p):
            dims[deg] = X.dim(l)
    d = {}
    for deg in dims:
        l, j = iota_source(deg, p)
        if not dims.get(deg - 1):
            continue
        d[deg] = np.eye(X.dim(l), dtype=np.int64) if (l % 2 == 0 and j >= 1) else X.dmat(l)
    return NComplexFin(ctx, dims, d, check=False)


def iota_map(f: Morphism, iC: NComplexFin, iD: NComplexFin, p: int) -> Morphism:
    """ι of a degree-0 chain map: the same matrix on every copy."""
    maps = {}
    for deg in iC.dims:
        l, _ = iota_source(deg, p)
        maps[deg] = f.at(l)
    return Morphism(iC, iD, 0, maps)


def gc_iota_homotopy_transport(f: Morphism, h: Morphism, p: int, check: bool = True) -> Morphism:
    """Turn a null-homotopy ``h`` of ι f into a null-homotopy of ``f``.

    ``f: C -> D`` is a chain map of k-level complexes and ``h`` a degree
    ``p-1`` map ``ιC -> ιD``.  On odd degrees ``H_{2l-1} = h_{pl-1}``; on even
    degrees ``H_{2l} = d(h_{pl+p-2} + ... + h_{pl+1}) + h_{pl}``.
    """
    C, D = f.src, f.tgt
    iC, iD = h.src, h.tgt
    F = C.field
    if h.degree != p - 1:
        raise ValueError(f"homotopy must have degree {p - 1}")
    if check:
        if not is_morphism(f):
            raise ValueError("f is not a chain map")
        hs = homotopy_sum(h)
        ifm = iota_map(f, iC, iD, p)
        for deg in iC.dims:
            if not np.array_equal(hs.at(deg), ifm.at(deg)):
                raise ValueError(f"h is not a null-homotopy of ι f at degree {deg}")
    maps = {}
    for l in C.degrees():
        if l % 2:
            maps[l] = h.at(p * ((l + 1) // 2) - 1)
        else:
            i = l // 2
            acc = np.zeros((D.dim(l + 2), C.dim(l)), dtype=np.int64)
            for j in range(1, p - 1):
                acc = F.add(acc, h.at(p * i + j))
            term = F.matmul(D.dmat(l + 2), acc) if D.dim(l + 2) else np.zeros((D.dim(l + 1), C.dim(l)),
                                                                                 dtype=np.int64)
            maps[l] = F.add(term, h.at(p * i))
    return Morphism(C, D, 1, maps)


def iota_lift_homotopy(H: Morphism, iC: NComplexFin, iD: NComplexFin, p: int) -> Morphism:
    """A p-complex null-homotopy of ι f from a chain null-homotopy ``H`` of f."""
    maps = {}
    for l in H.src.degrees():
        if l % 2:
            maps[p * ((l + 1) // 2) - 1] = H.at(l)
        else:
            maps[p * (l // 2)] = H.at(l)
    return Morphism(iC, iD, p - 1, maps)


def homotopy_kernel(iC: NComplexFin, iD: NComplexFin) -> tuple[NComplexFin, np.ndarray]:
    """Degree ``N-1`` maps ``h`` with ``Σ d^{N-1-i} h d^i = 0`` (basis columns).

    For q = 1 that sum is the (N-1)-st power of the Hom differential.
    """
    Hm = ncx_hom(iC, iD)
    N = iC.N
    top = N - 1
    if Hm.dim(top) == 0:
        return Hm, np.zeros((0, 0), dtype=np.int64)
    if Hm.dim(0) == 0:
        return Hm, np.eye(Hm.dim(top), dtype=np.int64)
    return Hm, nullspace(iC.field, Hm.dpow(top, top))


# -- random perfect complexes -------------------------------------------------------

def random_kg_element(F: FieldSpec, p: int, n: int, rng: np.random.Generator, ideal: bool = False,
                      density: float = 0.5) -> MultiPoly:
    terms = {}
    for a in kg_basis(p, n):
        if ideal and not any(a):
            continue
        if rng.random() < density:
            terms[a] = int(F.random(rng))
    return MultiPoly(F, n, terms, trunc=p)


def random_kg_matrix(F, p, n, shape, rng, ideal=False, density=0.5) -> PolyMatrix:
    rows = [[random_kg_element(F, p, n, rng, ideal, density) for _ in range(shape[1])] for _ in range(shape[0])]
    if shape[0] == 0 or shape[1] == 0:
        return PolyMatrix.zeros(F, n, shape, p)
    return PolyMatrix.from_entries(F, n, rows, trunc=p)


def random_kg_invertible(F, p, n, size, rng) -> PolyMatrix:
    from .ncomplex import random_invertible

    U = random_kg_matrix(F, p, n, (size, size), rng, ideal=True, density=0.3)
    P0 = random_invertible(F, rng, size)
    return PolyMatrix.identity(F, n, size, p).mul_const_left(P0) + U.mul_const_left(P0)


def gc_conjugate(C: GComplex, g: Mapping[int, PolyMatrix]) -> GComplex:
    ginv = {l: polymatrix_inverse(M) for l, M in g.items()}
    d = {}
    for l, M in C.d.items():
        d[l] = g[l - 1] @ M @ ginv[l]
    return GComplex(C.field, C.p, C.n, C.N, C.ranks, d, check=False)


def random_two_term(F, p, n, rng, top: int, r1: int, r0: int, ideal: bool = True) -> GComplex:
    M = random_kg_matrix(F, p, n, (r0, r1), rng, ideal=ideal)
    return PerfectComplex(F, p, n, {top: r1, top - 1: r0}, {top: M})


def random_perfect_complex(p: int, n: int, rng: np.random.Generator, max_rank: int = 3, width: int = 6,
                           field: FieldSpec | None = None) -> GComplex:
    """Random bounded complex of free k[G]-modules.

    Built from shifted two-term complexes and tensor products of them (which
    give genuinely longer complexes), summed and then conjugated by random
    invertible k[G]-matrices.
    """
    F = field or field_make(p)
    pieces = []
    for _ in range(int(rng.integers(1, 4))):
        kind = rng.random()
        if kind < 0.35 and width >= 2:
            top = int(rng.integers(1, width))
            pieces.append(random_two_term(F, p, n, rng, top, int(rng.integers(1, 3)), int(rng.integers(1, 3)),
                                          ideal=rng.random() < 0.8))
        elif kind < 0.7 and width >= 3:
            A = random_two_term(F, p, n, rng, 1, 1, 1)
            B = random_two_term(F, p, n, rng, 1, 1, 1)
            T = gc_tensor(A, B)
            pieces.append(gc_shift(T, int(rng.integers(0, width - 2))))
        else:
            pieces.append(gc_free(p, n, int(rng.integers(0, width)), 1, F))
    C = gc_direct_sum(*pieces)
    if any(r > max_rank for r in C.ranks.values()):
        return random_perfect_complex(p, n, rng, max_rank, width, F)
    g = {l: random_kg_invertible(F, p, n, r, rng) for l, r in C.ranks.items()}
    C = gc_conjugate(C, g)
    bad = gc_first_failure(C)
    if bad is not None:
        raise AssertionError(bad)
    return C
