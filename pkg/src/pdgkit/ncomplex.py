"""Finite-dimensional N-complexes over a field.

A complex stores ``dims[l]`` and, for each degree ``l``, the matrix of
``d: C_l -> C_{l-1}`` of shape ``(dims[l-1], dims[l])``.  Degrees outside the
support have dimension zero.  Morphisms of degree ``k`` store one matrix per
source degree, ``maps[l]: C_l -> D_{l+k}``; homotopies are morphisms of
degree ``N-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .field import FieldSpec
from .linalg import Subquotient, extend_basis, inverse, nullspace, rank, solve
from .qcombinat import QContext


def _zeros(r, c):
    return np.zeros((r, c), dtype=np.int64)


class NComplexFin:
    def __init__(self, ctx: QContext, dims: Mapping[int, int], d: Mapping[int, np.ndarray] | None = None,
                 check: bool = True):
        self.ctx = ctx
        self.dims = {int(l): int(k) for l, k in dims.items() if int(k) > 0}
        self.d: dict[int, np.ndarray] = {}
        for l, A in (d or {}).items():
            l = int(l)
            A = np.asarray(A, dtype=np.int64)
            shape = (self.dim(l - 1), self.dim(l))
            if A.size == 0 and shape[0] * shape[1] == 0:
                continue
            if A.shape != shape:
                raise ValueError(f"differential at degree {l} has shape {A.shape}, expected {shape}")
            if A.any():
                self.d[l] = A
        self.blocks: dict[int, list[tuple]] | None = None
        self.factors: tuple | None = None
        if check:
            bad = first_failure(self)
            if bad is not None:
                raise ValueError(bad)

    @property
    def field(self) -> FieldSpec:
        return self.ctx.spec

    @property
    def N(self) -> int:
        return self.ctx.N

    def dim(self, l: int) -> int:
        return self.dims.get(l, 0)

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def support(self) -> tuple[int, int]:
        """(lowest, highest) nonzero degree; (0, -1) for the zero complex."""
        if not self.dims:
            return (0, -1)
        return (min(self.dims), max(self.dims))

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dmat(self, l: int) -> np.ndarray:
        if l in self.d:
            return self.d[l]
        return _zeros(self.dim(l - 1), self.dim(l))

    def dpow(self, l: int, k: int) -> np.ndarray:
        """Matrix of ``d^k: C_l -> C_{l-k}``."""
        out = np.eye(self.dim(l), dtype=np.int64)
        for j in range(k):
            out = self.field.matmul(self.dmat(l - j), out)
        return out

    def is_zero(self) -> bool:
        return not self.dims

    def __repr__(self) -> str:
        degs = ", ".join(f"{l}:{self.dims[l]}" for l in sorted(self.dims, reverse=True))
        return f"NComplexFin(N={self.N}, q={self.ctx.q}, dims={{{degs}}})"


def first_failure(C: NComplexFin) -> str | None:
    for l, A in C.d.items():
        if A.shape != (C.dim(l - 1), C.dim(l)):
            return f"shape mismatch at degree {l}"
    lo, hi = C.support()
    for l in range(lo, hi + 1):
        if C.dim(l) and C.dim(l - C.N) and C.dpow(l, C.N).any():
            return f"d^{C.N} is nonzero starting at degree {l}"
    return None


def ncx_validate(C: NComplexFin) -> bool:
    return first_failure(C) is None


def ncx_zero(ctx: QContext) -> NComplexFin:
    return NComplexFin(ctx, {}, {})


def ncx_string(ctx: QContext, top: int, length: int, coeff: int = 1) -> NComplexFin:
    """One string ``k -> k -> ... -> k`` of ``length`` copies, highest degree ``top``."""
    dims = {top - j: 1 for j in range(length)}
    d = {top - j: np.array([[coeff]]) for j in range(length - 1)}
    return NComplexFin(ctx, dims, d)


def ncx_direct_sum(*Cs: NComplexFin) -> NComplexFin:
    ctx = Cs[0].ctx
    degs = sorted(set().union(*[C.dims for C in Cs]))
    dims = {l: sum(C.dim(l) for C in Cs) for l in degs}
    d = {}
    for l in degs:
        if dims.get(l - 1, 0):
            A = _zeros(dims[l - 1], dims[l])
            r = c = 0
            for C in Cs:
                A[r:r + C.dim(l - 1), c:c + C.dim(l)] = C.dmat(l)
                r += C.dim(l - 1)
                c += C.dim(l)
            d[l] = A
    return NComplexFin(ctx, dims, d)


def ncx_shift(C: NComplexFin, l: int) -> NComplexFin:
    """``C[l]_i = C_{i-l}`` with the same differential."""
    return NComplexFin(C.ctx, {i + l: k for i, k in C.dims.items()},
                       {i + l: A for i, A in C.d.items()}, check=False)


def ncx_euler(C: NComplexFin) -> int:
    return sum((-1) ** (l % 2) * k for l, k in C.dims.items())


def _same_ctx(C: NComplexFin, D: NComplexFin):
    if C.ctx != D.ctx:
        raise ValueError(f"context mismatch: {C.ctx!r} vs {D.ctx!r}")


# -- morphisms ----------------------------------------------------------------

class Morphism:
    """Graded map ``src -> tgt`` of a fixed degree."""

    def __init__(self, src: NComplexFin, tgt: NComplexFin, degree: int,
                 maps: Mapping[int, np.ndarray] | None = None):
        self.src = src
        self.tgt = tgt
        self.degree = int(degree)
        self.maps: dict[int, np.ndarray] = {}
        for l, A in (maps or {}).items():
            l = int(l)
            shape = (tgt.dim(l + self.degree), src.dim(l))
            A = np.asarray(A, dtype=np.int64)
            if shape[0] * shape[1] == 0:
                continue
            if A.shape != shape:
                raise ValueError(f"map at degree {l} has shape {A.shape}, expected {shape}")
            if A.any():
                self.maps[l] = A

    def at(self, l: int) -> np.ndarray:
        if l in self.maps:
            return self.maps[l]
        return _zeros(self.tgt.dim(l + self.degree), self.src.dim(l))

    def __add__(self, other: "Morphism") -> "Morphism":
        F = self.src.field
        degs = set(self.maps) | set(other.maps)
        return Morphism(self.src, self.tgt, self.degree,
                        {l: F.add(self.at(l), other.at(l)) for l in degs})

    def __neg__(self):
        F = self.src.field
        return Morphism(self.src, self.tgt, self.degree, {l: F.neg(A) for l, A in self.maps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "Morphism":
        F = self.src.field
        return Morphism(self.src, self.tgt, self.degree, {l: F.mul(A, c) for l, A in self.maps.items()})

    def compose(self, other: "Morphism") -> "Morphism":
        """``self ∘ other``."""
        F = self.src.field
        out = {}
        for l in other.src.dims:
            out[l] = F.matmul(self.at(l + other.degree), other.at(l))
        return Morphism(other.src, self.tgt, self.degree + other.degree, out)


def ncx_identity(C: NComplexFin) -> Morphism:
    return Morphism(C, C, 0, {l: np.eye(k, dtype=np.int64) for l, k in C.dims.items()})


def ncx_zero_map(C: NComplexFin, D: NComplexFin, degree: int = 0) -> Morphism:
    return Morphism(C, D, degree, {})


def commutation_failure(f: Morphism) -> int | None:
    """First source degree where ``d f != f d`` (degree-0 maps only), or None."""
    F = f.src.field
    for l in sorted(set(f.src.dims) | {l + 1 for l in f.src.dims}):
        lhs = F.matmul(f.tgt.dmat(l + f.degree), f.at(l))
        rhs = F.matmul(f.at(l - 1), f.src.dmat(l))
        if lhs.size and not np.array_equal(lhs, rhs):
            return l
    return None


def is_morphism(f: Morphism) -> bool:
    return f.degree == 0 and commutation_failure(f) is None


def homotopy_sum(h: Morphism) -> Morphism:
    """``Σ_{i=0}^{N-1} d'^{N-1-i} h d^i`` as a degree-0 map."""
    C, D = h.src, h.tgt
    N = C.N
    F = C.field
    out = {}
    for l in C.dims:
        acc = _zeros(D.dim(l), C.dim(l))
        for i in range(N):
            a = C.dpow(l, i)
            b = h.at(l - i)
            c = D.dpow(l - i + N - 1, N - 1 - i)
            if a.size and b.size and c.size:
                acc = F.add(acc, F.matmul(c, F.matmul(b, a)))
        out[l] = acc
    return Morphism(C, D, 0, out)


def ncx_verify_homotopy(f: Morphism, g: Morphism, h: Morphism) -> bool:
    """True iff ``f - g = Σ d'^{N-1-i} h d^i`` in every degree."""
    for name, m in (("f", f), ("g", g)):
        if m.degree != 0:
            raise ValueError(f"{name} has degree {m.degree}, expected a degree-0 morphism")
        bad = commutation_failure(m)
        if bad is not None:
            raise ValueError(f"{name} does not commute with d at degree {bad}")
    if h.degree != f.src.N - 1:
        raise ValueError(f"homotopy must have degree {f.src.N - 1}, got {h.degree}")
    diff = f - g
    hs = homotopy_sum(h)
    return all(np.array_equal(diff.at(l), hs.at(l)) for l in f.src.dims)


# -- homology -----------------------------------------------------------------

@dataclass
class HomologyTable:
    s: int
    dims: dict[int, int]
    subq: dict[int, Subquotient] = field(default_factory=dict, repr=False)

    def dim(self, l: int) -> int:
        return self.dims.get(l, 0)

    def total(self) -> int:
        return sum(self.dims.values())


def _homology_at(C: NComplexFin, s: int, n: int) -> Subquotient:
    F = C.field
    N = C.N
    K = nullspace(F, C.dpow(n, s)) if C.dim(n - s) else np.eye(C.dim(n), dtype=np.int64)
    I = C.dpow(n + N - s, N - s) if C.dim(n + N - s) else _zeros(C.dim(n), 0)
    return Subquotient(F, K, I)


def ncx_homology(C: NComplexFin, s: int) -> HomologyTable:
    """Dimensions (and quotient bases) of ``ker d^s / im d^{N-s}`` per degree."""
    if not 1 <= s <= C.N - 1:
        raise ValueError(f"s must lie in [1, {C.N - 1}], got {s}")
    dims, subq = {}, {}
    for n in C.degrees():
        sq = _homology_at(C, s, n)
        subq[n] = sq
        if sq.dim:
            dims[n] = sq.dim
    return HomologyTable(s, dims, subq)


def ncx_homology_all(C: NComplexFin) -> dict[int, HomologyTable]:
    return {s: ncx_homology(C, s) for s in range(1, C.N)}


def ncx_is_acyclic(C: NComplexFin) -> bool:
    return ncx_homology(C, 1).total() == 0


def _empty_sq(F, n):
    return Subquotient(F, _zeros(n, 0), _zeros(n, 0))


def _class_map(C: NComplexFin, H: Mapping[int, HomologyTable], s: int, n: int, t: int, k: int) -> np.ndarray:
    """Matrix of ``[z] -> [d^k z]`` from ``_sH_n`` to ``_tH_{n-k}``."""
    F = C.field
    src = H[s].subq.get(n) or _empty_sq(F, C.dim(n))
    tgt = H[t].subq.get(n - k) or _empty_sq(F, C.dim(n - k))
    if src.dim == 0 or tgt.dim == 0:
        return _zeros(tgt.dim, src.dim)
    img = F.matmul(C.dpow(n, k), src.reps)
    return tgt.coords(img)


def ncx_induced_maps(C: NComplexFin, s: int) -> tuple[dict[int, np.ndarray], dict[int, np.ndarray]]:
    """Matrices of ``i_*: _sH_n -> _{s+1}H_n`` and ``d_*: _sH_n -> _{s-1}H_{n-1}``.

    Either dict is empty when the corresponding map is undefined for ``s``.
    """
    N = C.N
    if N < 3:
        raise ValueError("induced maps need N >= 3")
    if not 1 <= s <= N - 1:
        raise ValueError(f"s must lie in [1, {N - 1}], got {s}")
    H = ncx_homology_all(C)
    i_star, d_star = {}, {}
    for n in C.degrees():
        if s <= N - 2:
            i_star[n] = _class_map(C, H, s, n, s + 1, 0)
        if s >= 2:
            d_star[n] = _class_map(C, H, s, n, s - 1, 1)
    return i_star, d_star


@dataclass
class ExactnessReport:
    ok: bool
    nodes: int
    failures: list[str]


def _check_node(label, A, B, dim, F, failures):
    """Exactness at a node of dimension ``dim`` with incoming A and outgoing B."""
    if A.size and B.size and F.matmul(B, A).any():
        failures.append(f"{label}: composite is nonzero")
        return
    ra = rank(F, A) if A.size else 0
    rb = rank(F, B) if B.size else 0
    if ra + rb != dim:
        failures.append(f"{label}: rank(in)={ra}, rank(out)={rb}, dim={dim}")


def ncx_hexagon_check(C: NComplexFin) -> ExactnessReport:
    """Exactness of the six-term sequences built from powers of i_* and d_*."""
    N = C.N
    F = C.field
    H = ncx_homology_all(C)
    lo, hi = C.support()
    failures: list[str] = []
    nodes = 0
    for r in range(1, N - 1):
        for s in range(1, N - r):
            # (homology index, degree offset) for the six positions; position 6 = position 0 at -N
            pos = [(s, 0), (s + r, 0), (r, -s), (N - s, -s), (N - s - r, -s - r), (N - r, -s - r), (s, -N)]

            def arrow(k, n):
                (a, oa), (b, ob) = pos[k], pos[k + 1]
                return _class_map(C, H, a, n + oa, b, oa - ob)

            for n in range(lo, hi + N + 1):
                for k in range(6):
                    a, oa = pos[k]
                    deg = n + oa
                    dim = H[a].dim(deg)
                    incoming = arrow(k - 1, n) if k else arrow(5, n + N)
                    outgoing = arrow(k, n)
                    nodes += 1
                    _check_node(f"r={r} s={s} node {k} degree {deg}", incoming, outgoing, dim, F, failures)
    return ExactnessReport(not failures, nodes, failures)


def _degreewise_ses_failure(incl: Morphism, proj: Morphism) -> str | None:
    F = incl.src.field
    A, B, C = incl.src, incl.tgt, proj.tgt
    if proj.src is not B and proj.src.dims != B.dims:
        return "projection source differs from inclusion target"
    for f, name in ((incl, "inclusion"), (proj, "projection")):
        if f.degree != 0:
            return f"{name} has nonzero degree"
        bad = commutation_failure(f)
        if bad is not None:
            return f"{name} does not commute with d at degree {bad}"
    for l in sorted(set(A.dims) | set(B.dims) | set(C.dims)):
        i, p = incl.at(l), proj.at(l)
        if rank(F, i) != A.dim(l):
            return f"inclusion not injective at degree {l}"
        if rank(F, p) != C.dim(l):
            return f"projection not surjective at degree {l}"
        if i.size and p.size and F.matmul(p, i).any():
            return f"projection after inclusion is nonzero at degree {l}"
        if A.dim(l) + C.dim(l) != B.dim(l):
            return f"dimensions do not add up at degree {l}"
    return None


def ncx_ses_check(incl: Morphism, proj: Morphism) -> ExactnessReport:
    """Exactness of the long exact sequences induced by ``0 -> A -> B -> C -> 0``."""
    bad = _degreewise_ses_failure(incl, proj)
    if bad is not None:
        raise ValueError(f"not a short exact sequence: {bad}")
    A, B, C = incl.src, incl.tgt, proj.tgt
    N = B.N
    F = B.field
    HA, HB, HC = ncx_homology_all(A), ncx_homology_all(B), ncx_homology_all(C)
    cx = [A, B, C]
    Hs = [HA, HB, HC]

    def induced(f: Morphism, Hsrc, Htgt, s, n):
        src = Hsrc[s].subq.get(n)
        tgt = Htgt[s].subq.get(n)
        if src is None or tgt is None or src.dim == 0 or tgt.dim == 0:
            return _zeros(tgt.dim if tgt else 0, src.dim if src else 0)
        return tgt.coords(F.matmul(f.at(n), src.reps))

    def connecting(s, n):
        """``_sH_n(C) -> _{N-s}H_{n-s}(A)``: lift, apply d^s, pull back."""
        src = HC[s].subq.get(n)
        tgt = HA[N - s].subq.get(n - s)
        if src is None or tgt is None or src.dim == 0 or tgt.dim == 0:
            return _zeros(tgt.dim if tgt else 0, src.dim if src else 0)
        y = solve(F, proj.at(n), src.reps)
        w = F.matmul(B.dpow(n, s), y)
        x = solve(F, incl.at(n - s), w)
        if x is None:
            raise AssertionError("connecting map: boundary does not pull back")
        return tgt.coords(x)

    lo = min(X.support()[0] for X in cx if X.dims) if any(X.dims for X in cx) else 0
    hi = max(X.support()[1] for X in cx if X.dims) if any(X.dims for X in cx) else -1
    failures: list[str] = []
    nodes = 0
    for s in range(1, N):
        t = N - s
        # positions: (complex index, homology index, degree offset)
        pos = [(0, s, 0), (1, s, 0), (2, s, 0), (0, t, -s), (1, t, -s), (2, t, -s), (0, s, -N)]

        def arrow(k, n):
            ci, a, oa = pos[k]
            if k in (0, 3):
                return induced(incl, Hs[0], Hs[1], a, n + oa)
            if k in (1, 4):
                return induced(proj, Hs[1], Hs[2], a, n + oa)
            if k == 2:
                return connecting(s, n)
            return connecting(t, n - s)

        for n in range(lo, hi + N + 1):
            for k in range(6):
                ci, a, oa = pos[k]
                dim = Hs[ci][a].dim(n + oa)
                incoming = arrow(k - 1, n) if k else arrow(5, n + N)
                outgoing = arrow(k, n)
                nodes += 1
                _check_node(f"s={s} node {k} degree {n + oa}", incoming, outgoing, dim, F, failures)
    return ExactnessReport(not failures, nodes, failures)


# -- tensor and Hom -----------------------------------------------------------

def ncx_tensor(C: NComplexFin, D: NComplexFin) -> NComplexFin:
    """``⊕_{a+b=n} C_a ⊗ D_b`` with ``d(x⊗y) = dx⊗y + q^{-a} x⊗dy``.

    Blocks within a degree are ordered by ``a`` ascending; ``x⊗y`` is stored
    as ``kron(x, y)``.  The block layout is kept in ``.blocks``.
    """
    _same_ctx(C, D)
    ctx = C.ctx
    F = C.field
    blocks: dict[int, list[tuple[int, int, int, int]]] = {}
    for a in C.degrees():
        for b in D.degrees():
            blocks.setdefault(a + b, []).append((a, b))
    layout: dict[int, list[tuple[int, int, int, int]]] = {}
    dims = {}
    for n, pairs in blocks.items():
        off = 0
        rows = []
        for a, b in sorted(pairs):
            size = C.dim(a) * D.dim(b)
            rows.append((a, b, off, size))
            off += size
        layout[n] = rows
        dims[n] = off
    index = {n: {(a, b): (o, sz) for a, b, o, sz in rows} for n, rows in layout.items()}
    d = {}
    for n, rows in layout.items():
        if not dims.get(n - 1):
            continue
        A = _zeros(dims[n - 1], dims[n])
        for a, b, o, sz in rows:
            if (a - 1, b) in index[n - 1] and a in C.d:
                o2, sz2 = index[n - 1][(a - 1, b)]
                blk = _kron(F, C.dmat(a), np.eye(D.dim(b), dtype=np.int64))
                A[o2:o2 + sz2, o:o + sz] = F.add(A[o2:o2 + sz2, o:o + sz], blk)
            if (a, b - 1) in index[n - 1] and (b in D.d):
                o2, sz2 = index[n - 1][(a, b - 1)]
                blk = _kron(F, np.eye(C.dim(a), dtype=np.int64), D.dmat(b))
                blk = F.mul(blk, ctx.qpow(-a))
                A[o2:o2 + sz2, o:o + sz] = F.add(A[o2:o2 + sz2, o:o + sz], blk)
        d[n] = A
    T = NComplexFin(ctx, dims, d, check=False)
    T.blocks = layout
    T.factors = (C, D)
    return T


def _kron(F: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product with field multiplication."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if F.m == 1:
        return np.kron(A, B) % F.p
    prod = F.mul(A[:, None, :, None], B[None, :, None, :])
    return prod.reshape(A.shape[0] * B.shape[0], A.shape[1] * B.shape[1])


def ncx_tensor_maps(T_src: NComplexFin, T_tgt: NComplexFin, f: Morphism | None, g: Morphism | None,
                    scalar: Callable[[int, int], int] | None = None) -> Morphism:
    """``x⊗y -> scalar(a, b)·f(x)⊗g(y)`` between tensor complexes.

    ``None`` stands for an identity.  ``T_src`` and ``T_tgt`` must come from
    :func:`ncx_tensor` so that their block layouts are known.
    """
    if T_src.blocks is None or T_tgt.blocks is None:
        raise ValueError("tensor maps need complexes built by ncx_tensor")
    F = T_src.field
    C, D = T_src.factors
    df = f.degree if f is not None else 0
    dg = g.degree if g is not None else 0
    tgt_index = {n: {(a, b): (o, sz) for a, b, o, sz in rows} for n, rows in T_tgt.blocks.items()}
    out = {}
    for n, rows in T_src.blocks.items():
        M = _zeros(T_tgt.dim(n + df + dg), T_src.dim(n))
        for a, b, o, sz in rows:
            key = (a + df, b + dg)
            if key not in tgt_index.get(n + df + dg, {}):
                continue
            o2, sz2 = tgt_index[n + df + dg][key]
            fa = f.at(a) if f is not None else np.eye(C.dim(a), dtype=np.int64)
            gb = g.at(b) if g is not None else np.eye(D.dim(b), dtype=np.int64)
            blk = _kron(F, fa, gb)
            if scalar is not None:
                blk = F.mul(blk, int(scalar(a, b)))
            M[o2:o2 + sz2, o:o + sz] = blk
        out[n] = M
    return Morphism(T_src, T_tgt, df + dg, out)


def ncx_hom(C: NComplexFin, D: NComplexFin) -> NComplexFin:
    """``Hom(C, D)_n = ⊕_i Hom(C_i, D_{i+n})`` with ``d(f)_i = d f_i - q^{-n} f_{i-1} d``.

    Components are ordered by ``i`` ascending; each ``f_i`` is flattened in
    row-major order.  The layout is kept in ``.blocks`` as ``(i, offset, rows, cols)``.
    """
    _same_ctx(C, D)
    ctx = C.ctx
    F = C.field
    layout: dict[int, list[tuple[int, int, int, int]]] = {}
    for i in C.degrees():
        for j in D.degrees():
            layout.setdefault(j - i, []).append((i, C.dim(i), D.dim(j)))
    blocks: dict[int, list[tuple[int, int, int, int]]] = {}
    dims = {}
    for n, items in layout.items():
        off = 0
        rows = []
        for i, ci, dj in sorted(items):
            rows.append((i, off, dj, ci))
            off += ci * dj
        blocks[n] = rows
        dims[n] = off
    index = {n: {i: (o, r, c) for i, o, r, c in rows} for n, rows in blocks.items()}
    d = {}
    for n, rows in blocks.items():
        if not dims.get(n - 1):
            continue
        A = _zeros(dims[n - 1], dims[n])
        coef = F.neg(ctx.qpow(-n))
        for i, o, r, c in rows:
            sz = r * c
            # d ∘ f_i lands in component i of degree n-1
            if i in index[n - 1] and (i + n) in D.d:
                o2, r2, c2 = index[n - 1][i]
                blk = _kron(F, D.dmat(i + n), np.eye(c, dtype=np.int64))
                A[o2:o2 + r2 * c2, o:o + sz] = F.add(A[o2:o2 + r2 * c2, o:o + sz], blk)
            # f_i ∘ d lands in component i+1 of degree n-1
            if (i + 1) in index[n - 1] and (i + 1) in C.d:
                o2, r2, c2 = index[n - 1][i + 1]
                blk = _kron(F, np.eye(r, dtype=np.int64), C.dmat(i + 1).T.copy())
                blk = F.mul(blk, coef)
                A[o2:o2 + r2 * c2, o:o + sz] = F.add(A[o2:o2 + r2 * c2, o:o + sz], blk)
        d[n] = A
    H = NComplexFin(ctx, dims, d, check=False)
    H.blocks = blocks
    return H


def hom_vector_to_map(C: NComplexFin, D: NComplexFin, Hm: NComplexFin, n: int, v) -> Morphism:
    """Interpret a vector of ``Hom(C, D)_n`` as a graded map of degree ``n``."""
    v = np.asarray(v, dtype=np.int64)
    maps = {}
    for i, o, r, c in Hm.blocks.get(n, []):
        maps[i] = v[o:o + r * c].reshape(r, c)
    return Morphism(C, D, n, maps)


def map_to_hom_vector(f: Morphism, Hm: NComplexFin) -> np.ndarray:
    v = np.zeros(Hm.dim(f.degree), dtype=np.int64)
    for i, o, r, c in Hm.blocks.get(f.degree, []):
        v[o:o + r * c] = f.at(i).reshape(-1)
    return v


def ncx_morphism_space(C: NComplexFin, D: NComplexFin) -> tuple[NComplexFin, np.ndarray]:
    """Hom complex and a basis (columns) of the degree-0 cycles, i.e. the chain maps."""
    Hm = ncx_hom(C, D)
    n0 = Hm.dim(0)
    if n0 == 0:
        return Hm, _zeros(0, 0)
    if Hm.dim(-1):
        K = nullspace(C.field, Hm.dmat(0))
    else:
        K = np.eye(n0, dtype=np.int64)
    return Hm, K


# -- string decomposition -----------------------------------------------------

@dataclass
class StringItem:
    top: int
    length: int
    vectors: list[np.ndarray]


@dataclass
class StringDecomposition:
    strings: list[StringItem]

    def lengths(self) -> list[int]:
        return [s.length for s in self.strings]

    def length_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.strings:
            out[s.length] = out.get(s.length, 0) + 1
        return out

    def basis(self, C: NComplexFin) -> dict[int, np.ndarray]:
        """Per degree, the string vectors living there in string order."""
        cols: dict[int, list[np.ndarray]] = {l: [] for l in C.dims}
        for s in self.strings:
            for j, v in enumerate(s.vectors):
                cols[s.top - j].append(v)
        return {l: (np.stack(vs, axis=1) if vs else _zeros(C.dim(l), 0)) for l, vs in cols.items()}


def ncx_string_decompose(C: NComplexFin) -> StringDecomposition:
    """Split ``C`` into strings ``v, dv, ..., d^{L-1} v`` with ``d^L v = 0``.

    The tops of strings of length exactly ``L`` at degree ``t`` are chosen as a
    complement of ``ker d^{L-1} + d(ker d^{L+1})`` inside ``ker d^L``.
    """
    F = C.field
    N = C.N
    strings: list[StringItem] = []

    def kernel(t, j):
        """Columns spanning ker d^j inside C_t."""
        if j == 0:
            return _zeros(C.dim(t), 0)
        if C.dim(t - j) == 0:
            return np.eye(C.dim(t), dtype=np.int64)
        return nullspace(F, C.dpow(t, j))

    for L in range(N, 0, -1):
        for t in sorted(C.dims, reverse=True):
            KL = kernel(t, L)
            if KL.shape[1] == 0:
                continue
            parts = [kernel(t, L - 1)]
            if C.dim(t + 1):
                parts.append(F.matmul(C.dmat(t + 1), kernel(t + 1, L + 1)))
            base = np.hstack(parts)
            for idx in extend_basis(F, base, KL):
                v = KL[:, idx]
                vecs = [v]
                for j in range(1, L):
                    vecs.append(F.matmul(C.dmat(t - j + 1), vecs[-1][:, None])[:, 0])
                strings.append(StringItem(t, L, vecs))
    return StringDecomposition(strings)


def ncx_string_change_of_basis(C: NComplexFin, sd: StringDecomposition) -> dict[int, np.ndarray]:
    """Per-degree invertible matrices whose columns are the string vectors."""
    B = sd.basis(C)
    for l, M in B.items():
        if M.shape != (C.dim(l), C.dim(l)) or rank(C.field, M) != C.dim(l):
            raise AssertionError(f"string vectors do not form a basis at degree {l}")
    return B


# -- random generators ----------------------------------------------------------

def random_invertible(F: FieldSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        A = F.random(rng, (n, n))
        if rank(F, A) == n:
            return A


def random_ncomplex(ctx: QContext, rng: np.random.Generator, max_dim: int = 4, width: int = 6,
                    low: int = 0, conjugate: bool = True) -> NComplexFin:
    """Random complex: random strings in ``[low, low+width)``, then a random basis change."""
    N = ctx.N
    F = ctx.spec
    budget = {l: int(rng.integers(0, max_dim + 1)) for l in range(low, low + width)}
    pieces = []
    tops = list(range(low + width - 1, low - 1, -1))
    for _ in range(int(rng.integers(0, 3 * width))):
        top = int(rng.choice(tops))
        L = int(rng.integers(1, N + 1))
        L = min(L, top - low + 1)
        if all(budget.get(top - j, 0) > 0 for j in range(L)):
            for j in range(L):
                budget[top - j] -= 1
            pieces.append((top, L))
    dims: dict[int, int] = {}
    for top, L in pieces:
        for j in range(L):
            dims[top - j] = dims.get(top - j, 0) + 1
    # string form
    pos = {l: 0 for l in dims}
    idx = []
    for top, L in pieces:
        ids = []
        for j in range(L):
            ids.append(pos[top - j])
            pos[top - j] += 1
        idx.append(ids)
    d = {l: _zeros(dims.get(l - 1, 0), dims[l]) for l in dims if dims.get(l - 1)}
    for (top, L), ids in zip(pieces, idx):
        for j in range(L - 1):
            l = top - j
            d[l][ids[j + 1], ids[j]] = 1
    if conjugate:
        P = {l: random_invertible(F, rng, k) for l, k in dims.items()}
        Pinv = {l: inverse(F, A) for l, A in P.items()}
        d = {l: F.matmul(P[l - 1], F.matmul(A, Pinv[l])) for l, A in d.items()}
    return NComplexFin(ctx, dims, d)


def random_morphism(C: NComplexFin, D: NComplexFin, rng: np.random.Generator) -> Morphism:
    Hm, K = ncx_morphism_space(C, D)
    if K.shape[1] == 0:
        return ncx_zero_map(C, D)
    coeffs = C.field.random(rng, (K.shape[1],))
    v = C.field.matmul(K, coeffs[:, None])[:, 0]
    return hom_vector_to_map(C, D, Hm, 0, v)


def random_graded_map(C: NComplexFin, D: NComplexFin, degree: int, rng: np.random.Generator) -> Morphism:
    F = C.field
    return Morphism(C, D, degree, {l: F.random(rng, (D.dim(l + degree), k)) for l, k in C.dims.items()})
