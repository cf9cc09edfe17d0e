"""p-DG modules over A = k[x_1..x_n].

A module is free on generators ``v_1..v_l`` of degrees ``c_i`` with
``d(v_j) = Σ_i D_ij v_i``.  Variables have degree -1 on the module side, so
an entry ``D_ij`` is a homogeneous polynomial of standard degree
``c_i + 1 - c_j``.  The degree-``l`` layer ``M_l`` has the monomial basis
``x^e v_g`` with ``|e| = c_g - l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .field import FieldSpec, field_make
from .groupchain import GComplex, flatten_matrix, kg_basis, y_action
from .linalg import Subquotient, colspace, extend_basis, nullspace, rank, solve
from .ncomplex import (NComplexFin, _class_map, ncx_homology, ncx_homology_all,
                       ncx_string_decompose)
from .poly import Exp, PolyMatrix, _add_exp, monomials, polymatrix_inverse
from .qcombinat import QContext, default_context


class PDGModule:
    def __init__(self, p: int, n: int, field: FieldSpec, c: Sequence[int], D: PolyMatrix | None = None,
                 secondary: Sequence[int] | None = None, N: int | None = None, check: bool = True):
        if field.p != p:
            raise ValueError(f"field characteristic {field.p} differs from p={p}")
        self.p = p
        self.n = n
        self.field = field
        self.N = p if N is None else N
        self.c = [int(x) for x in c]
        ell = len(self.c)
        if D is None:
            D = PolyMatrix.zeros(field, n, (ell, ell))
        if D.shape != (ell, ell) or D.n != n:
            raise ValueError(f"D must be a {ell}x{ell} matrix in {n} variables")
        self.D = PolyMatrix(field, n, D.shape, D.coeffs) if D.trunc is not None else D
        self.secondary = None if secondary is None else [int(x) for x in secondary]
        if self.secondary is not None and len(self.secondary) != ell:
            raise ValueError("secondary grading has the wrong length")
        self._pow: dict[int, PolyMatrix] = {}
        self._layers: dict[int, tuple[list, dict]] = {}
        if check:
            bad = pdg_first_failure(self)
            if bad is not None:
                raise ValueError(bad)

    @property
    def ell(self) -> int:
        return len(self.c)

    def dpow(self, k: int) -> PolyMatrix:
        if k not in self._pow:
            self._pow[k] = self.D.power(k)
        return self._pow[k]

    def gens(self, l: int) -> list[int]:
        return [g for g, cg in enumerate(self.c) if cg == l]

    def layer(self, l: int) -> tuple[list[tuple[int, Exp]], dict]:
        """Monomial basis of ``M_l`` and its index map."""
        if l not in self._layers:
            basis = [(g, e) for g, cg in enumerate(self.c) for e in monomials(self.n, cg - l)]
            self._layers[l] = (basis, {b: i for i, b in enumerate(basis)})
        return self._layers[l]

    def __repr__(self) -> str:
        return f"PDGModule(p={self.p}, n={self.n}, ell={self.ell}, c={self.c})"


def _degree_failure(field, n, c, D) -> str | None:
    for e, A in D.coeffs.items():
        deg = sum(e)
        for i, j in zip(*np.nonzero(A)):
            if deg != c[i] + 1 - c[j]:
                return (f"entry ({i}, {j}) has a term of degree {deg}, "
                        f"expected {c[i] + 1 - c[j]}")
    return None


def pdg_first_failure(M: PDGModule) -> str | None:
    bad = _degree_failure(M.field, M.n, M.c, M.D)
    if bad is not None:
        return bad
    P = M.dpow(M.N)
    if not P.is_zero():
        i, j = min(P.nonzero_positions())
        return f"D^{M.N} is nonzero, witness entry ({i}, {j}) = {P.entry(i, j)!r}"
    return None


def pdg_validate(M: PDGModule) -> bool:
    return pdg_first_failure(M) is None


def pdg_zero(p: int, n: int, field: FieldSpec | None = None) -> PDGModule:
    return PDGModule(p, n, field or field_make(p), [])


def pdg_permute(M: PDGModule, order: Sequence[int]) -> PDGModule:
    """Reorder generators: new generator ``k`` is old generator ``order[k]``."""
    order = list(order)
    sec = None if M.secondary is None else [M.secondary[g] for g in order]
    return PDGModule(M.p, M.n, M.field, [M.c[g] for g in order], M.D.submatrix(order, order),
                     sec, M.N, check=False)


def _hstack(F, n, ell, cols: list[PolyMatrix]) -> PolyMatrix:
    if not cols:
        return PolyMatrix.zeros(F, n, (ell, 0))
    return PolyMatrix.block([cols])


def _unit(F, n, ell, g) -> PolyMatrix:
    v = np.zeros((ell, 1), dtype=np.int64)
    v[g, 0] = 1
    return PolyMatrix.constant(F, n, v)


# -- Koszul complexes -------------------------------------------------------------

class FreeAComplex:
    """Homologically graded free A-modules with d of degree -1 and d^N = 0.

    ``gens[i]`` lists the internal degrees of the generators in homological
    degree ``i`` and ``d[i]`` is the matrix of ``d: K_i -> K_{i-1}``.
    """

    def __init__(self, field: FieldSpec, n: int, N: int, gens: dict[int, list[int]],
                 d: dict[int, PolyMatrix], labels: dict[int, list] | None = None,
                 variables: Sequence[int] | None = None, ctx: QContext | None = None,
                 check: bool = True):
        self.field = field
        self.n = n
        self.N = N
        self.gens = {int(i): list(v) for i, v in gens.items() if v}
        self.d = dict(d)
        self.labels = labels
        self.variables = None if variables is None else list(variables)
        self.ctx = ctx
        if check:
            for i in self.gens:
                comp = None
                for k in range(N):
                    if i - k - 1 not in self.gens:
                        comp = None
                        break
                    step = self.dmat(i - k)
                    comp = step if comp is None else step @ comp
                if comp is not None and not comp.is_zero():
                    raise ValueError(f"d^{N} is nonzero starting in homological degree {i}")

    def rank(self, i: int) -> int:
        return len(self.gens.get(i, []))

    def degrees(self) -> list[int]:
        return sorted(self.gens)

    def dmat(self, i: int) -> PolyMatrix:
        if i in self.d:
            return self.d[i]
        return PolyMatrix.zeros(self.field, self.n, (self.rank(i - 1), self.rank(i)))

    def order(self) -> list[tuple[int, int]]:
        """(homological degree, position) of the generators of ``to_pdg``."""
        return [(i, k) for i in sorted(self.gens, reverse=True) for k in range(self.rank(i))]

    def to_pdg(self) -> PDGModule:
        """One module with all homological degrees, graded secondarily by them."""
        order = self.order()
        pos = {gk: idx for idx, gk in enumerate(order)}
        ell = len(order)
        coeffs: dict[Exp, np.ndarray] = {}
        for i, A in self.d.items():
            for e, B in A.coeffs.items():
                out = coeffs.setdefault(e, np.zeros((ell, ell), dtype=np.int64))
                for r, s in zip(*np.nonzero(B)):
                    out[pos[(i - 1, r)], pos[(i, s)]] = B[r, s]
        D = PolyMatrix(self.field, self.n, (ell, ell), coeffs)
        c = [self.gens[i][k] for i, k in order]
        sec = [i for i, _ in order]
        return PDGModule(self.field.p, self.n, self.field, c, D, sec, N=self.N, check=False)

    def __repr__(self) -> str:
        r = ", ".join(f"{i}:{self.rank(i)}" for i in sorted(self.gens, reverse=True))
        return f"FreeAComplex(N={self.N}, ranks={{{r}}})"


def pdg_koszul(N: int, variables: Sequence[int] | None, p: int, n: int,
               field: FieldSpec | None = None) -> FreeAComplex:
    """Tensor product of the strips ``A -x_t-> A -x_t-> ... -> A`` (N copies).

    Basis elements are multi-indices ``j`` (one entry per chosen variable),
    listed per homological degree ``|j|`` in descending lex order.
    """
    field = field or field_make(p)
    ctx = default_context(p, N, field.m)
    variables = list(range(n)) if variables is None else sorted(int(t) for t in variables)
    if any(not 0 <= t < n for t in variables):
        raise ValueError("variable index out of range")
    r = len(variables)
    top = (N - 1) * r
    labels: dict[int, list] = {i: [] for i in range(top + 1)}
    for j in sorted(np.ndindex(*([N] * r)), reverse=True):
        labels[sum(j)].append(tuple(j))
    gens = {i: [0] * len(v) for i, v in labels.items()}
    d = {}
    for i in range(1, top + 1):
        index = {j: k for k, j in enumerate(labels[i - 1])}
        coeffs: dict[Exp, np.ndarray] = {}
        for col, j in enumerate(labels[i]):
            prefix = 0
            for pos, t in enumerate(variables):
                if j[pos]:
                    tgt = j[:pos] + (j[pos] - 1,) + j[pos + 1:]
                    e = tuple(1 if u == t else 0 for u in range(n))
                    A = coeffs.setdefault(e, np.zeros((len(labels[i - 1]), len(labels[i])), dtype=np.int64))
                    A[index[tgt], col] = ctx.qpow(-prefix)
                prefix += j[pos]
        d[i] = PolyMatrix(field, n, (len(labels[i - 1]), len(labels[i])), coeffs)
    return FreeAComplex(field, n, N, gens, d, labels, variables, ctx)


@dataclass
class HomotopyWitness:
    variable: int
    h: dict[int, PolyMatrix]
    total: PolyMatrix
    verified: bool


def pdg_nullhomotopy_xp(K: FreeAComplex, i: int) -> HomotopyWitness:
    """Homotopy from multiplication by ``x_i^{N-1}`` to zero on a Koszul complex."""
    if K.labels is None or K.variables is None:
        raise ValueError("unsupported: not a Koszul complex")
    if i not in K.variables:
        raise ValueError(f"x_{i + 1} is not a variable of this Koszul complex")
    N = K.N
    pos = K.variables.index(i)
    h: dict[int, PolyMatrix] = {}
    for deg, labs in K.labels.items():
        tgt_labs = K.labels.get(deg + N - 1, [])
        index = {j: k for k, j in enumerate(tgt_labs)}
        A = np.zeros((len(tgt_labs), len(labs)), dtype=np.int64)
        for col, j in enumerate(labs):
            if j[pos] == 0:
                tgt = j[:pos] + (N - 1,) + j[pos + 1:]
                A[index[tgt], col] = K.ctx.qpow(-sum(j[:pos]))
        if A.any():
            h[deg] = PolyMatrix.constant(K.field, K.n, A)
    M = K.to_pdg()
    order = K.order()
    place = {gk: idx for idx, gk in enumerate(order)}
    ell = len(order)
    H = np.zeros((ell, ell), dtype=np.int64)
    for deg, A in h.items():
        B = A.const()
        for r, s in zip(*np.nonzero(B)):
            H[place[(deg + N - 1, r)], place[(deg, s)]] = B[r, s]
    Ht = PolyMatrix.constant(K.field, K.n, H)
    acc = PolyMatrix.zeros(K.field, K.n, (ell, ell))
    for k in range(N):
        acc = acc + M.dpow(N - 1 - k) @ Ht @ M.dpow(k)
    e = tuple(N - 1 if u == i else 0 for u in range(K.n))
    target = PolyMatrix.identity(K.field, K.n, ell).mul_monomial(e)
    return HomotopyWitness(i, h, Ht, acc == target)


# -- beta --------------------------------------------------------------------------

def pdg_beta(C: GComplex, secondary: Sequence[int] | None = None) -> PDGModule:
    """β(C) = C ⊗_k A with d(c ⊗ f) = dc ⊗ f + Σ_t y_t c ⊗ x_t f.

    Generators are the flattened k-basis of C, by degree descending.
    """
    if C.N != C.p and C.d:
        raise ValueError("β expects a p-complex over k[G]")
    F, p, n = C.field, C.p, C.n
    size = p**n
    degs = sorted(C.ranks, reverse=True)
    offset, c = {}, []
    for l in degs:
        offset[l] = len(c)
        c.extend([l] * (C.rank(l) * size))
    ell = len(c)
    const = np.zeros((ell, ell), dtype=np.int64)
    lin = [np.zeros((ell, ell), dtype=np.int64) for _ in range(n)]
    for l in degs:
        a, w = offset[l], C.rank(l) * size
        if C.rank(l - 1):
            b = offset[l - 1]
            const[b:b + C.rank(l - 1) * size, a:a + w] = flatten_matrix(C.dmat(l), p)
        for t in range(n):
            lin[t][a:a + w, a:a + w] = y_action(p, n, t, C.rank(l))
    coeffs = {(0,) * n: const}
    for t in range(n):
        coeffs[tuple(1 if u == t else 0 for u in range(n))] = lin[t]
    D = PolyMatrix(F, n, (ell, ell), coeffs)
    M = PDGModule(p, n, F, c, D, secondary, check=False)
    bad = pdg_first_failure(M)
    if bad is not None:
        raise ValueError(f"β(C) is not a p-DG module: {bad}")
    return M


def kg_koszul_grading(p: int, n: int) -> list[int]:
    """Secondary grading of β(k[G]) matching the Koszul homological degree."""
    return [sum(p - 1 - x for x in a) for a in kg_basis(p, n)]


def koszul_beta_order(p: int, n: int) -> list[int]:
    """Generator order putting β(k[G]) into the basis of ``pdg_koszul(p, all)``."""
    K = pdg_koszul(p, None, p, n)
    from .groupchain import kg_index
    return [kg_index([p - 1 - x for x in K.labels[i][k]], p) for i, k in K.order()]


# -- fibers --------------------------------------------------------------------------

def pdg_fiber(M: PDGModule, point: Sequence[int] | None = None, field: FieldSpec | None = None):
    """``D(x)``; at the origin a graded N-complex grouped by generator degree."""
    if point is not None and len(point) != M.n:
        raise ValueError(f"point has {len(point)} coordinates, expected {M.n}")
    if point is not None and any(int(x) for x in point):
        return M.D.evaluate(point, field or M.field)
    D0 = M.D.const()
    dims = {}
    for cg in M.c:
        dims[cg] = dims.get(cg, 0) + 1
    d = {}
    for l in dims:
        if l - 1 in dims:
            d[l] = D0[np.ix_(M.gens(l - 1), M.gens(l))]
    ctx = default_context(M.p, M.N, M.field.m)
    return NComplexFin(ctx, dims, d, check=False)


def _embed(M: PDGModule, l: int, v) -> np.ndarray:
    """Fiber vector in degree ``l`` as a generator-coordinate vector."""
    out = np.zeros(M.ell, dtype=np.int64)
    out[M.gens(l)] = np.asarray(v, dtype=np.int64)
    return out


# -- layer homology --------------------------------------------------------------------

def layer_matrix(M: PDGModule, P: PolyMatrix, k: int, l: int) -> np.ndarray:
    """Matrix of the degree ``-k`` map ``P: M_l -> M_{l-k}`` on monomial bases."""
    src, _ = M.layer(l)
    tgt, index = M.layer(l - k)
    out = np.zeros((len(tgt), len(src)), dtype=np.int64)
    if not src or not tgt:
        return out
    F = M.field
    for ep, A in P.coeffs.items():
        for col, (g, e) in enumerate(src):
            rows = np.nonzero(A[:, g])[0]
            if rows.size == 0:
                continue
            e2 = _add_exp(e, ep)
            for i in rows:
                r = index.get((int(i), e2))
                if r is None:
                    raise ValueError("matrix is not homogeneous of the expected degree")
                out[r, col] = F.add(int(out[r, col]), int(A[i, g]))
    return out


def _layer_homology(M: PDGModule, s: int, l: int, select=None) -> Subquotient:
    F = M.field
    N = M.N
    basis, _ = M.layer(l)
    keep = list(range(len(basis))) if select is None else [k for k, b in enumerate(basis) if select(b)]
    Ds = layer_matrix(M, M.dpow(s), s, l)
    A = Ds[:, keep]
    K = nullspace(F, A) if A.shape[0] else np.eye(len(keep), dtype=np.int64)
    I = layer_matrix(M, M.dpow(N - s), N - s, l + N - s)[keep, :]
    return Subquotient(F, K, I)


@dataclass
class GradedHomologyReport:
    s: int
    dims: dict[int, int]
    cutoff: int
    certified: bool
    by_secondary: dict[int, int] | None = None
    bigraded: dict[tuple[int, int], int] | None = None
    subq: dict = field(default_factory=dict, repr=False)

    def total(self) -> int:
        return sum(self.dims.values())


def _check_bihomogeneous(M: PDGModule):
    sec = M.secondary
    for A in M.D.coeffs.values():
        for i, j in zip(*np.nonzero(A)):
            if sec[i] != sec[j] - 1:
                raise ValueError("D does not lower the secondary grading by one")


def pdg_homology(M: PDGModule, s: int, cutoff: int | None = None, secondary: bool = False
                 ) -> GradedHomologyReport:
    """``_sH_l(M)`` for ``l`` from ``cutoff`` up to ``max c``.

    The report is certified when the lowest ``n(N-1)`` layers vanish and every
    ``x_j^{N-1}`` sends each computed class to a boundary.
    """
    N = M.N
    if not 1 <= s <= N - 1:
        raise ValueError(f"s must lie in [1, {N - 1}], got {s}")
    if not M.c:
        return GradedHomologyReport(s, {}, 0 if cutoff is None else cutoff, True,
                                    {} if secondary else None, {} if secondary else None)
    lo, hi = min(M.c), max(M.c)
    window = M.n * (N - 1)
    if cutoff is None:
        cutoff = lo - 2 * window - 1
    if cutoff > lo:
        raise ValueError(f"cutoff {cutoff} lies above the lowest generator degree {lo}")
    if secondary:
        if M.secondary is None:
            raise ValueError("module carries no secondary grading")
        _check_bihomogeneous(M)
    dims, subq, big = {}, {}, {}
    for l in range(cutoff, hi + 1):
        if secondary:
            for i in sorted(set(M.secondary)):
                sq = _layer_homology(M, s, l, lambda b, i=i: M.secondary[b[0]] == i)
                if sq.dim:
                    big[(l, i)] = sq.dim
                    dims[l] = dims.get(l, 0) + sq.dim
        else:
            sq = _layer_homology(M, s, l)
            subq[l] = sq
            if sq.dim:
                dims[l] = sq.dim
    certified = all(dims.get(l, 0) == 0 for l in range(cutoff, cutoff + window))
    if certified:
        certified = _annihilated(M, s, dims, subq)
    by_sec = None
    if secondary:
        by_sec = {}
        for (_, i), k in big.items():
            by_sec[i] = by_sec.get(i, 0) + k
    return GradedHomologyReport(s, dims, cutoff, certified, by_sec, big if secondary else None, subq)


def _annihilated(M: PDGModule, s: int, dims: dict, subq: dict) -> bool:
    F, N = M.field, M.N
    for l in dims:
        sq = subq.get(l) or _layer_homology(M, s, l)
        src, _ = M.layer(l)
        tgt_sq = _layer_homology(M, s, l - (N - 1))
        _, tgt_index = M.layer(l - (N - 1))
        for t in range(M.n):
            shift = tuple(N - 1 if u == t else 0 for u in range(M.n))
            X = np.zeros((len(tgt_index), len(src)), dtype=np.int64)
            for col, (g, e) in enumerate(src):
                X[tgt_index[(g, _add_exp(e, shift))], col] = 1
            img = F.matmul(X, sq.reps)
            for k in range(img.shape[1]):
                if not tgt_sq.is_boundary(img[:, k]):
                    return False
    return True


def pdg_homology_acomplex(K: FreeAComplex, s: int, cutoff: int | None = None) -> list[int]:
    """Total dimension of ``_sH`` in each homological degree ``0..max``."""
    top = max(K.gens, default=-1)
    if top < 0:
        return []
    rep = pdg_homology(K.to_pdg(), s, cutoff, secondary=True)
    return [rep.by_secondary.get(i, 0) for i in range(top + 1)]


# -- cones -------------------------------------------------------------------------------

@dataclass
class PDGMorphism:
    src: PDGModule
    tgt: PDGModule
    F: PolyMatrix

    def failure(self) -> str | None:
        M, N = self.src, self.tgt
        if self.F.shape != (N.ell, M.ell):
            return f"map has shape {self.F.shape}, expected {(N.ell, M.ell)}"
        for e, A in self.F.coeffs.items():
            for i, j in zip(*np.nonzero(A)):
                if sum(e) != N.c[i] - M.c[j]:
                    return f"entry ({i}, {j}) is not of degree {N.c[i] - M.c[j]}"
        if not (N.D @ self.F) == (self.F @ M.D):
            return "map does not commute with the differentials"
        return None


def pdg_cone(f: PDGMorphism) -> PDGModule:
    """``M[p-1] ⊕ ... ⊕ M[1] ⊕ N`` with identities below the diagonal and f last."""
    bad = f.failure()
    if bad is not None:
        raise ValueError(bad)
    M, N = f.src, f.tgt
    p = M.p
    F, n, a, b = M.field, M.n, M.ell, N.ell
    k = p - 1
    rows = []
    for r in range(k + 1):
        row = []
        for col in range(k + 1):
            h = a if r < k else b
            w = a if col < k else b
            if r == col:
                blk = M.D if r < k else N.D
            elif r < k and col == r - 1:
                blk = PolyMatrix.identity(F, n, a)
            elif r == k and col == k - 1:
                blk = f.F
            else:
                blk = PolyMatrix.zeros(F, n, (h, w))
            row.append(blk)
        rows.append(row)
    D = PolyMatrix.block(rows)
    c = [cg + k - t for t in range(k) for cg in M.c] + list(N.c)
    out = PDGModule(p, n, F, c, D, check=False)
    bad = pdg_first_failure(out)
    if bad is not None:
        raise ValueError(f"cone is not a p-DG module: {bad}")
    return out


# -- minimal models ----------------------------------------------------------------------

def _lift_strings(M: PDGModule, strings) -> tuple[list[PolyMatrix], list[int]]:
    F, n = M.field, M.n
    cols, degs = [], []
    for st in strings:
        v = PolyMatrix.constant(F, n, _embed(M, st.top, st.vectors[0])[:, None])
        for j in range(st.length):
            cols.append(v)
            degs.append(st.top - j)
            v = M.D @ v
    return cols, degs


def _conjugate(M: PDGModule, P: PolyMatrix) -> PolyMatrix:
    return polymatrix_inverse(P) @ M.D @ P


def pdg_minimal_model(M: PDGModule, return_basis: bool = False):
    """Quotient of M by the span of its lifted full-length strings."""
    p = M.p
    if M.ell == 0:
        return (M, PolyMatrix.zeros(M.field, M.n, (0, 0))) if return_basis else M
    X = pdg_fiber(M)
    sd = ncx_string_decompose(X)
    full = [st for st in sd.strings if st.length == p]
    rest = [st for st in sd.strings if st.length < p]
    cf, df = _lift_strings(M, full)
    cr, dr = _lift_strings(M, rest)
    P = _hstack(M.field, M.n, M.ell, cf + cr)
    D2 = _conjugate(M, P)
    k = len(cf)
    idx = list(range(k, M.ell))
    if not D2.submatrix(idx, list(range(k))).is_zero():
        raise AssertionError("lifted full strings do not span a submodule")
    out = PDGModule(p, M.n, M.field, dr, D2.submatrix(idx, idx), check=False)
    if return_basis:
        return out, P
    return out


# -- the d1 operator -----------------------------------------------------------------------

def pdg_d1(M: PDGModule, s: int, l: int) -> list[np.ndarray]:
    """Components along ``x_1..x_n`` of ``[m] -> [d^s m]`` into ``I/I^2``.

    Source ``_sH_l`` and target ``_{p-s}H_{l-s+1}`` of the 0-fiber, in the
    quotient bases chosen by ``ncx_homology``.
    """
    p = M.N
    if not 1 <= s <= p - 1:
        raise ValueError(f"s must lie in [1, {p - 1}], got {s}")
    X = pdg_fiber(M)
    F = M.field
    src = ncx_homology(X, s).subq.get(l)
    tgt = ncx_homology(X, p - s).subq.get(l - s + 1)
    sd = src.dim if src else 0
    td = tgt.dim if tgt else 0
    if sd == 0 or td == 0:
        return [np.zeros((td, sd), dtype=np.int64) for _ in range(M.n)]
    Ds = M.dpow(s)
    rows, cols = M.gens(l - s + 1), M.gens(l)
    out = []
    for t in range(M.n):
        L = Ds.linear(t)[np.ix_(rows, cols)]
        out.append(tgt.coords(F.matmul(L, src.reps)))
    return out


# -- composition series ----------------------------------------------------------------------

@dataclass
class CompositionPiece:
    kind: str  # "A" for copies of A, "chain" for A v + ... + A d^{p-2} v
    degree: int
    s: int
    count: int
    columns: list[int]


@dataclass
class CompositionSeries:
    module: PDGModule
    pieces: list[CompositionPiece]
    basis: PolyMatrix  # columns: final generators in terms of the minimal model
    minimal: PDGModule

    @property
    def length(self) -> int:
        return len(self.pieces)

    @property
    def refined_length(self) -> int:
        """Length after splitting every step into one summand per class."""
        return sum(pc.count for pc in self.pieces)


def _fiber_action(M: PDGModule, X: NComplexFin, H, s: int, L: int) -> list[np.ndarray]:
    """k[G]-action on ``_sH_L`` of the 0-fiber, read off from d1."""
    p, F = M.p, M.field
    d1 = pdg_d1(M, s, L)
    if s == 1 and L % p == p - 1:
        chain = _class_map(X, H, 1, L, p - 1, 0)
        scale = 1
    else:
        chain = _class_map(X, H, p - 1, L, 1, p - 2)
        scale = int(F.inv(p - 1))
    if chain.shape[0] != chain.shape[1] or rank(F, chain) != chain.shape[0]:
        raise ValueError("Assumption violated: homology chain map is not an isomorphism")
    Cinv = solve(F, chain, np.eye(chain.shape[0], dtype=np.int64))
    return [F.mul(F.matmul(Cinv, Y), scale) for Y in d1]


def _socle_layer(F: FieldSpec, dim: int, acts: list[np.ndarray]) -> np.ndarray:
    """Basis of J^{λ-1} for the Loewy length λ of the module."""
    cur = np.eye(dim, dtype=np.int64)
    while True:
        imgs = [F.matmul(Y, cur) for Y in acts]
        nxt = colspace(F, np.hstack(imgs)) if imgs and cur.shape[1] else np.zeros((dim, 0), dtype=np.int64)
        if nxt.shape[1] == 0:
            return cur
        cur = nxt


def _lift_cycle(M: PDGModule, X: NComplexFin, s: int, L: int, z: np.ndarray) -> np.ndarray:
    """A genuine d^s-cycle in ``M_L`` whose constant part represents ``z``."""
    F, p = M.field, M.p
    basis, index = M.layer(L)
    Ds = layer_matrix(M, M.dpow(s), s, L)
    gl = M.gens(L)
    const_rows = [index[(g, (0,) * M.n)] for g in gl]
    up = L + p - s
    B = X.dpow(up, p - s) if X.dim(up) else np.zeros((len(gl), 0), dtype=np.int64)
    nu, nw = len(basis), B.shape[1]
    top = np.hstack([Ds, np.zeros((Ds.shape[0], nw), dtype=np.int64)])
    sel = np.zeros((len(gl), nu), dtype=np.int64)
    sel[np.arange(len(gl)), const_rows] = 1
    bottom = np.hstack([sel, F.neg(B)])
    A = np.vstack([top, bottom])
    rhs = np.concatenate([np.zeros(Ds.shape[0], dtype=np.int64), z])
    x = solve(F, A, rhs)
    if x is None:
        raise ValueError("Assumption violated: class does not lift to a cycle")
    return x[:nu]


def _layer_vector_to_poly(M: PDGModule, L: int, u: np.ndarray) -> PolyMatrix:
    basis, _ = M.layer(L)
    coeffs: dict[Exp, np.ndarray] = {}
    for k in np.nonzero(u)[0]:
        g, e = basis[k]
        v = coeffs.setdefault(e, np.zeros((M.ell, 1), dtype=np.int64))
        v[g, 0] = u[k]
    return PolyMatrix(M.field, M.n, (M.ell, 1), coeffs)


def _split_step(M: PDGModule):
    """Split off the socle layer of the top fiber homology of M."""
    F, p = M.field, M.p
    X = pdg_fiber(M)
    H = ncx_homology_all(X)
    L = max((l for h in H.values() for l in h.dims), default=None)
    if L is None:
        return None
    if L % p == p - 1:
        s = 1
    elif L % p == p - 2:
        s = p - 1
    else:
        raise ValueError(f"Assumption violated: top homology degree {L} has residue {L % p} mod {p}")
    sq = H[s].subq[L]
    acts = _fiber_action(M, X, H, s, L)
    soc = _socle_layer(F, sq.dim, acts)
    zs = F.matmul(sq.reps, soc)
    cols, degs = [], []
    for k in range(zs.shape[1]):
        u = _layer_vector_to_poly(M, L, _lift_cycle(M, X, s, L, zs[:, k]))
        if s == 1 or p == 2:
            cols.append(u)
            degs.append(L)
        else:
            chain = [u]
            for _ in range(p - 2):
                chain.append(M.D @ chain[-1])
            cols.extend(reversed(chain))
            degs.extend(L - j for j in range(p - 2, -1, -1))
    kind = "A" if (s == 1 or p == 2) else "chain"
    sub = _hstack(F, M.n, M.ell, cols)
    S0 = sub.const()
    if rank(F, S0) != S0.shape[1]:
        raise ValueError("Assumption violated: lifted classes are dependent at the fiber")
    comp = extend_basis(F, S0, np.eye(M.ell, dtype=np.int64))
    P = _hstack(F, M.n, M.ell, cols + [_unit(F, M.n, M.ell, g) for g in comp])
    D2 = _conjugate(M, P)
    r = len(cols)
    rest = list(range(r, M.ell))
    if not D2.submatrix(rest, list(range(r))).is_zero():
        raise AssertionError("lifted cycles do not span a submodule")
    c2 = degs + [M.c[g] for g in comp]
    piece = CompositionPiece(kind, L, s, zs.shape[1], [])
    return piece, P, D2, c2, r


def strictly_upper(D: PolyMatrix) -> bool:
    return all(i < j for i, j in D.nonzero_positions())


def pdg_composition_series(M: PDGModule, minimize: bool = True) -> CompositionSeries:
    """Composition series with quotients A[k] or A v + ... + A d^{p-2} v.

    Expects a module of β∘ι type; returns the generator order in which D is
    strictly upper triangular.
    """
    F, p, n = M.field, M.p, M.n
    base = pdg_minimal_model(M) if minimize else M
    ell = base.ell
    D = base.D
    c = list(base.c)
    Q = PolyMatrix.identity(F, n, ell)
    pieces: list[CompositionPiece] = []
    done = 0
    while done < ell:
        idx = list(range(done, ell))
        cur = PDGModule(p, n, F, [c[i] for i in idx], D.submatrix(idx, idx), check=False)
        step = _split_step(cur)
        if step is None:
            raise AssertionError("acyclic remainder with nonzero generators; input was not minimal")
        piece, P, D2, c2, r = step
        # extend the change of basis by the identity on the finished part
        full = PolyMatrix.block([[PolyMatrix.identity(F, n, done), PolyMatrix.zeros(F, n, (done, ell - done))],
                                 [PolyMatrix.zeros(F, n, (ell - done, done)), P]]) if done else P
        D = polymatrix_inverse(full) @ D @ full
        Q = Q @ full
        c = c[:done] + c2
        piece.columns = list(range(done, done + r))
        pieces.append(piece)
        done += r
    final = PDGModule(p, n, F, c, D, check=False)
    if not strictly_upper(D):
        raise AssertionError("composition series basis is not strictly upper triangular")
    return CompositionSeries(final, pieces, Q, base)
