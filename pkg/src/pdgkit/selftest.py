"""Seeded property checks, one suite per module.

Each ``check_*`` function examines one random instance and returns a list of
failure messages (empty on success).  ``run`` drives whole suites.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import certify, groupchain as gcm, ncomplex as ncx, pdg
from .field import field_make
from .linalg import rank
from .poly import MultiPoly
from .qcombinat import (QContext, default_context, q_binomial, q_binomial_factorial,
                        verify_q_identity)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden.json")


# -- exactfield ---------------------------------------------------------------------

def check_frobenius(rng, p: int, m: int, samples: int = 1000) -> list[str]:
    F = field_make(p, m)
    a = F.random(rng, (samples,))
    b = F.power(a, F.order)
    bad = np.nonzero(a != b)[0]
    return [f"a^(p^m) != a for a={int(a[bad[0]])} in F_{F.order}"] if bad.size else []


def _random_poly(F, n, rng, terms=3, degree=3):
    out = {}
    for _ in range(terms):
        e = tuple(int(x) for x in rng.integers(0, degree + 1, n))
        out[e] = int(F.random(rng))
    return MultiPoly(F, n, out)


def check_poly_ring(rng, p: int, m: int, n: int = 2) -> list[str]:
    F = field_make(p, m)
    f, g, h = (_random_poly(F, n, rng) for _ in range(3))
    errs = []
    if (f * g) * h != f * (g * h):
        errs.append("polynomial multiplication is not associative")
    if f * (g + h) != f * g + f * h:
        errs.append("polynomial multiplication does not distribute")
    if f * g != g * f:
        errs.append("polynomial multiplication is not commutative")
    x = [int(v) for v in F.random(rng, (n,))]
    if (f * g).eval(x) != f.eval(x) * g.eval(x) or (f + g).eval(x) != f.eval(x) + g.eval(x):
        errs.append("evaluation is not a ring homomorphism")
    return errs


# -- qcombinat ------------------------------------------------------------------------

def q_contexts() -> list[QContext]:
    out = [default_context(N, N) for N in (2, 3, 5, 7)]
    out.append(QContext(field_make(5), 2, 4))
    out.append(default_context(3, 2))
    return out


def check_q_context(ctx: QContext) -> list[str]:
    errs = []
    N = ctx.N
    for m in range(N + 1):
        for s in range(m):
            for t in range(s, m):
                if not verify_q_identity(s, t, m, ctx):
                    errs.append(f"identity fails at s={s}, t={t}, m={m} for {ctx!r}")
    for n in range(N + 1):
        for k in range(n + 1):
            if q_binomial(n, k, ctx) != q_binomial_factorial(n, k, ctx):
                errs.append(f"recurrence and factorial formula differ at ({n}, {k}) for {ctx!r}")
    for k in range(1, N):
        if ctx.binom(N, k) != 0:
            errs.append(f"binom(N, {k}) is nonzero for {ctx!r}")
    return errs


# -- ncomplex ---------------------------------------------------------------------------

def check_acyclicity(ctx, rng) -> list[str]:
    C = ncx.random_ncomplex(ctx, rng)
    one = ncx.ncx_homology(C, 1).total() == 0
    every = all(ncx.ncx_homology(C, s).total() == 0 for s in range(1, ctx.N))
    return [] if one == every else [f"acyclicity criterion fails on {C!r}"]


def homotopic_pair(ctx, rng, max_dim=3, width=4):
    """(f, g, h) between random complexes with f - g the homotopy sum of h."""
    C = ncx.random_ncomplex(ctx, rng, max_dim, width)
    Cp = ncx.random_ncomplex(ctx, rng, max_dim, width)
    h = ncx.random_graded_map(C, Cp, ctx.N - 1, rng)
    g = ncx.random_morphism(C, Cp, rng)
    f = g + ncx.homotopy_sum(h)
    return f, g, h


def check_tensor_homotopy(ctx, rng) -> list[str]:
    f, g, h = homotopic_pair(ctx, rng)
    D = ncx.random_ncomplex(ctx, rng, 2, 3)
    errs = []
    T1, T2 = ncx.ncx_tensor(f.src, D), ncx.ncx_tensor(f.tgt, D)
    left = [ncx.ncx_tensor_maps(T1, T2, m, None) for m in (f, g, h)]
    if not ncx.ncx_verify_homotopy(*left):
        errs.append("h ⊗ D is not a homotopy")
    S1, S2 = ncx.ncx_tensor(D, f.src), ncx.ncx_tensor(D, f.tgt)
    fr = ncx.ncx_tensor_maps(S1, S2, None, f)
    gr = ncx.ncx_tensor_maps(S1, S2, None, g)
    hr = ncx.ncx_tensor_maps(S1, S2, None, h, lambda a, b: ctx.qpow(-a))
    if not ncx.ncx_verify_homotopy(fr, gr, hr):
        errs.append("the twisted right homotopy fails")
    return errs


def check_hexagon(ctx, rng) -> list[str]:
    rep = ncx.ncx_hexagon_check(ncx.random_ncomplex(ctx, rng))
    return rep.failures[:1]


def random_split_ses(ctx, rng):
    """Inclusion and projection for ``A -> P(A ⊕ C) -> C`` with a random basis change P."""
    F = ctx.spec
    A = ncx.random_ncomplex(ctx, rng, 2, 4)
    C = ncx.random_ncomplex(ctx, rng, 2, 4)
    B0 = ncx.ncx_direct_sum(A, C)
    degs = B0.degrees()
    P = {l: ncx.random_invertible(F, rng, B0.dim(l)) for l in degs}
    Pinv = {l: ncx.inverse(F, M) for l, M in P.items()}
    d = {l: F.matmul(P[l - 1], F.matmul(B0.dmat(l), Pinv[l])) for l in degs if B0.dim(l - 1)}
    B = ncx.NComplexFin(ctx, B0.dims, d)
    inc, pr = {}, {}
    for l in degs:
        a, c = A.dim(l), C.dim(l)
        inc[l] = F.matmul(P[l], np.vstack([np.eye(a, dtype=np.int64), np.zeros((c, a), dtype=np.int64)]))
        pr[l] = F.matmul(np.hstack([np.zeros((c, a), dtype=np.int64), np.eye(c, dtype=np.int64)]), Pinv[l])
    return ncx.Morphism(A, B, 0, inc), ncx.Morphism(B, C, 0, pr)


def check_ses(ctx, rng) -> list[str]:
    inc, pr = random_split_ses(ctx, rng)
    return ncx.ncx_ses_check(inc, pr).failures[:1]


def check_strings(ctx, rng) -> list[str]:
    C = ncx.random_ncomplex(ctx, rng)
    sd = ncx.ncx_string_decompose(C)
    try:
        ncx.ncx_string_change_of_basis(C, sd)
    except AssertionError as exc:
        return [str(exc)]
    for st in sd.strings:
        last = C.field.matmul(C.dmat(st.top - st.length + 1), st.vectors[-1][:, None])
        if last.size and last.any():
            return ["last string vector is not a cycle"]
    return []


# -- groupchain ---------------------------------------------------------------------------

def regrading_failures(C: gcm.GComplex) -> list[str]:
    """Homology of ιC against homology of C, with the i_* and d_* chains."""
    p = C.p
    X = gcm.gc_flatten(C)
    H = ncx.ncx_homology(X, 1)
    iX = gcm.gc_flatten(gcm.gc_iota(C))
    HI = ncx.ncx_homology_all(iX)
    F = C.field
    errs = []
    expected: dict[int, int] = {}
    for j, k in H.dims.items():
        if j % 2:
            expected[p * ((j + 1) // 2) - 1] = k
    for s in range(1, p):
        exp_s = dict((l, k) for l, k in expected.items())
        for j, k in H.dims.items():
            if j % 2 == 0:
                exp_s[p * (j // 2) - 1 + s] = k
        if HI[s].dims != exp_s:
            errs.append(f"_{s}H(ιC) = {HI[s].dims}, expected {exp_s}")
    if p < 3:
        return errs
    for j, k in H.dims.items():
        if j % 2:
            l = p * ((j + 1) // 2) - 1
            for s in range(1, p - 1):
                M = ncx._class_map(iX, HI, s, l, s + 1, 0)
                if M.shape != (k, k) or rank(F, M) != k:
                    errs.append(f"i_* is not an isomorphism at degree {l}, s={s}")
        else:
            for s in range(p - 1, 1, -1):
                l = p * (j // 2) - 1 + s
                M = ncx._class_map(iX, HI, s, l, s - 1, 1)
                if M.shape != (k, k) or rank(F, M) != k:
                    errs.append(f"d_* is not an isomorphism at degree {l}, s={s}")
    return errs


def transport_instance(rng, p: int, max_dim: int = 3, width: int = 4):
    """(f, h) with f = dH + Hd and h a perturbed p-complex null-homotopy of ι f."""
    ctx2 = default_context(p, 2)
    C = ncx.random_ncomplex(ctx2, rng, max_dim, width)
    D = ncx.random_ncomplex(ctx2, rng, max_dim, width)
    H = ncx.random_graded_map(C, D, 1, rng)
    f = ncx.homotopy_sum(H)
    iC, iD = gcm.iota_flat(C, p), gcm.iota_flat(D, p)
    h = gcm.iota_lift_homotopy(H, iC, iD, p)
    Hm, K = gcm.homotopy_kernel(iC, iD)
    if K.size:
        v = iC.field.matmul(K, iC.field.random(rng, (K.shape[1], 1)))[:, 0]
        h = h + ncx.hom_vector_to_map(iC, iD, Hm, p - 1, v)
    return f, h


def check_transport(rng, p: int) -> list[str]:
    f, h = transport_instance(rng, p)
    T = gcm.gc_iota_homotopy_transport(f, h, p)
    zero = ncx.ncx_zero_map(f.src, f.tgt)
    return [] if ncx.ncx_verify_homotopy(f, zero, T) else ["transported homotopy fails"]


def check_regrading(rng, p: int, n: int) -> list[str]:
    return regrading_failures(gcm.random_perfect_complex(p, n, rng, max_rank=3, width=6))


# -- pdg ----------------------------------------------------------------------------------

def check_minimal_model(rng, p: int, n: int) -> list[str]:
    C = gcm.random_perfect_complex(p, n, rng, max_rank=2, width=4)
    M = pdg.pdg_beta(gcm.gc_iota(C))
    mm = pdg.pdg_minimal_model(M)
    X, Y = pdg.pdg_fiber(M), pdg.pdg_fiber(mm)
    errs = []
    for l in Y.degrees():
        if Y.dim(l - p + 1) and Y.dpow(l, p - 1).any():
            errs.append("minimal model fiber is not (p-1)-nilpotent")
            break
    for s in range(1, p):
        if ncx.ncx_homology(X, s).dims != ncx.ncx_homology(Y, s).dims:
            errs.append(f"minimal model changes _{s}H of the fiber")
    if not pdg.pdg_validate(mm):
        errs.append("minimal model is not a p-DG module")
    return errs


def check_composition(rng, p: int, n: int) -> list[str]:
    C = gcm.random_perfect_complex(p, n, rng, max_rank=2, width=4)
    H = gcm.gc_homology(C)
    cs = pdg.pdg_composition_series(pdg.pdg_beta(gcm.gc_iota(C)))
    errs = []
    ell = sum((p - 1 if l % 2 == 0 else 1) * H[l].dim for l in H)
    if cs.module.ell != ell:
        errs.append(f"composition series has {cs.module.ell} generators, expected {ell}")
    if cs.length != sum(gcm.gc_loewy_length(H[l]) for l in H):
        errs.append("composition series length differs from the Loewy length sum")
    if not pdg.strictly_upper(cs.module.D):
        errs.append("composition series matrix is not strictly upper triangular")
    return errs


def check_d1_action(rng, p: int, n: int) -> list[str]:
    """d1 against the y-action at the top residues on β(ιC)."""
    C = gcm.random_perfect_complex(p, n, rng, max_rank=2, width=4)
    iC = gcm.gc_iota(C)
    M = pdg.pdg_beta(iC)
    X = pdg.pdg_fiber(M)
    F = M.field
    errs = []
    for s, res in ((1, p - 1), (p - 1, p - 2)):
        H = ncx.ncx_homology(X, s)
        T = ncx.ncx_homology(X, p - s)
        for l, sq in H.subq.items():
            if l % p != res or sq.dim == 0:
                continue
            d1 = pdg.pdg_d1(M, s, l)
            tgt = T.subq[l - s + 1]
            for t in range(n):
                Y = gcm.y_action(p, n, t, iC.rank(l))
                img = F.matmul(Y, sq.reps)
                if s != 1:
                    img = F.mul(img, p - 1)
                    img = F.matmul(X.dpow(l, s - 1), img)
                expect = tgt.coords(img)
                if not np.array_equal(expect, d1[t]):
                    errs.append(f"d1 differs from the y-action at degree {l}, s={s}")
    return errs


# -- certify --------------------------------------------------------------------------------

def check_conjugation_invariance(rng) -> list[str]:
    """Diagonal conjugation and point scaling leave every verdict unchanged."""
    F = field_make(3)
    K = pdg.pdg_koszul(3, None, 3, 1).to_pdg()
    cert = certify.Certificate(3, 1, F, K.c, K.D)
    lam = [int(x) for x in F.random(rng, (cert.ell,), nonzero=True)]
    Lam = np.diag(lam)
    Linv = np.diag([int(F.inv(x)) for x in lam])
    D2 = cert.D.mul_const_left(Linv).mul_const_right(Lam)
    other = certify.Certificate(3, 1, F, cert.c, D2)
    a = certify.cert_check(cert, random_points=4).verdicts()
    b = certify.cert_check(other, random_points=4).verdicts()
    return [] if a == b else ["diagonal conjugation changes a verdict"]


# -- driver -----------------------------------------------------------------------------------

@dataclass
class SuiteResult:
    suite: str
    checks: int
    failures: list[str]


def load_golden(path: str | None = None) -> dict:
    with open(path or GOLDEN) as fh:
        return json.load(fh)


def golden_failures(golden: dict) -> list[str]:
    errs = []
    for key, want in sorted(golden.items()):
        got = GOLDEN_COMPUTE[key]()
        if got != want:
            errs.append(f"golden {key}: computed {got}, file has {want}")
    return errs


def _example43():
    K = pdg.pdg_koszul(3, None, 3, 2)
    return [pdg.pdg_homology_acomplex(K, 1), pdg.pdg_homology_acomplex(K, 2)]


def _koszul1():
    K = pdg.pdg_koszul(3, None, 3, 1)
    return [pdg.pdg_homology_acomplex(K, 1), pdg.pdg_homology_acomplex(K, 2)]


def _torus(n):
    cs = pdg.pdg_composition_series(pdg.pdg_beta(gcm.gc_iota(gcm.gc_torus(n, 3))))
    return [cs.module.ell, cs.length]


GOLDEN_COMPUTE: dict[str, Callable] = {
    "example43": _example43,
    "koszul_one_variable": _koszul1,
    "torus1_p3": lambda: _torus(1),
    "torus2_p3": lambda: _torus(2),
}


def suites(rng, scale: int = 1) -> dict[str, list[Callable[[], list[str]]]]:
    k = scale
    nctx = [default_context(2, 2), default_context(3, 3), default_context(5, 5), QContext(field_make(5), 2, 4)]
    return {
        "exactfield": [lambda p=p, m=m: check_frobenius(rng, p, m) for p, m in ((2, 3), (3, 2), (5, 1))]
        + [lambda p=p, m=m: check_poly_ring(rng, p, m) for p, m in ((3, 1), (2, 2)) for _ in range(5 * k)],
        "qcombinat": [lambda c=c: check_q_context(c) for c in q_contexts()],
        "ncomplex": [f for c in nctx for f in (
            [lambda c=c: check_acyclicity(c, rng)] * (5 * k)
            + [lambda c=c: check_tensor_homotopy(c, rng)] * k
            + [lambda c=c: check_hexagon(c, rng)] * k
            + [lambda c=c: check_ses(c, rng)] * k
            + [lambda c=c: check_strings(c, rng)] * k)],
        "groupchain": [lambda p=p, n=n: check_regrading(rng, p, n) for p, n in ((3, 1), (5, 1), (3, 2))] * k
        + [lambda p=p: check_transport(rng, p) for p in (3, 5)] * k,
        "pdg": [lambda p=p, n=n: check_minimal_model(rng, p, n) for p, n in ((3, 1), (3, 2))] * k
        + [lambda p=p, n=n: check_composition(rng, p, n) for p, n in ((3, 1), (2, 2))] * k
        + [lambda p=p, n=n: check_d1_action(rng, p, n) for p, n in ((3, 1), (3, 2), (5, 1))] * k,
        "certify": [lambda: check_conjugation_invariance(rng)] * (3 * k),
    }


def run(seed: int = 0, only: str | None = None, golden: str | None = None, scale: int = 1) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    all_suites = suites(rng, scale)
    if only is not None and only not in all_suites and only != "golden":
        raise ValueError(f"unknown suite {only!r}; choose from {sorted(all_suites)} or 'golden'")
    out = []
    for name, checks in all_suites.items():
        if only is not None and name != only:
            continue
        fails: list[str] = []
        for chk in checks:
            fails.extend(chk())
        out.append(SuiteResult(name, len(checks), fails))
    if only in (None, "golden"):
        out.append(SuiteResult("golden", len(GOLDEN_COMPUTE), golden_failures(load_golden(golden))))
    return out
