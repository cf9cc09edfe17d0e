"""Rank certificates: homogeneous p-nilpotent matrices over k[x_1..x_n].

A certificate passes when D is strictly upper triangular, ``D(0)^{p-1} = 0``
and ``D(x)`` has rank ``(p-1)l/p`` at every nonzero point x.  The last
condition is checked exhaustively on projective points over small fields and
by random sampling over a large field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

from .field import FieldSpec, field_make
from .linalg import rank
from .pdg import PDGModule, _degree_failure, strictly_upper
from .poly import Exp, PolyMatrix, monomials


@dataclass
class Certificate:
    p: int
    n: int
    field: FieldSpec
    c: list[int]
    D: PolyMatrix

    @property
    def ell(self) -> int:
        return len(self.c)

    @classmethod
    def from_module(cls, M: PDGModule) -> "Certificate":
        return cls(M.p, M.n, M.field, list(M.c), M.D)


@dataclass
class CertReport:
    homogeneous: bool
    p_nilpotent: bool
    upper_triangular: bool
    constant_part: bool
    rank_condition: bool
    divisible: bool
    target_rank: int | None
    fields_tested: list[int] = dc_field(default_factory=list)
    exhaustive_points: int = 0
    random_points: int = 0
    random_field: int | None = None
    failure_bound: float | None = None
    witnesses: dict[str, str] = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts().values())

    def verdicts(self) -> dict[str, bool]:
        return {
            "homogeneity": self.homogeneous,
            "p-nilpotence": self.p_nilpotent,
            "condition i": self.upper_triangular,
            "condition ii": self.constant_part,
            "condition iii": self.rank_condition and self.divisible,
        }


def projective_points(F: FieldSpec, n: int) -> Iterator[tuple[int, ...]]:
    """One point per line through the origin: the first nonzero coordinate is 1."""
    q = F.order
    for lead in range(n):
        for rest in itertools.product(range(q), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + rest


def _poly_degree_bound(D: PolyMatrix) -> int:
    return max(D.max_degree(), 0)


def random_field_for(F: FieldSpec, target: int = 10**4) -> FieldSpec:
    m = F.m
    while F.p ** m < target:
        m += F.m
    return field_make(F.p, m)


def cert_check(C: Certificate, m_max: int | None = None, random_points: int = 16,
               seed: int = 0, random_field: FieldSpec | None = None) -> CertReport:
    """All conditions of the rank certificate, with sampling metadata."""
    p, F, D = C.p, C.field, C.D
    ell = C.ell
    if ell < 1:
        raise ValueError("certificate needs at least one generator")
    if D.shape != (ell, ell) or D.n != C.n:
        raise ValueError(f"malformed certificate: D has shape {D.shape}, c has length {ell}")
    witnesses: dict[str, str] = {}
    bad = _degree_failure(F, C.n, C.c, D)
    homog = bad is None
    if bad:
        witnesses["homogeneity"] = bad
    Dp = D.power(p)
    nil = Dp.is_zero()
    if not nil:
        witnesses["p-nilpotence"] = f"D^{p} has a nonzero entry at {min(Dp.nonzero_positions())}"
    upper = strictly_upper(D)
    if not upper:
        ij = min((i, j) for i, j in D.nonzero_positions() if i >= j)
        witnesses["condition i"] = f"nonzero entry at {ij}"
    D0 = D.const()
    P0 = np.eye(ell, dtype=np.int64)
    for _ in range(p - 1):
        P0 = F.matmul(P0, D0)
    cii = not P0.any()
    if not cii:
        witnesses["condition ii"] = "(D(0))^(p-1) is nonzero"
    divisible = ell % p == 0
    target = (p - 1) * ell // p if divisible else None
    report = CertReport(homog, nil, upper, cii, False, divisible, target)
    if not divisible:
        witnesses["condition iii"] = f"{p} does not divide l={ell}"
        report.witnesses = witnesses
        return report
    m_max = F.m if m_max is None else m_max
    ok = True
    for m in range(F.m, m_max + 1, F.m):
        E = field_make(p, m)
        report.fields_tested.append(E.order)
        for x in projective_points(E, C.n):
            report.exhaustive_points += 1
            r = rank(E, D.evaluate(x, E))
            if r != target:
                ok = False
                witnesses["condition iii"] = f"rank {r} at {x} over F_{E.order}"
                break
        if not ok:
            break
    if ok and random_points:
        E = random_field or random_field_for(F)
        rng = np.random.default_rng(seed)
        report.random_field = E.order
        for _ in range(random_points):
            x = tuple(int(v) for v in E.random(rng, (C.n,)))
            if not any(x):
                continue
            report.random_points += 1
            r = rank(E, D.evaluate(x, E))
            if r != target:
                ok = False
                witnesses["condition iii"] = f"rank {r} at {x} over F_{E.order}"
                break
        # a fixed nonzero target minor has degree <= target * max entry degree
        report.failure_bound = min(1.0, target * _poly_degree_bound(D) / E.order)
    report.rank_condition = ok
    report.witnesses = witnesses
    return report


def cert_jordan_type(Dx: np.ndarray, field: FieldSpec) -> tuple[int, ...]:
    """Jordan block sizes of a nilpotent matrix, largest first."""
    Dx = np.asarray(Dx, dtype=np.int64)
    ell = Dx.shape[0]
    ranks = [ell]
    P = np.eye(ell, dtype=np.int64)
    for _ in range(ell):
        P = field.matmul(P, Dx)
        ranks.append(rank(field, P))
        if ranks[-1] == 0:
            break
    if ranks[-1] != 0:
        raise ValueError("matrix is not nilpotent")
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k in range(len(at_least), 0, -1):
        count = at_least[k - 1] - (at_least[k] if k < len(at_least) else 0)
        sizes.extend([k] * count)
    return tuple(sizes)


# -- bookkeeping -------------------------------------------------------------------------

@dataclass
class BoundReport:
    ell: int
    dim_even: int
    dim_odd: int
    euler: int
    chi_identity: bool | None
    series_ell: int | None
    series_length: int | None
    loewy_sum: int

    @property
    def consistent(self) -> bool:
        return (self.chi_identity is not False
                and self.series_ell in (None, self.ell)
                and self.series_length in (None, self.loewy_sum))


def cert_bound_report(C, cross_check: bool = True, max_generators: int = 200) -> BoundReport:
    """l = (p-1) Σ dim H_even + Σ dim H_odd, checked against the pipeline."""
    from .groupchain import gc_homology, gc_iota, gc_loewy_length
    from .pdg import pdg_beta, pdg_composition_series

    H = gc_homology(C)
    p = C.p
    even = sum(H[l].dim for l in H if l % 2 == 0)
    odd = sum(H[l].dim for l in H if l % 2)
    ell = (p - 1) * even + odd
    chi = even - odd
    chi_id = None
    if chi == 0:
        chi_id = 2 * ell == (even + odd) * p
    sll = sum(gc_loewy_length(H[l]) for l in H)
    s_ell = s_len = None
    iC = gc_iota(C)
    if cross_check and sum(iC.ranks.values()) * p**C.n <= max_generators:
        cs = pdg_composition_series(pdg_beta(iC))
        s_ell, s_len = cs.module.ell, cs.length
    return BoundReport(ell, even, odd, chi, chi_id, s_ell, s_len, sll)


# -- mutations ------------------------------------------------------------------------------

def _consistent_degrees(ell: int, edges: list[tuple[int, int]]) -> list[int] | None:
    """Degrees with c_j = c_i + 1 on every edge (i, j), if they exist."""
    c: list[int | None] = [None] * ell
    adj: dict[int, list[tuple[int, int]]] = {k: [] for k in range(ell)}
    for i, j in edges:
        adj[i].append((j, 1))
        adj[j].append((i, -1))
    for root in range(ell):
        if c[root] is not None:
            continue
        c[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for v, w in adj[u]:
                if c[v] is None:
                    c[v] = c[u] + w
                    stack.append(v)
                elif c[v] != c[u] + w:
                    return None
    return [int(x) for x in c]


def mutate_constant(C: Certificate) -> Certificate | None:
    """Replace D by its value at (1, ..., 1), regraded to stay homogeneous."""
    D1 = C.D.evaluate((1,) * C.n, C.field)
    edges = list(zip(*map(lambda a: a.tolist(), np.nonzero(D1))))
    c = _consistent_degrees(C.ell, edges)
    if c is None:
        return None
    return Certificate(C.p, C.n, C.field, c, PolyMatrix.constant(C.field, C.n, D1))


def mutate_degrees(C: Certificate) -> Certificate | None:
    """Shift one generator degree so that some entry loses homogeneity."""
    for k in range(C.ell):
        c = list(C.c)
        c[k] += 1
        if _degree_failure(C.field, C.n, c, C.D) is not None:
            return Certificate(C.p, C.n, C.field, c, C.D)
    return None


def mutate_zero_entry(C: Certificate) -> Certificate | None:
    """Zero one entry whose removal drops the rank but keeps D^p = 0."""
    for i, j in sorted(C.D.nonzero_positions()):
        coeffs = {}
        for e, A in C.D.coeffs.items():
            B = A.copy()
            B[i, j] = 0
            coeffs[e] = B
        D = PolyMatrix(C.field, C.n, C.D.shape, coeffs)
        if D.power(C.p).is_zero():
            return Certificate(C.p, C.n, C.field, list(C.c), D)
    return None


# -- search -----------------------------------------------------------------------------------

@dataclass
class SearchReport:
    p: int
    n: int
    ell: int
    field_order: int
    degree_vectors: list[list[int]]
    mode: str
    candidates: int
    space: int
    exhausted: bool
    certificates: list[Certificate]

    @property
    def conclusive(self) -> bool:
        return self.mode == "exhaustive" and self.exhausted


def forced_shape(c: Sequence[int], n: int) -> dict[tuple[int, int], list[Exp]]:
    """Monomials allowed in each strictly upper entry (negative degree: none)."""
    out = {}
    ell = len(c)
    for i in range(ell):
        for j in range(i + 1, ell):
            mons = monomials(n, c[i] + 1 - c[j])
            if mons:
                out[(i, j)] = mons
    return out


def _entry_options(F: FieldSpec, k: int, canonical: bool) -> list[tuple[int, ...]]:
    opts = []
    for v in itertools.product(range(F.order), repeat=k):
        if canonical:
            nz = [x for x in v if x]
            if nz and nz[0] != 1:
                continue
        opts.append(v)
    return opts


def _space_size(F, shape, ell) -> int:
    q = F.order
    total = 1
    for (i, j), mons in shape.items():
        k = len(mons)
        total *= (1 + (q**k - 1) // (q - 1)) if j == i + 1 else q**k
    return total


def _build(F, n, ell, shape, choice) -> PolyMatrix:
    coeffs: dict[Exp, np.ndarray] = {}
    for (pos, mons), vals in zip(shape.items(), choice):
        for e, v in zip(mons, vals):
            if v:
                coeffs.setdefault(e, np.zeros((ell, ell), dtype=np.int64))[pos] = v
    return PolyMatrix(F, n, (ell, ell), coeffs)


def _path_product_constant(D: PolyMatrix, p: int) -> bool:
    """With l = p: is f_12 ... f_{p-1,p} a nonzero constant?"""
    D0 = D.const()
    return D.shape[0] == p and all(D0[k, k + 1] for k in range(p - 1))


def enumerate_degree_vectors(ell: int, delta: int) -> list[list[int]]:
    """Degree vectors with c_1 = 0 and spread at most delta."""
    out = []
    for rest in itertools.product(range(-delta, delta + 1), repeat=ell - 1):
        c = [0, *rest]
        if max(c) - min(c) <= delta:
            out.append(c)
    return out


def cert_search(p: int, n: int, ell: int, c: Sequence[int] | None = None, field: FieldSpec | None = None,
                mode: str = "exhaustive", budget: int = 10**6, seed: int = 0, delta: int | None = None,
                m_max: int | None = None, stop_after: int | None = None) -> SearchReport:
    """Enumerate strictly upper triangular candidates and keep the certificates.

    Candidates are taken up to diagonal conjugation: the first nonzero
    coefficient of every superdiagonal entry is 1.
    """
    F = field or field_make(p)
    if mode not in ("exhaustive", "random"):
        raise ValueError(f"unknown mode {mode!r}")
    if c is not None:
        cs = [list(c)]
    elif delta is not None:
        cs = enumerate_degree_vectors(ell, delta)
    else:
        cs = [[0] * ell]
    found: list[Certificate] = []
    examined, space, exhausted = 0, 0, True
    rng = np.random.default_rng(seed)
    for cv in cs:
        if len(cv) != ell:
            raise ValueError("degree vector length differs from l")
        shape = forced_shape(cv, n)
        space += _space_size(F, shape, ell)
        options = [_entry_options(F, len(m), j == i + 1) for (i, j), m in shape.items()]
        if mode == "exhaustive":
            stream = itertools.product(*options)
        else:
            stream = (tuple(o[int(rng.integers(len(o)))] for o in options) for _ in itertools.count())
        for choice in stream:
            if examined >= budget:
                exhausted = False
                break
            examined += 1
            D = _build(F, n, ell, shape, choice)
            if _path_product_constant(D, p):
                continue
            cert = Certificate(p, n, F, list(cv), D)
            rep = cert_check(cert, m_max=m_max, random_points=0)
            if rep.passed:
                found.append(cert)
                if stop_after and len(found) >= stop_after:
                    exhausted = False
                    break
        if mode == "random":
            exhausted = False
        if not exhausted:
            break
    return SearchReport(p, n, ell, F.order, cs, mode, examined, space, exhausted, found)
