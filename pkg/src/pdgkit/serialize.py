"""JSON encodings, versioned by ``"format": 1``.

Scalars inside matrices are encoded integers (base-p digits of the residue
polynomial, least significant first).  Polynomials are term lists
``[{"e": [exponents], "c": [coefficient digits]}]``.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .certify import Certificate, CertReport
from .field import FieldSpec, field_make
from .groupchain import GComplex
from .ncomplex import NComplexFin
from .pdg import FreeAComplex, PDGModule
from .poly import MultiPoly, PolyMatrix
from .qcombinat import QContext

FORMAT = 1


def field_to_json(F: FieldSpec) -> dict:
    return {"p": F.p, "m": F.m, "modulus": list(F.modulus)}


def field_from_json(obj: dict) -> FieldSpec:
    F = field_make(int(obj["p"]), int(obj.get("m", 1)))
    if "modulus" in obj and list(obj["modulus"]) != list(F.modulus):
        raise ValueError("unsupported modulus; only the default irreducible is accepted")
    return F


def poly_to_json(f: MultiPoly) -> list:
    return [{"e": list(e), "c": list(f.field.coeffs(v))} for e, v in sorted(f.terms.items(), reverse=True)]


def poly_from_json(F: FieldSpec, n: int, terms: list, trunc: int | None = None) -> MultiPoly:
    out = {}
    for t in terms:
        e = tuple(int(x) for x in t["e"])
        if len(e) != n:
            raise ValueError(f"exponent {e} has the wrong length")
        out[e] = F.from_coeffs(t["c"])
    return MultiPoly(F, n, out, trunc)


def _sparse_matrix(D: PolyMatrix) -> dict:
    return {f"{i},{j}": poly_to_json(D.entry(i, j)) for i, j in sorted(D.nonzero_positions())}


def _sparse_from(F, n, shape, obj: dict, trunc=None) -> PolyMatrix:
    coeffs: dict = {}
    for key, terms in obj.items():
        i, j = (int(x) for x in key.split(","))
        if not (0 <= i < shape[0] and 0 <= j < shape[1]):
            raise ValueError(f"entry {key} outside a {shape[0]}x{shape[1]} matrix")
        for e, v in poly_from_json(F, n, terms, trunc).terms.items():
            coeffs.setdefault(e, np.zeros(shape, dtype=np.int64))[i, j] = v
    return PolyMatrix(F, n, shape, coeffs, trunc)


def pdg_to_json(M: PDGModule, kind: str = "pdg") -> dict:
    out = {"format": FORMAT, "type": kind, "p": M.p, "n": M.n, "field": field_to_json(M.field),
           "c": list(M.c), "D": _sparse_matrix(M.D)}
    if M.secondary is not None:
        out["secondary"] = list(M.secondary)
    return out


def pdg_from_json(obj: dict, check: bool = True) -> PDGModule:
    F = field_from_json(obj["field"]) if "field" in obj else field_make(int(obj["p"]))
    c = [int(x) for x in obj["c"]]
    n = int(obj["n"])
    D = _sparse_from(F, n, (len(c), len(c)), obj.get("D", {}))
    return PDGModule(int(obj["p"]), n, F, c, D, obj.get("secondary"), check=check)


def cert_to_json(C: Certificate) -> dict:
    return {"format": FORMAT, "type": "certificate", "p": C.p, "n": C.n, "field": field_to_json(C.field),
            "c": list(C.c), "D": _sparse_matrix(C.D)}


def cert_from_json(obj: dict) -> Certificate:
    F = field_from_json(obj["field"]) if "field" in obj else field_make(int(obj["p"]))
    c = [int(x) for x in obj["c"]]
    n = int(obj["n"])
    return Certificate(int(obj["p"]), n, F, c, _sparse_from(F, n, (len(c), len(c)), obj.get("D", {})))


def gcomplex_to_json(C: GComplex) -> dict:
    d = {str(l): _sparse_matrix(M) for l, M in sorted(C.d.items())}
    return {"format": FORMAT, "type": "perfect" if C.N == 2 else "gcomplex", "p": C.p, "n": C.n, "N": C.N,
            "field": field_to_json(C.field), "ranks": {str(l): r for l, r in sorted(C.ranks.items())},
            "d": d}


def gcomplex_from_json(obj: dict, check: bool = True) -> GComplex:
    p, n = int(obj["p"]), int(obj["n"])
    F = field_from_json(obj["field"]) if "field" in obj else field_make(p)
    ranks = {int(l): int(r) for l, r in obj.get("ranks", {}).items()}
    d = {}
    for l, M in obj.get("d", {}).items():
        l = int(l)
        d[l] = _sparse_from(F, n, (ranks.get(l - 1, 0), ranks.get(l, 0)), M, trunc=p)
    return GComplex(F, p, n, int(obj.get("N", 2)), ranks, d, check=check)


def ncomplex_to_json(C: NComplexFin) -> dict:
    return {"format": FORMAT, "type": "ncomplex", "N": C.N, "q": list(C.field.coeffs(C.ctx.q)),
            "field": field_to_json(C.field), "dims": {str(l): k for l, k in sorted(C.dims.items())},
            "d": {str(l): A.tolist() for l, A in sorted(C.d.items())}}


def ncomplex_from_json(obj: dict) -> NComplexFin:
    F = field_from_json(obj["field"])
    ctx = QContext(F, F.from_coeffs(obj["q"]), int(obj["N"]))
    dims = {int(l): int(k) for l, k in obj.get("dims", {}).items()}
    d = {int(l): np.array(A, dtype=np.int64).reshape(dims.get(int(l) - 1, 0), dims.get(int(l), 0))
         for l, A in obj.get("d", {}).items()}
    return NComplexFin(ctx, dims, d)


def acomplex_to_json(K: FreeAComplex) -> dict:
    out = {"format": FORMAT, "type": "acomplex", "N": K.N, "n": K.n, "field": field_to_json(K.field),
           "gens": {str(i): v for i, v in sorted(K.gens.items())},
           "d": {str(i): _sparse_matrix(A) for i, A in sorted(K.d.items()) if not A.is_zero()}}
    if K.variables is not None:
        out["variables"] = list(K.variables)
    return out


def acomplex_from_json(obj: dict) -> FreeAComplex:
    F = field_from_json(obj["field"])
    n = int(obj["n"])
    gens = {int(i): [int(x) for x in v] for i, v in obj.get("gens", {}).items()}
    d = {}
    for i, M in obj.get("d", {}).items():
        i = int(i)
        d[i] = _sparse_from(F, n, (len(gens.get(i - 1, [])), len(gens.get(i, []))), M)
    return FreeAComplex(F, n, int(obj["N"]), gens, d)


def report_to_json(R: CertReport) -> dict:
    return {"format": FORMAT, "type": "certreport", "passed": R.passed, "verdicts": R.verdicts(),
            "divisible": R.divisible, "target_rank": R.target_rank, "fields_tested": R.fields_tested,
            "exhaustive_points": R.exhaustive_points, "random_points": R.random_points,
            "random_field": R.random_field, "failure_bound": R.failure_bound,
            "witnesses": dict(sorted(R.witnesses.items()))}


_LOADERS = {
    "pdg": pdg_from_json,
    "certificate": cert_from_json,
    "perfect": gcomplex_from_json,
    "gcomplex": gcomplex_from_json,
    "ncomplex": ncomplex_from_json,
    "acomplex": acomplex_from_json,
}


def load(obj: dict) -> Any:
    if obj.get("format") != FORMAT:
        raise ValueError(f"unsupported format {obj.get('format')!r}")
    kind = obj.get("type")
    if kind not in _LOADERS:
        raise ValueError(f"unknown object type {kind!r}")
    return _LOADERS[kind](obj)


def load_file(path: str) -> Any:
    with open(path) as fh:
        return load(json.load(fh))


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"
