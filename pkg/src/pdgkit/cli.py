"""Command-line front end.

Exit codes: 0 pass (or a conclusive search), 1 fail or counterexample,
2 invalid input or an inconclusive budget.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import serialize as ser
from .certify import Certificate, cert_bound_report, cert_check, cert_search
from .field import field_make
from .groupchain import (GComplex, gc_circle, gc_flatten, gc_free, gc_homology, gc_iota, gc_torus,
                         random_perfect_complex)
from .ncomplex import NComplexFin, ncx_homology
from .pdg import (FreeAComplex, PDGModule, pdg_beta, pdg_composition_series, pdg_homology,
                  pdg_homology_acomplex, pdg_koszul, pdg_minimal_model)
from .selftest import run as run_selftest

BUILTINS = ("koszul", "torus", "circle", "kg", "random", "empty")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    builtin: str | None = None
    p: int = 3
    n: int = 1
    m_max: int | None = None
    cutoff: int | None = None
    delta: int | None = None
    seed: int | None = None
    budget: int | None = None
    mode: str = "exhaustive"
    only: str | None = None
    field: str | None = None
    ell: int | None = None
    c: list[int] | None = None
    golden: str | None = None
    verbose: int = 0


def _parse_field(text: str | None, p: int):
    if text is None:
        return field_make(p)
    t = text.upper().lstrip("F").lstrip("_")
    if not t.isdigit():
        raise InputError(f"cannot read field {text!r}; use e.g. F3 or F9")
    q = int(t)
    for m in range(1, 64):
        if p**m == q:
            return field_make(p, m)
        if p**m > q:
            break
    raise InputError(f"F{q} is not a field of characteristic {p}")


def _builtin(cfg: RunConfig):
    name, p, n = cfg.builtin, cfg.p, cfg.n
    if name == "koszul":
        return pdg_koszul(p, None, p, n)
    if name == "torus":
        return gc_torus(n, p)
    if name == "circle":
        return gc_circle(p, n)
    if name == "kg":
        return gc_free(p, n)
    if name == "empty":
        return GComplex(field_make(p), p, n, 2, {})
    if name == "random":
        if cfg.seed is None:
            raise InputError("the random builtin needs --seed")
        return random_perfect_complex(p, n, np.random.default_rng(cfg.seed))
    raise InputError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


def _source(cfg: RunConfig):
    if cfg.builtin and cfg.input:
        raise InputError("give either --builtin or --in, not both")
    if cfg.builtin:
        return _builtin(cfg)
    if cfg.input:
        try:
            return ser.load_file(cfg.input)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"cannot load {cfg.input}: {exc}") from exc
    raise InputError("no input: use --builtin or --in")


def _perfect(obj) -> GComplex:
    if not isinstance(obj, GComplex) or obj.N != 2:
        raise InputError("expected a perfect complex")
    return obj


def _pdg_input(obj) -> PDGModule:
    if isinstance(obj, PDGModule):
        return obj
    if isinstance(obj, GComplex):
        return pdg_beta(gc_iota(obj) if obj.N == 2 else obj)
    raise InputError("expected a p-DG module or a complex over k[G]")


def _emit(cfg: RunConfig, payload: dict, text: str) -> None:
    out = ser.dumps(payload)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(out)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if not cfg.output:
        sys.stdout.write(out)


def _table(rows: dict[int, list[int]], header: str) -> str:
    width = max((len(r) for r in rows.values()), default=0)
    lines = [f"{header:>6} | " + " ".join(f"{k:>4}" for k in range(width))]
    for s, vals in sorted(rows.items()):
        lines.append(f"{'s=' + str(s):>6} | " + " ".join(f"{v:>4}" for v in vals))
    return "\n".join(lines)


def _range_table(tables: dict[int, dict[int, int]]) -> tuple[list[int], dict[int, list[int]]]:
    degs = sorted({l for t in tables.values() for l in t})
    if not degs:
        return [], {s: [] for s in tables}
    span = list(range(degs[0], degs[-1] + 1))
    return span, {s: [t.get(l, 0) for l in span] for s, t in tables.items()}


def cmd_homology(cfg: RunConfig) -> int:
    obj = _source(cfg)
    payload: dict = {"format": ser.FORMAT, "type": "homology"}
    if isinstance(obj, FreeAComplex):
        rows = {s: pdg_homology_acomplex(obj, s, cfg.cutoff) for s in range(1, obj.N)}
        payload.update(kind="acomplex", indexing="homological", dims={str(s): v for s, v in rows.items()})
        text = _table(rows, "i")
    elif isinstance(obj, PDGModule):
        reps = {s: pdg_homology(obj, s, cfg.cutoff) for s in range(1, obj.N)}
        span, rows = _range_table({s: r.dims for s, r in reps.items()})
        payload.update(kind="pdg", indexing="total", degrees=span,
                       dims={str(s): v for s, v in rows.items()},
                       certified={str(s): r.certified for s, r in reps.items()})
        text = "degrees " + " ".join(map(str, span)) + "\n" + _table(rows, "l")
    elif isinstance(obj, GComplex):
        if obj.N == 2:
            H = gc_homology(obj)
            payload.update(kind="perfect", dims={str(l): H[l].dim for l in sorted(H)})
            text = "H: " + ", ".join(f"H_{l}={H[l].dim}" for l in sorted(H))
        else:
            X = gc_flatten(obj)
            tabs = {s: ncx_homology(X, s).dims for s in range(1, obj.N)}
            span, rows = _range_table(tabs)
            payload.update(kind="gcomplex", degrees=span, dims={str(s): v for s, v in rows.items()})
            text = _table(rows, "l")
    elif isinstance(obj, NComplexFin):
        tabs = {s: ncx_homology(obj, s).dims for s in range(1, obj.N)}
        span, rows = _range_table(tabs)
        payload.update(kind="ncomplex", degrees=span, dims={str(s): v for s, v in rows.items()})
        text = "degrees " + " ".join(map(str, span)) + "\n" + _table(rows, "l")
    else:
        raise InputError("unsupported input for homology")
    _emit(cfg, payload, text)
    return 0


def cmd_beta(cfg: RunConfig) -> int:
    C = _source(cfg)
    if not isinstance(C, GComplex):
        raise InputError("beta expects a complex over k[G]")
    M = pdg_beta(gc_iota(C) if C.N == 2 else C)
    _emit(cfg, ser.pdg_to_json(M), f"beta: {M.ell} generators, degrees {sorted(set(M.c))}")
    return 0


def cmd_minimize(cfg: RunConfig) -> int:
    M = pdg_minimal_model(_pdg_input(_source(cfg)))
    _emit(cfg, ser.pdg_to_json(M), f"minimal model: {M.ell} generators")
    return 0


def _compose(M: PDGModule) -> tuple[dict, str]:
    cs = pdg_composition_series(M)
    payload = ser.pdg_to_json(cs.module)
    payload["pieces"] = [{"kind": pc.kind, "degree": pc.degree, "s": pc.s, "count": pc.count,
                          "columns": pc.columns} for pc in cs.pieces]
    payload["length"] = cs.length
    payload["refined_length"] = cs.refined_length
    text = (f"composition series: l={cs.module.ell}, length {cs.length} "
            f"(refined {cs.refined_length})")
    return payload, text


def cmd_compose(cfg: RunConfig) -> int:
    payload, text = _compose(_pdg_input(_source(cfg)))
    _emit(cfg, payload, text)
    return 0


def _check_kwargs(cfg: RunConfig) -> dict:
    return {"m_max": cfg.m_max, "seed": 0 if cfg.seed is None else cfg.seed}


def _report_text(rep) -> str:
    lines = [f"{k:>14}: {'PASS' if v else 'FAIL'}" for k, v in rep.verdicts().items()]
    lines.append(f"{'points':>14}: {rep.exhaustive_points} exhaustive over "
                 + ", ".join(f"F_{q}" for q in rep.fields_tested) + ", "
                 f"{rep.random_points} random over F_{rep.random_field}")
    for k, w in sorted(rep.witnesses.items()):
        lines.append(f"{'witness':>14}: {k}: {w}")
    return "\n".join(lines)


def cmd_check(cfg: RunConfig) -> int:
    obj = _source(cfg)
    if isinstance(obj, PDGModule):
        cert = Certificate.from_module(obj)
    elif isinstance(obj, Certificate):
        cert = obj
    else:
        raise InputError("check expects a certificate or p-DG module")
    rep = cert_check(cert, **_check_kwargs(cfg))
    _emit(cfg, ser.report_to_json(rep), _report_text(rep))
    return 0 if rep.passed else 1


def cmd_search(cfg: RunConfig) -> int:
    if cfg.ell is None:
        raise InputError("search needs --l")
    if cfg.mode == "random" and cfg.seed is None:
        raise InputError("random search needs --seed")
    F = _parse_field(cfg.field, cfg.p)
    budget = 10**6 if cfg.budget is None else cfg.budget
    rep = cert_search(cfg.p, cfg.n, cfg.ell, cfg.c, F, cfg.mode, budget, cfg.seed or 0, cfg.delta, cfg.m_max)
    payload = {"format": ser.FORMAT, "type": "search", "p": rep.p, "n": rep.n, "l": rep.ell,
               "field": ser.field_to_json(F), "mode": rep.mode, "candidates": rep.candidates,
               "space": rep.space, "exhausted": rep.exhausted, "conclusive": rep.conclusive,
               "certificates": [ser.cert_to_json(c) for c in rep.certificates]}
    text = (f"search p={rep.p} n={rep.n} l={rep.ell} over F_{rep.field_order}: "
            f"{rep.candidates}/{rep.space} candidates, {len(rep.certificates)} certificates, "
            + ("exhausted" if rep.exhausted else "not exhausted"))
    _emit(cfg, payload, text)
    if rep.certificates:
        return 0
    return 0 if rep.conclusive else 2


def _bound_json(b) -> dict:
    return {"l": b.ell, "dim_even": b.dim_even, "dim_odd": b.dim_odd, "euler": b.euler,
            "chi_identity": b.chi_identity, "series_l": b.series_ell, "series_length": b.series_length,
            "loewy_sum": b.loewy_sum, "consistent": b.consistent}


def cmd_bound(cfg: RunConfig) -> int:
    C = _perfect(_source(cfg))
    b = cert_bound_report(C)
    payload = {"format": ser.FORMAT, "type": "bound", **_bound_json(b)}
    _emit(cfg, payload, f"l={b.ell}  dim H_even={b.dim_even}  dim H_odd={b.dim_odd}  chi={b.euler}")
    return 0 if b.consistent else 1


def cmd_pipeline(cfg: RunConfig) -> int:
    C = _perfect(_source(cfg))
    M = pdg_beta(gc_iota(C))
    mm = pdg_minimal_model(M)
    module_json, text = _compose(mm)
    payload = {"format": ser.FORMAT, "type": "pipeline", "beta_generators": M.ell,
               "minimal_generators": mm.ell, "module": module_json}
    ok = True
    if module_json["c"]:
        cert = Certificate.from_module(ser.pdg_from_json(module_json, check=False))
        rep = cert_check(cert, **_check_kwargs(cfg))
        payload["report"] = ser.report_to_json(rep)
        ok = rep.passed
        text += "\n" + _report_text(rep)
    else:
        payload["acyclic_input"] = True
        text += "\nacyclic input: empty module"
    b = cert_bound_report(C)
    payload["bound"] = _bound_json(b)
    ok = ok and b.consistent
    _emit(cfg, payload, text)
    return 0 if ok else 1


def cmd_selftest(cfg: RunConfig) -> int:
    seed = 0 if cfg.seed is None else cfg.seed
    try:
        results = run_selftest(seed, cfg.only, cfg.golden)
    except (ValueError, OSError) as exc:
        raise InputError(str(exc)) from exc
    lines, ok = [], True
    for r in results:
        ok = ok and not r.failures
        lines.append(f"{r.suite:>10}: {r.checks} checks, " + ("ok" if not r.failures else
                                                              f"FAILED: {r.failures[0]}"))
    payload = {"format": ser.FORMAT, "type": "selftest", "seed": seed,
               "suites": {r.suite: {"checks": r.checks, "failures": r.failures} for r in results}}
    _emit(cfg, payload, "\n".join(lines))
    return 0 if ok else 1


COMMANDS = {
    "homology": cmd_homology,
    "beta": cmd_beta,
    "minimize": cmd_minimize,
    "compose": cmd_compose,
    "check": cmd_check,
    "search": cmd_search,
    "bound": cmd_bound,
    "pipeline": cmd_pipeline,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pdgkit", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--in", dest="input")
    ap.add_argument("--out", dest="output")
    ap.add_argument("--builtin", choices=BUILTINS)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--l", dest="ell", type=int)
    ap.add_argument("--c", type=lambda s: [int(x) for x in s.split(",")], help="degree vector, e.g. 0,0,0")
    ap.add_argument("--field", help="coefficient field for search, e.g. F3 or F9")
    ap.add_argument("--m-max", dest="m_max", type=int)
    ap.add_argument("--cutoff", type=int)
    ap.add_argument("--delta", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--budget", type=int)
    ap.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    ap.add_argument("--only")
    ap.add_argument("--golden", help="golden-value file for selftest")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        if cfg.p < 2 or not all(cfg.p % k for k in range(2, int(cfg.p**0.5) + 1)):
            raise InputError(f"--p {cfg.p} is not prime")
        return COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
