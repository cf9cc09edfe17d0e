import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdgkit.certify import Certificate, cert_check
from pdgkit.field import field_make
from pdgkit.groupchain import gc_circle, gc_iota, gc_torus, random_perfect_complex
from pdgkit.ncomplex import random_ncomplex
from pdgkit.pdg import pdg_beta, pdg_koszul
from pdgkit.poly import MultiPoly
from pdgkit.qcombinat import QContext, default_context
from pdgkit.serialize import (FORMAT, acomplex_to_json, cert_to_json, dumps, field_from_json, field_to_json,
                              gcomplex_to_json, load, load_file, ncomplex_to_json, pdg_to_json, poly_from_json,
                              poly_to_json, report_to_json)


def roundtrip(obj):
    return load(json.loads(dumps(obj)))


@pytest.mark.parametrize("pm", [(2, 1), (3, 1), (3, 2), (2, 3)])
def test_field_roundtrip(pm):
    F = field_make(*pm)
    G = field_from_json(field_to_json(F))
    assert (G.p, G.m, G.modulus) == (F.p, F.m, F.modulus)


def test_foreign_modulus_rejected():
    with pytest.raises(ValueError, match="modulus"):
        field_from_json({"p": 3, "m": 2, "modulus": [2, 0, 1]})


def test_poly_roundtrip_extension_coefficients():
    F = field_make(3, 2)
    t = F.from_coeffs([0, 1])
    f = MultiPoly(F, 2, {(1, 0): t, (0, 2): 1})
    assert poly_from_json(F, 2, poly_to_json(f)) == f
    with pytest.raises(ValueError):
        poly_from_json(F, 1, poly_to_json(f))


def test_pdg_roundtrip():
    M = pdg_beta(gc_iota(gc_torus(2, 3)))
    M2 = roundtrip(pdg_to_json(M))
    assert M2.c == M.c and M2.D == M.D and M2.p == M.p


def test_koszul_pdg_keeps_secondary_grading():
    M = pdg_koszul(3, None, 3, 2).to_pdg()
    M2 = roundtrip(pdg_to_json(M))
    assert M2.secondary == M.secondary and M2.D == M.D


def test_certificate_roundtrip_keeps_verdicts():
    M = pdg_beta(gc_iota(gc_circle(3, 1)))
    C = Certificate.from_module(M)
    C2 = roundtrip(cert_to_json(C))
    assert C2.D == C.D and C2.c == C.c
    assert cert_check(C2).verdicts() == cert_check(C).verdicts()


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2), (2, 2), (5, 1)]), st.integers(0, 2**32 - 1))
def test_gcomplex_roundtrip(pn, seed):
    C = random_perfect_complex(*pn, np.random.default_rng(seed))
    C2 = roundtrip(gcomplex_to_json(C))
    assert C2.ranks == C.ranks and set(C2.d) == set(C.d)
    assert all(C2.dmat(l) == C.dmat(l) for l in C.d)


def test_iota_complex_roundtrip():
    I = gc_iota(gc_torus(1, 3))
    obj = gcomplex_to_json(I)
    assert obj["type"] == "gcomplex"
    I2 = roundtrip(obj)
    assert I2.N == 3 and all(I2.dmat(l) == I.dmat(l) for l in I.d)


@pytest.mark.parametrize("ctx", [default_context(3, 3), QContext(field_make(5), 2, 4), default_context(2, 2)],
                         ids=repr)
def test_ncomplex_roundtrip(ctx):
    X = random_ncomplex(ctx, np.random.default_rng(2), 3, 4)
    X2 = roundtrip(ncomplex_to_json(X))
    assert X2.N == X.N and X2.dims == X.dims and int(X2.ctx.q) == int(X.ctx.q)
    assert all(np.array_equal(X2.dmat(l), X.dmat(l)) for l in X.dims)


def test_acomplex_roundtrip():
    K = pdg_koszul(3, None, 3, 2)
    K2 = roundtrip(acomplex_to_json(K))
    assert K2.gens == K.gens
    assert all(K2.dmat(i) == K.dmat(i) for i in range(1, 5))


def test_report_json_is_plain():
    C = Certificate.from_module(pdg_beta(gc_iota(gc_torus(1, 3))))
    obj = report_to_json(cert_check(C))
    assert json.loads(json.dumps(obj)) == obj
    assert set(obj["verdicts"]) == {"homogeneity", "p-nilpotence", "condition i", "condition ii", "condition iii"}


def test_format_and_type_errors():
    obj = pdg_to_json(pdg_koszul(3, None, 3, 1).to_pdg())
    with pytest.raises(ValueError, match="format"):
        load({**obj, "format": FORMAT + 1})
    with pytest.raises(ValueError, match="type"):
        load({**obj, "type": "spaceship"})
    with pytest.raises(ValueError, match="outside"):
        load({**obj, "D": {"7,0": [{"e": [1], "c": [1]}]}})


def test_invalid_module_rejected_on_load():
    obj = {"format": FORMAT, "type": "pdg", "p": 3, "n": 1, "c": [0, 0], "D": {"0,1": [{"e": [2], "c": [1]}]}}
    with pytest.raises(ValueError):
        load(obj)


def test_dumps_is_deterministic(tmp_path):
    M = pdg_beta(gc_iota(gc_torus(2, 3)))
    a, b = dumps(pdg_to_json(M)), dumps(pdg_to_json(pdg_beta(gc_iota(gc_torus(2, 3)))))
    assert a == b
    path = tmp_path / "m.json"
    path.write_text(a)
    assert load_file(str(path)).D == M.D
