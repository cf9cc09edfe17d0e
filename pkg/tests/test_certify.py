import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdgkit.certify import (Certificate, cert_bound_report, cert_check, cert_jordan_type, cert_search,
                            enumerate_degree_vectors, forced_shape, mutate_constant, mutate_degrees,
                            mutate_zero_entry, projective_points, random_field_for)
from pdgkit.field import field_make
from pdgkit.groupchain import gc_free, gc_iota, gc_torus
from pdgkit.pdg import pdg_beta, pdg_composition_series, pdg_koszul, pdg_permute
from pdgkit.poly import MultiPoly, PolyMatrix

from oracles import jordan_type_brute, rank_mod_p

F3 = field_make(3)


def superdiagonal_x(p=3):
    x = MultiPoly.var(F3 if p == 3 else field_make(p), 1, 0)
    rows = [[x if j == i + 1 else 0 for j in range(p)] for i in range(p)]
    F = x.field
    return Certificate(p, 1, F, list(range(p)), PolyMatrix.from_entries(F, 1, rows))


def torus_cert(n, p=3):
    cs = pdg_composition_series(pdg_beta(gc_iota(gc_torus(n, p))))
    return Certificate.from_module(cs.module)


def koszul_cert():
    # top homological degree first makes D strictly upper triangular
    return Certificate.from_module(pdg_permute(pdg_koszul(3, None, 3, 1).to_pdg(), [2, 1, 0]))


# -- examples ----------------------------------------------------------------------------

def test_superdiagonal_x_passes():
    C = superdiagonal_x()
    C.c = [0, 0, 0]
    rep = cert_check(C)
    assert rep.passed and rep.target_rank == 2


def test_constant_certificate_fails_condition_ii():
    D = PolyMatrix.constant(F3, 1, np.eye(3, k=1, dtype=np.int64))
    rep = cert_check(Certificate(3, 1, F3, [0, 1, 2], D))
    v = rep.verdicts()
    assert not v["condition ii"]
    assert v["homogeneity"] and v["p-nilpotence"] and v["condition i"]


def test_length_not_divisible_fails():
    D = PolyMatrix.zeros(F3, 1, (2, 2))
    rep = cert_check(Certificate(3, 1, F3, [0, 0], D))
    assert not rep.verdicts()["condition iii"] and "divide" in rep.witnesses["condition iii"]


def test_empty_certificate_rejected():
    with pytest.raises(ValueError):
        cert_check(Certificate(3, 1, F3, [], PolyMatrix.zeros(F3, 1, (0, 0))))


def test_jordan_type_examples():
    assert cert_jordan_type(np.zeros((3, 3), dtype=np.int64), F3) == (1, 1, 1)
    assert cert_jordan_type(np.eye(3, k=1, dtype=np.int64), F3) == (3,)
    with pytest.raises(ValueError):
        cert_jordan_type(np.eye(2, dtype=np.int64), F3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_jordan_type_matches_rank_sequence_oracle(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    A = np.triu(rng.integers(0, 3, (k, k)), 1)
    P = rng.integers(0, 3, (k, k))
    if rank_mod_p(P.tolist(), 3) < k:
        P = np.eye(k, dtype=np.int64)
    from pdgkit.linalg import inverse
    B = F3.matmul(F3.matmul(P, A), inverse(F3, P))
    assert cert_jordan_type(B, F3) == jordan_type_brute(B.tolist(), 3) == cert_jordan_type(A, F3)


def test_projective_points_count():
    for q, n in ((3, 2), (9, 2), (2, 3)):
        F = field_make(*{3: (3, 1), 9: (3, 2), 2: (2, 1)}[q])
        pts = list(projective_points(F, n))
        assert len(pts) == (q**n - 1) // (q - 1) == len(set(pts))


def test_random_field_is_large_extension():
    E = random_field_for(F3)
    assert E.p == 3 and E.order >= 10**4


# -- torus certificates and mutations ---------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
def test_torus_certificates_pass(n):
    C = torus_cert(n)
    assert C.ell == 3 * 2 ** (n - 1)
    rep = cert_check(C, m_max=2)
    assert rep.passed, rep.witnesses
    assert rep.fields_tested == [3, 9] and rep.random_points > 0


@pytest.mark.parametrize("make", [lambda: torus_cert(1), lambda: torus_cert(2), koszul_cert])
def test_mutations_flip_only_their_target(make):
    C = make()
    base = cert_check(C).verdicts()
    assert all(base.values())
    for mut, target in ((mutate_constant, "condition ii"), (mutate_degrees, "homogeneity"),
                        (mutate_zero_entry, "condition iii")):
        M = mut(C)
        assert M is not None
        v = cert_check(M).verdicts()
        assert {k for k in v if v[k] != base[k]} == {target}, (mut.__name__, v)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_passing_certificate_invariants(seed, n):
    C = torus_cert(n)
    rng = np.random.default_rng(seed)
    E = field_make(3, 4)
    x = tuple(int(v) for v in E.random(rng, (n,)))
    if any(x):
        # p | l and every nonzero point gives Jordan type (p, ..., p)
        assert C.ell % 3 == 0
        assert cert_jordan_type(C.D.evaluate(x, E), E) == (3,) * (C.ell // 3)
    # diagonal conjugation by constants keeps every verdict
    d = [int(v) for v in rng.integers(1, 3, C.ell)]
    Dm = np.diag(d)
    Dinv = np.diag([F3.inv(v) for v in d])
    coeffs = {e: F3.matmul(F3.matmul(Dm, A), Dinv) for e, A in C.D.coeffs.items()}
    C2 = Certificate(3, n, F3, C.c, PolyMatrix(F3, n, C.D.shape, coeffs))
    assert cert_check(C2).verdicts() == cert_check(C).verdicts()


def test_rank_is_constant_on_lines():
    C = torus_cert(2)
    E = field_make(3, 2)
    from pdgkit.linalg import rank
    for x in projective_points(E, 2):
        for lam in range(1, E.order):
            y = tuple(int(E.mul(lam, v)) for v in x)
            assert rank(E, C.D.evaluate(y, E)) == rank(E, C.D.evaluate(x, E))


# -- bookkeeping ------------------------------------------------------------------------------

def test_bound_reports():
    r1 = cert_bound_report(gc_torus(1, 3))
    assert (r1.ell, r1.series_ell, r1.series_length, r1.loewy_sum) == (3, 3, 2, 2) and r1.consistent
    r2 = cert_bound_report(gc_torus(2, 3))
    assert (r2.ell, r2.dim_even, r2.dim_odd, r2.euler) == (6, 2, 2, 0)
    assert r2.chi_identity is True and r2.consistent
    rk = cert_bound_report(gc_free(3, 1))
    assert (rk.ell, rk.euler, rk.chi_identity) == (6, 3, None)


# -- search --------------------------------------------------------------------------------------

def test_forced_shape_degree_zero_vector():
    shape = forced_shape([0, 0, 0], 2)
    assert set(shape) == {(0, 1), (0, 2), (1, 2)}
    assert all(len(m) == 2 for m in shape.values())
    assert forced_shape([0, 3], 1) == {}


def test_enumerate_degree_vectors():
    vs = enumerate_degree_vectors(3, 1)
    assert [0, 0, 0] in vs and [0, 1, -1] not in vs and [0, 1, 1] in vs
    assert all(v[0] == 0 and max(v) - min(v) <= 1 for v in vs)
    assert len(vs) == len({tuple(v) for v in vs})


@pytest.mark.parametrize("m", [1, 2])
def test_no_rank_three_certificate_in_two_variables(m):
    F = field_make(3, m)
    rep = cert_search(3, 2, 3, field=F, m_max=2)
    assert rep.exhausted and rep.conclusive
    assert rep.certificates == []
    assert rep.candidates == rep.space


def test_one_variable_search_finds_koszul():
    rep = cert_search(3, 1, 3)
    assert rep.conclusive and rep.certificates
    K = koszul_cert()
    assert any(C.D == K.D for C in rep.certificates)
    for C in rep.certificates:
        assert cert_check(C).passed


def test_search_budget_zero_is_inconclusive():
    rep = cert_search(3, 2, 3, budget=0)
    assert rep.candidates == 0 and not rep.exhausted and not rep.conclusive


def test_random_mode_is_never_conclusive():
    rep = cert_search(3, 1, 3, mode="random", budget=50, seed=4)
    assert rep.candidates == 50 and not rep.conclusive


def test_search_deterministic_in_seed():
    a = cert_search(3, 1, 3, mode="random", budget=40, seed=9)
    b = cert_search(3, 1, 3, mode="random", budget=40, seed=9)
    assert [C.D for C in a.certificates] == [C.D for C in b.certificates]


def test_search_rejects_bad_mode():
    with pytest.raises(ValueError):
        cert_search(3, 1, 3, mode="bogus")


def test_constant_path_products_are_skipped():
    # degrees 0,1,2 force constant superdiagonal entries, so condition ii cannot hold
    rep = cert_search(3, 1, 3, c=[0, 1, 2])
    assert rep.conclusive and rep.certificates == []
