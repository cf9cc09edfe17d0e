import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdgkit.certify import cert_jordan_type
from pdgkit.field import field_make
from pdgkit.groupchain import (GComplex, gc_flatten, gc_free, gc_homology, gc_iota, gc_loewy_length, gc_torus,
                               random_perfect_complex)
from pdgkit.linalg import rank
from pdgkit.ncomplex import ncx_homology, ncx_is_acyclic, ncx_string_decompose
from pdgkit.pdg import (PDGModule, PDGMorphism, kg_koszul_grading, koszul_beta_order, pdg_beta, pdg_cone,
                        pdg_composition_series, pdg_d1, pdg_fiber, pdg_first_failure, pdg_homology,
                        pdg_homology_acomplex, pdg_koszul, pdg_minimal_model, pdg_nullhomotopy_xp,
                        pdg_permute, pdg_validate, pdg_zero, strictly_upper)
from pdgkit.poly import MultiPoly, PolyMatrix, polymatrix_inverse
from pdgkit.selftest import check_d1_action, check_minimal_model

from oracles import jordan_type_brute, koszul_homology_oracle, rank_mod_p

F3 = field_make(3)
seeds = st.integers(0, 2**32 - 1)


def xvar(F, n, t):
    return MultiPoly.var(F, n, t)


def beta_iota(C):
    return pdg_beta(gc_iota(C))


# -- validation --------------------------------------------------------------------------

def test_zero_differential_valid():
    assert pdg_validate(PDGModule(3, 2, F3, [0, 1, 5]))


def test_single_jordan_block_of_x():
    x = xvar(F3, 1, 0)
    D = PolyMatrix.from_entries(F3, 1, [[0, x, 0], [0, 0, x], [0, 0, 0]])
    assert pdg_validate(PDGModule(3, 1, F3, [0, 0, 0], D))


def test_cubic_power_is_rejected():
    x = xvar(F3, 1, 0)
    D = PolyMatrix.from_entries(F3, 1, [[0, x, 0, 0], [0, 0, x, 0], [0, 0, 0, x], [0, 0, 0, 0]])
    M = PDGModule(3, 1, F3, [0, 0, 0, 0], D, check=False)
    assert not pdg_validate(M)
    assert "nilpotent" in pdg_first_failure(M) or "D^3" in pdg_first_failure(M)


def test_wrong_entry_degree_rejected():
    x = xvar(F3, 1, 0)
    D = PolyMatrix.from_entries(F3, 1, [[0, x * x], [0, 0]])
    with pytest.raises(ValueError):
        PDGModule(3, 1, F3, [0, 0], D)


# -- Koszul complexes ----------------------------------------------------------------------

def test_koszul_one_variable_shape():
    K = pdg_koszul(3, None, 3, 1)
    assert {i: len(g) for i, g in K.gens.items()} == {0: 1, 1: 1, 2: 1}
    x = PolyMatrix.from_entries(F3, 1, [[xvar(F3, 1, 0)]])
    assert K.dmat(1) == x and K.dmat(2) == x


def test_koszul_two_variables_matrices():
    K = pdg_koszul(3, None, 3, 2)
    assert [len(K.gens[i]) for i in range(5)] == [1, 2, 3, 2, 1]
    x, y = xvar(F3, 2, 0), xvar(F3, 2, 1)
    assert K.dmat(4) == PolyMatrix.from_entries(F3, 2, [[y], [x]])
    assert K.dmat(3) == PolyMatrix.from_entries(F3, 2, [[y, 0], [x, y], [0, x]])
    assert K.dmat(2) == PolyMatrix.from_entries(F3, 2, [[x, y, 0], [0, x, y]])
    assert K.dmat(1) == PolyMatrix.from_entries(F3, 2, [[x, y]])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_classical_koszul_ranks(n):
    K = pdg_koszul(2, None, 5, n)
    assert [len(K.gens[i]) for i in range(n + 1)] == [len(list(itertools.combinations(range(n), i)))
                                                      for i in range(n + 1)]
    M = K.to_pdg()
    assert pdg_validate(M)
    assert not M.dpow(2).coeffs or M.dpow(2).is_zero()


def test_example_43_homology():
    K = pdg_koszul(3, None, 3, 2)
    assert pdg_homology_acomplex(K, 1) == [3, 1, 0, 0, 0]
    assert pdg_homology_acomplex(K, 2) == [1, 3, 0, 0, 0]


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1), (5, 2), (2, 3)])
def test_koszul_homology_matches_oracle(p, n):
    K = pdg_koszul(p, None, p, n)
    for s in range(1, p):
        assert pdg_homology_acomplex(K, s) == koszul_homology_oracle(p, n, s)


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1)])
def test_koszul_homology_certified(p, n):
    M = pdg_koszul(p, None, p, n).to_pdg()
    for s in range(1, p):
        assert pdg_homology(M, s).certified


def test_homology_cutoff_above_generators():
    M = pdg_koszul(3, None, 3, 1).to_pdg()
    with pytest.raises(ValueError, match="cutoff"):
        pdg_homology(M, 1, cutoff=1)


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 2)])
def test_nullhomotopy(p, n):
    K = pdg_koszul(p, None, p, n)
    for i in range(n):
        w = pdg_nullhomotopy_xp(K, i)
        assert w.verified


def test_nullhomotopy_one_variable_is_identity_in_degree_zero():
    w = pdg_nullhomotopy_xp(pdg_koszul(3, None, 3, 1), 0)
    nz = [k for k, h in w.h.items() if not h.is_zero()]
    assert nz == [0]
    assert w.h[0] == PolyMatrix.identity(F3, 1, 1)


def test_nullhomotopy_guard():
    K = pdg_koszul(3, [0], 3, 2)
    with pytest.raises(ValueError):
        pdg_nullhomotopy_xp(K, 1)
    bad = K.__class__(K.field, K.n, K.N, K.gens, K.d)
    with pytest.raises(ValueError, match="unsupported"):
        pdg_nullhomotopy_xp(bad, 0)


# -- β ------------------------------------------------------------------------------------

@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1)])
def test_beta_of_group_algebra_is_koszul(p, n):
    B = pdg_beta(gc_free(p, n))
    assert B.ell == p**n and set(B.c) == {0}
    assert all(sum(e) == 1 for e in B.D.coeffs if B.D.coeffs[e].any())
    K = pdg_koszul(p, None, p, n).to_pdg()
    P = pdg_permute(B, koszul_beta_order(p, n))
    assert P.c == K.c and P.D == K.D
    assert [kg_koszul_grading(p, n)[g] for g in koszul_beta_order(p, n)] == K.secondary


def test_beta_of_iota_circle():
    from pdgkit.groupchain import gc_circle
    M = beta_iota(gc_circle(3, 1))
    assert M.ell == 9 and pdg_validate(M)
    assert sorted(set(M.c)) == [0, 1, 2]


def test_beta_of_zero():
    C = GComplex(F3, 3, 1, 2, {})
    assert pdg_beta(gc_iota(C)).ell == 0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2), (5, 1), (2, 2)]), seeds)
def test_beta_soundness_and_fiber_identity(pn, seed):
    p, n = pn
    C = random_perfect_complex(p, n, np.random.default_rng(seed), max_rank=2, width=4)
    iC = gc_iota(C)
    M = pdg_beta(iC)
    assert pdg_validate(M)
    for e, A in M.D.coeffs.items():
        for i, j in zip(*np.nonzero(A)):
            assert sum(e) == M.c[i] + 1 - M.c[j] and sum(e) in (0, 1)
    X, Y = pdg_fiber(M), gc_flatten(iC)
    assert X.dims == Y.dims
    assert all(np.array_equal(X.dmat(l), Y.dmat(l)) for l in X.dims)
    H = gc_homology(C)
    assert ncx_homology(X, 1).total() == sum(m.dim for m in H.values())


# -- fibers ----------------------------------------------------------------------------------

def test_koszul_fiber_at_unit_point():
    M = pdg_koszul(3, None, 3, 2).to_pdg()
    A = pdg_fiber(M, (1, 0))
    assert rank(F3, A) == 6 == rank_mod_p(A.tolist(), 3)
    assert cert_jordan_type(A, F3) == (3, 3, 3) == jordan_type_brute(A.tolist(), 3)


def test_fiber_of_zero_module():
    X = pdg_fiber(pdg_zero(3, 2))
    assert X.is_zero()


def test_fiber_point_length_checked():
    with pytest.raises(ValueError):
        pdg_fiber(pdg_zero(3, 2), (1,))


# -- cones -----------------------------------------------------------------------------------

def _projection_to_minimal(M):
    mm, P = pdg_minimal_model(M, return_basis=True)
    k = M.ell - mm.ell
    Pinv = polymatrix_inverse(P)
    return mm, PDGMorphism(M, mm, Pinv.submatrix(list(range(k, M.ell)), list(range(M.ell))))


def test_cone_of_identity_is_fiber_acyclic():
    M = beta_iota(gc_torus(1, 3))
    f = PDGMorphism(M, M, PolyMatrix.identity(F3, 1, M.ell))
    assert ncx_is_acyclic(pdg_fiber(pdg_cone(f)))


def test_cone_of_zero_source():
    N = beta_iota(gc_torus(1, 3))
    Z = pdg_zero(3, 1)
    cone = pdg_cone(PDGMorphism(Z, N, PolyMatrix.zeros(F3, 1, (N.ell, 0))))
    assert cone.c == N.c and cone.D == N.D


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2)]), seeds)
def test_cone_detects_quasi_isomorphisms(pn, seed):
    p, n = pn
    C = random_perfect_complex(p, n, np.random.default_rng(seed), max_rank=2, width=4)
    M = beta_iota(C)
    mm, pr = _projection_to_minimal(M)
    assert pr.failure() is None
    assert ncx_is_acyclic(pdg_fiber(pdg_cone(pr)))
    if mm.ell:
        zero = PDGMorphism(pdg_zero(p, n), mm, PolyMatrix.zeros(M.field, n, (mm.ell, 0)))
        assert not ncx_is_acyclic(pdg_fiber(pdg_cone(zero)))


def test_cone_rejects_non_morphism():
    M = beta_iota(gc_torus(1, 3))
    with pytest.raises(ValueError):
        pdg_cone(PDGMorphism(M, M, PolyMatrix.zeros(F3, 1, (M.ell, M.ell + 1))))


# -- minimal models ---------------------------------------------------------------------------

def test_contractible_block_minimizes_to_zero():
    D = PolyMatrix.constant(F3, 1, np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]]))
    M = PDGModule(3, 1, F3, [0, 1, 2], D)
    assert pdg_minimal_model(M).ell == 0


def test_minimal_input_is_unchanged_up_to_permutation():
    M = pdg_koszul(3, None, 3, 1).to_pdg()
    mm = pdg_minimal_model(M)
    assert mm.ell == M.ell
    assert any(pdg_permute(M, list(o)).D == mm.D and pdg_permute(M, list(o)).c == mm.c
               for o in itertools.permutations(range(M.ell)))


def test_torus1_minimal_model_size():
    M = beta_iota(gc_torus(1, 3))
    mm = pdg_minimal_model(M)
    # nine generators before, three after; see the ledger
    assert (M.ell, mm.ell) == (9, 3)
    sd = ncx_string_decompose(pdg_fiber(mm))
    assert sd.length_counts() == {2: 1, 1: 1}


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2), (5, 1), (2, 2)]), seeds)
def test_minimal_model_contract(pn, seed):
    p, n = pn
    assert check_minimal_model(np.random.default_rng(seed), p, n) == []


# -- d1 ---------------------------------------------------------------------------------------

def test_d1_vanishes_without_linear_part():
    D = PolyMatrix.constant(F3, 2, np.array([[0, 1], [0, 0]]))
    M = PDGModule(3, 2, F3, [0, 1], D)
    for s in (1, 2):
        for l in (0, 1, 2):
            assert all(not A.any() for A in pdg_d1(M, s, l))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2), (5, 1)]), seeds)
def test_d1_is_the_y_action(pn, seed):
    p, n = pn
    assert check_d1_action(np.random.default_rng(seed), p, n) == []


# -- composition series --------------------------------------------------------------------------

def _check_piece_shapes(cs):
    """Every step of the refined filtration is A[k] or the chain A v + ... + A d^{p-2} v."""
    M = cs.module
    p = M.p
    D0 = M.D
    for pc in cs.pieces:
        own = pc.columns
        later = [j for q in cs.pieces[cs.pieces.index(pc) + 1:] for j in q.columns]
        # nothing flows from a step into later steps
        assert all(D0.entry(i, j).is_zero() for j in own for i in later)
        if pc.kind == "A":
            assert D0.submatrix(own, own).is_zero()
        else:
            assert len(pc.columns) == pc.count * (p - 1)
            for b in range(pc.count):
                blk = pc.columns[b * (p - 1):(b + 1) * (p - 1)]
                sub = D0.submatrix(blk, blk)
                want = np.eye(p - 1, k=1, dtype=np.int64)
                assert sub == PolyMatrix.constant(M.field, M.n, want)


def test_composition_series_torus1():
    cs = pdg_composition_series(beta_iota(gc_torus(1, 3)))
    assert cs.module.ell == 3 and strictly_upper(cs.module.D)
    assert cs.length == 2 == cs.refined_length
    assert sorted(pc.kind for pc in cs.pieces) == ["A", "chain"]
    _check_piece_shapes(cs)


def test_composition_series_torus2():
    C = gc_torus(2, 3)
    cs = pdg_composition_series(beta_iota(C))
    assert cs.module.ell == 6 and strictly_upper(cs.module.D)
    H = gc_homology(C)
    # coarse length counts homogeneous socle steps, the refined one single classes
    assert cs.length == sum(gc_loewy_length(m) for m in H.values()) == 3
    assert cs.refined_length == 4
    _check_piece_shapes(cs)
    assert pdg_validate(cs.module)


def test_composition_series_of_acyclic_complex():
    F = F3
    one = PolyMatrix.identity(F, 1, 1, 3)
    C = GComplex(F, 3, 1, 2, {1: 1, 0: 1}, {1: one})
    cs = pdg_composition_series(beta_iota(C))
    assert cs.module.ell == 0 and cs.length == 0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2), (5, 1), (2, 2)]), seeds)
def test_composition_series_contract(pn, seed):
    p, n = pn
    C = random_perfect_complex(p, n, np.random.default_rng(seed), max_rank=2, width=4)
    H = gc_homology(C)
    cs = pdg_composition_series(beta_iota(C))
    assert strictly_upper(cs.module.D)
    assert cs.module.ell == sum((p - 1 if l % 2 == 0 else 1) * m.dim for l, m in H.items())
    assert cs.length == sum(gc_loewy_length(m) for m in H.values())
    assert cs.refined_length == sum(m.dim for m in H.values())
    _check_piece_shapes(cs)
