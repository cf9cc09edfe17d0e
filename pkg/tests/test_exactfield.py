import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdgkit.field import FieldElem, embedding, field_arith, field_make
from pdgkit.linalg import extend_basis, inverse, nullspace, rank, rref, solve
from pdgkit.poly import MultiPoly, PolyMatrix, poly_eval, poly_is_homogeneous, polymatrix_inverse

from oracles import is_irreducible_brute, rank_mod_p

FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (5, 2)]


def elem(F, v):
    return FieldElem(F, v)


# -- construction -----------------------------------------------------------------

def test_prime_field_residues():
    F = field_make(3, 1)
    assert F.order == 3 and list(F.elements()) == [0, 1, 2]


def test_f4_modulus_is_t2_t_1():
    assert field_make(2, 2).modulus == (1, 1, 1)


@pytest.mark.parametrize("p,m", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_modulus_is_least_irreducible(p, m):
    irr = [c + (1,) for c in itertools.product(range(p), repeat=m) if is_irreducible_brute(list(c) + [1], p)]
    F = field_make(p, m)
    assert is_irreducible_brute(list(F.modulus), p)
    # ordered by (a_{m-1}, ..., a_0), the coefficients below the leading one
    assert F.modulus == min(irr, key=lambda c: tuple(reversed(c[:-1])))


def test_non_prime_rejected():
    with pytest.raises(ValueError, match="not prime"):
        field_make(4, 1)


def test_zero_degree_rejected():
    with pytest.raises(ValueError):
        field_make(3, 0)


# -- arithmetic ---------------------------------------------------------------------

def test_f3_addition():
    F = field_make(3)
    assert field_arith(elem(F, 2), elem(F, 2), "add") == elem(F, 1)


def test_f4_t_squared():
    F = field_make(2, 2)
    t = elem(F, F.from_coeffs([0, 1]))
    assert (t * t).coeffs == (1, 1)


def test_inverse_of_zero():
    F = field_make(5)
    with pytest.raises(ZeroDivisionError):
        field_arith(elem(F, 0), None, "inv")


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        elem(field_make(3), 1) + elem(field_make(3, 2), 1)


def _brute_mul(F, a, b):
    """Schoolbook product of coefficient vectors reduced by the modulus."""
    p, m = F.p, F.m
    x, y = F.coeffs(a), F.coeffs(b)
    prod = [0] * (2 * m - 1)
    for i, u in enumerate(x):
        for j, v in enumerate(y):
            prod[i + j] = (prod[i + j] + u * v) % p
    mod = list(F.modulus)
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for i in range(m + 1):
                prod[k - m + i] = (prod[k - m + i] - c * mod[i]) % p
    return F.from_coeffs(prod[:m])


@pytest.mark.parametrize("p,m", FIELDS)
def test_multiplication_table_matches_schoolbook(p, m):
    F = field_make(p, m)
    for a in F.elements():
        for b in F.elements():
            assert int(F.mul(a, b)) == _brute_mul(F, a, b)


@pytest.mark.parametrize("p,m", FIELDS)
def test_every_nonzero_element_invertible(p, m):
    F = field_make(p, m)
    for a in range(1, F.order):
        assert int(F.mul(a, F.inv(a))) == 1


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (5, 1), (7, 2)])
def test_frobenius_fixes_everything(p, m):
    F = field_make(p, m)
    a = F.random(np.random.default_rng(0), (2000,))
    assert np.array_equal(F.power(a, F.order), a)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(pm, data):
    F = field_make(*pm)
    a, b, c = (elem(F, data.draw(st.integers(0, F.order - 1))) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a and a + b == b + a
    assert a - a == elem(F, 0)
    if a:
        assert a * a.inverse() == elem(F, 1)


@pytest.mark.parametrize("small,big", [((3, 1), (3, 2)), ((2, 2), (2, 4)), ((3, 2), (3, 4))])
def test_embedding_is_a_ring_map(small, big):
    S, B = field_make(*small), field_make(*big)
    e = embedding(S, B)
    for a in S.elements():
        for b in S.elements():
            assert e[int(S.add(a, b))] == int(B.add(e[a], e[b]))
            assert e[int(S.mul(a, b))] == int(B.mul(e[a], e[b]))


# -- linear algebra -------------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_matches_oracle(p, r, c, data):
    F = field_make(p)
    A = np.array(data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
                                    min_size=r, max_size=r)), dtype=np.int64)
    assert rank(F, A) == rank_mod_p(A.tolist(), p)
    K = nullspace(F, A)
    assert K.shape[1] == c - rank_mod_p(A.tolist(), p)
    assert not F.matmul(A, K).any()


def test_rref_small():
    R, piv = rref(field_make(3), np.array([[1, 2], [2, 1]]))
    assert piv == [0] and R.tolist() == [[1, 2], [0, 0]]


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(3, 1), (2, 2), (5, 1)]), st.integers(1, 4), st.integers(0, 10**6))
def test_solve_and_inverse(pm, n, seed):
    F = field_make(*pm)
    rng = np.random.default_rng(seed)
    A = F.random(rng, (n, n))
    x = F.random(rng, (n,))
    b = F.matmul(A, x[:, None])[:, 0]
    y = solve(F, A, b)
    assert y is not None and np.array_equal(F.matmul(A, y[:, None])[:, 0], b)
    if rank(F, A) == n:
        assert np.array_equal(F.matmul(A, inverse(F, A)), np.eye(n, dtype=np.int64))


def test_solve_inconsistent():
    F = field_make(3)
    assert solve(F, np.array([[1, 0], [1, 0]]), np.array([0, 1])) is None


def test_extend_basis_reaches_full_rank():
    F = field_make(3)
    base = np.array([[1], [1], [0]])
    cand = np.eye(3, dtype=np.int64)
    pick = extend_basis(F, base, cand)
    assert rank(F, np.hstack([base, cand[:, pick]])) == 3 and len(pick) == 2


# -- polynomials ------------------------------------------------------------------------

def _x(F, n, i):
    return MultiPoly.var(F, n, i)


def test_eval_examples():
    F = field_make(3)
    x1, x2 = _x(F, 2, 0), _x(F, 2, 1)
    assert poly_eval(x1 * x2, [1, 1]) == elem(F, 1)
    assert poly_eval(x1 * x1 + x2, [1, 2]) == elem(F, 0)
    for pt in itertools.product(range(3), repeat=2):
        assert poly_eval(MultiPoly.constant(F, 2, 2), pt) == elem(F, 2)


def test_eval_dimension_mismatch():
    F = field_make(3)
    with pytest.raises(ValueError):
        poly_eval(_x(F, 2, 0), [1])


def test_homogeneity_examples():
    F = field_make(3)
    x1, x2 = _x(F, 2, 0), _x(F, 2, 1)
    assert poly_is_homogeneous(x1 * x2, 2)
    assert not poly_is_homogeneous(x1 + x2 * x2, 1)
    assert poly_is_homogeneous(MultiPoly.zero(F, 2), 7)


def test_no_zero_coefficients_stored():
    F = field_make(3)
    x1 = _x(F, 1, 0)
    f = x1 + x1 + x1
    assert f.is_zero() and f.terms == {}


def _rand_poly(F, n, draw):
    terms = draw(st.dictionaries(st.tuples(*[st.integers(0, 3)] * n), st.integers(0, F.order - 1), max_size=4))
    return MultiPoly(F, n, terms)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([(3, 1), (2, 2), (5, 1)]), st.data())
def test_poly_ring_and_eval_homomorphism(pm, data):
    F = field_make(*pm)
    n = 2
    f, g, h = (_rand_poly(F, n, data.draw) for _ in range(3))
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    x = [data.draw(st.integers(0, F.order - 1)) for _ in range(n)]
    assert poly_eval(f * g, x) == poly_eval(f, x) * poly_eval(g, x)
    assert poly_eval(f + g, x) == poly_eval(f, x) + poly_eval(g, x)


def test_eval_in_extension_field():
    F, G = field_make(3), field_make(3, 2)
    f = _x(F, 1, 0) * _x(F, 1, 0) + 1
    i = G.from_coeffs([0, 1])  # t with t^2 = -1
    assert f.eval([i], G) == FieldElem(G, 0)


def test_polymatrix_inverse_unipotent():
    F = field_make(3)
    x = _x(F, 1, 0)
    one = MultiPoly.constant(F, 1, 1)
    M = PolyMatrix.from_entries(F, 1, [[one, x, x * x], [0, one, x], [0, 0, one]])
    Minv = polymatrix_inverse(M)
    assert M @ Minv == PolyMatrix.identity(F, 1, 3)
