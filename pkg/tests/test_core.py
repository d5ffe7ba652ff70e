import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nnorm import linalg
from nnorm.core import (
    DeterminantNorm,
    NNormError,
    PolyCoeffProductNorm,
    Polynomial,
    ProductMaxNorm,
    ProductPair,
    ProductSumNorm,
    SignedDeterminantNorm,
    ball_contains,
    check_axioms,
    eval_nnorm,
    is_linearly_dependent,
    make_norm,
    random_tuples,
    standard_anchor_sets,
)
from nnorm.serialize import decode_element, decode_norm, dumps, encode_element

from oracles import cofactor_vector_oracle, det_cofactor, poly_coeff_product_oracle, rank_exact

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


# --- linear algebra against the oracles -------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: arrays(float, (n, n), elements=finite)))
def test_det_matches_cofactor_expansion(m):
    got = float(linalg.det(m[None])[0])
    want = det_cofactor(m)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-9 * max(1.0, np.max(np.abs(m))) ** len(m))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: arrays(float, (n - 1, n), elements=finite)),
       st.integers(0, 2**31 - 1))
def test_cofactor_vector_expands_determinant(anchors, seed):
    v = linalg.cofactor_vector(anchors)
    np.testing.assert_allclose(v, cofactor_vector_oracle(anchors), rtol=1e-12, atol=1e-9)
    x = np.random.default_rng(seed).standard_normal(anchors.shape[1])
    assert float(v @ x) == pytest.approx(det_cofactor(np.vstack([x, anchors])), rel=1e-9, abs=1e-7)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1), st.integers(0, 3))
def test_rank_matches_exact_rank_on_integer_matrices(rows, cols, seed, drop):
    rng = np.random.default_rng(seed)
    m = rng.integers(-3, 4, size=(rows, cols)).astype(float)
    if drop and rows > 1:
        m[-1] = m[0] * 2 - (m[1] if rows > 2 else 0)
    assert int(linalg.rank(m)) == rank_exact(m)


# --- evaluation --------------------------------------------------------------


def test_determinant_examples():
    N = DeterminantNorm(2)
    assert eval_nnorm(N, [np.array([1.0, 0]), np.array([0.0, 1])]) == 1.0
    assert eval_nnorm(N, [np.array([1.0, 0]), np.array([2.0, 0])]) == 0.0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_determinant_agrees_with_cofactor_oracle(n):
    rng = np.random.default_rng(n)
    N = DeterminantNorm(n)
    for _ in range(50):
        rows = rng.standard_normal((n, n))
        assert N(list(rows)) == pytest.approx(abs(det_cofactor(rows)), rel=1e-12)


def test_poly_coeff_product_examples():
    N = PolyCoeffProductNorm(2)
    assert N([Polynomial([1, 2]), Polynomial([0, 1])]) == 2.0
    assert N([Polynomial([1, 1]), Polynomial([2, 2])]) == 0.0


@pytest.mark.parametrize("k", [0, 1, 5, 20])
def test_ones_polynomial_against_constant_scalars(k):
    # with constant anchors entering multiplicatively the witness has value |b2 b3|
    from nnorm.functional import BAnchors

    anchors = BAnchors.constants(PolyCoeffProductNorm(3, 32), [2.0, -1.5])
    assert anchors(Polynomial(np.ones(k + 1))) == pytest.approx(3.0, abs=0)


def test_poly_coeff_product_matches_oracle():
    N = PolyCoeffProductNorm(3, 6)
    rng = np.random.default_rng(1)
    for _ in range(100):
        polys = [rng.integers(-4, 5, size=rng.integers(1, 6)).astype(float) for _ in range(3)]
        got = N([Polynomial(p) for p in polys])
        assert got == poly_coeff_product_oracle(polys)


def test_product_norms_are_sum_and_max_of_components():
    X, Y = DeterminantNorm(2), DeterminantNorm(2)
    S, M = ProductSumNorm(X, Y), ProductMaxNorm(X, Y)
    rng = np.random.default_rng(5)
    for _ in range(50):
        L, R = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        pairs = [ProductPair(L[i], R[i]) for i in range(2)]
        a, b = X(list(L)), Y(list(R))
        assert S(pairs) == a + b
        assert M(pairs) == max(a, b)


def test_mixed_polynomial_product():
    S = ProductSumNorm(DeterminantNorm(2), PolyCoeffProductNorm(2, 4))
    pairs = [ProductPair(np.array([1.0, 0]), Polynomial([1, 2])), ProductPair(np.array([0.0, 1]), Polynomial([0, 1]))]
    assert S(pairs) == 1.0 + 2.0


def test_errors_name_the_offending_entry():
    N = DeterminantNorm(2)
    with pytest.raises(NNormError, match="entry 1"):
        N([np.array([1.0, 0]), np.array([1.0, 0, 0])])
    with pytest.raises(NNormError):
        N([np.array([1.0, np.nan]), np.array([0.0, 1])])
    with pytest.raises(NNormError):
        N([np.array([1.0, 0])])
    with pytest.raises(NNormError):
        ProductSumNorm(DeterminantNorm(2), DeterminantNorm(3))


# --- dependence --------------------------------------------------------------


def test_dependence_examples():
    v = is_linearly_dependent([np.array([1.0, 0]), np.array([0.0, 1])])
    assert not v.dependent and v.rank == 2
    v = is_linearly_dependent([np.array([1.0, 2]), np.array([2.0, 4])])
    assert v.dependent and v.rank == 1
    assert is_linearly_dependent([Polynomial([1, 1]), Polynomial([2, 2])]).dependent
    with pytest.raises(NNormError):
        is_linearly_dependent([])


@settings(max_examples=100, deadline=None)
@given(arrays(float, (3, 3), elements=st.integers(-3, 3).map(float)))
def test_dependence_verdict_matches_exact_rank(m):
    v = is_linearly_dependent(list(m))
    assert v.rank == rank_exact(m)
    assert v.dependent == (v.rank < 3)


# --- polynomials -------------------------------------------------------------


def test_polynomial_degree_trims_small_trailing_coefficients():
    p = Polynomial([1, 2, 0, 1e-13])
    assert p.degree == 1
    assert p == Polynomial([1, 2])
    assert (p + Polynomial([0, 0, 3])).degree == 2
    assert (2 * p)(1.0) == pytest.approx(6.0)
    with pytest.raises(NNormError):
        Polynomial([1, np.inf])


# --- axioms ------------------------------------------------------------------


@pytest.mark.parametrize("norm", [
    DeterminantNorm(2),
    DeterminantNorm(3),
    PolyCoeffProductNorm(2, 6),
    PolyCoeffProductNorm(3, 6),
    ProductSumNorm(DeterminantNorm(2), DeterminantNorm(2)),
    ProductMaxNorm(DeterminantNorm(3), DeterminantNorm(3)),
], ids=lambda n: f"{n.kind}-{n.arity}")
def test_axioms_on_seeded_tuples(norm):
    report = check_axioms(norm, random_tuples(norm, 500, seed=42))
    assert report.ok, report.violations[:3]


def test_axioms_hold_on_deliberately_dependent_determinant_tuples():
    N = DeterminantNorm(3)
    report = check_axioms(N, random_tuples(N, 300, seed=3, dependent_fraction=0.3))
    assert report.ok


def test_homogeneity_example():
    N = DeterminantNorm(2)
    a = N([np.array([-3.0, -6]), np.array([0.0, 1])])
    assert a == 3 * N([np.array([1.0, 2]), np.array([0.0, 1])])


def test_signed_determinant_breaks_homogeneity():
    N = SignedDeterminantNorm(2)
    report = check_axioms(N, random_tuples(N, 20, seed=1))
    assert not report.ok
    assert report.checks["N3"] > 0
    assert any(v.axiom == "N3" for v in report.violations)


def test_coefficient_norm_triangle_fails_on_dependent_tuples():
    # documented defect: ||1, 1|| = 0 but ||1 + 0.01 t, 1|| = 1 > 0 + 0.01
    N = PolyCoeffProductNorm(2, 4)
    one, y = Polynomial([1.0]), Polynomial([0, 0.01])
    lhs = N([one + y, one])
    rhs = N([one, one]) + N([y, one])
    assert lhs == 1.0 and rhs == pytest.approx(0.01)
    report = check_axioms(N, [[one, one], [y, one]])
    assert report.checks["N4"] == 1


def test_product_norm_nullity_fails_on_mixed_degenerate_pairs():
    # documented defect: both component tuples are dependent although the pairs are independent
    S = ProductSumNorm(DeterminantNorm(2), DeterminantNorm(2))
    e, z = np.array([1.0, 0]), np.zeros(2)
    pairs = [ProductPair(e, z), ProductPair(z, e)]
    assert S(pairs) == 0.0
    assert not is_linearly_dependent(pairs).dependent
    assert check_axioms(S, [pairs]).checks["N1"] == 1


# --- balls -------------------------------------------------------------------


def test_ball_membership_examples():
    N = DeterminantNorm(2)
    b = [np.array([0.0, 1])]
    c = np.zeros(2)
    assert ball_contains(N, b, c, 0.5, c)
    assert not ball_contains(N, b, c, 1.0, np.array([2.0, 0]))
    assert ball_contains(N, b, c, 2.0, np.array([2.0, 0]), open=False)
    assert not ball_contains(N, b, c, 2.0, np.array([2.0, 0]), open=True)
    with pytest.raises(NNormError):
        ball_contains(N, b, c, 0.0, c)


def test_standard_anchor_sets():
    assert len(standard_anchor_sets(DeterminantNorm(3))) == 3
    sets = standard_anchor_sets(ProductSumNorm(DeterminantNorm(2), DeterminantNorm(2)))
    assert all(isinstance(s[0], ProductPair) for s in sets)


# --- serialization -----------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=6))
def test_float_round_trip(values):
    import json

    x = np.array(values)
    back = decode_element(json.loads(dumps(encode_element(x))))
    assert np.array_equal(back, x)


def test_norm_round_trip():
    for norm in [DeterminantNorm(3), PolyCoeffProductNorm(2, 5),
                 ProductMaxNorm(DeterminantNorm(2), PolyCoeffProductNorm(2, 3))]:
        back = decode_norm(norm.to_dict())
        assert back.to_dict() == norm.to_dict()
    assert make_norm("determinant", 2).kind == "determinant"
    with pytest.raises(NNormError):
        decode_norm({"arity": 2})
