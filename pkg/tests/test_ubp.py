import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnorm.core import DeterminantNorm, NNormError, Polynomial
from nnorm.functional import (
    BAnchors,
    BLinearFunctional,
    DeterminantForm,
    PreconditionError,
    WeightForm,
    check_b_linearity,
    cofactor,
    exact_norm_determinant,
    random_pairs,
)
from nnorm.ubp import (
    EpsNet,
    FunctionalFamily,
    cauchy_family_bound,
    growth_refutes_bound,
    ones_witness,
    partial_sum_family,
    partial_sum_pointwise_cap,
    partial_sum_witness,
    pointwise_bounds,
    pointwise_limit_functional,
    scaled_family,
    uniform_bound_refutation,
    uniform_convergence_on_net,
    weakstar_check,
)

E2 = BAnchors(DeterminantNorm(2), [np.array([0.0, 1.0])])
T1 = BLinearFunctional(E2, DeterminantForm(1.0))
BASIS2 = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]


def random_polys(seed, count=20, max_degree=10):
    rng = np.random.default_rng(seed)
    return [Polynomial(rng.uniform(-5, 5, rng.integers(1, max_degree + 2))) for _ in range(count)]


# --- pointwise and uniform bounds --------------------------------------------


def test_pointwise_bounds_examples():
    zero = FunctionalFamily([BLinearFunctional(E2, WeightForm(np.zeros(2)))] * 3)
    assert set(pointwise_bounds(zero, BASIS2).per_point_bounds.values()) == {0.0}
    single = FunctionalFamily([T1])
    assert pointwise_bounds(single, [np.array([1.0, 0.0])]).per_point_bounds[0] == 1.0


@pytest.mark.parametrize("b", [(1.0,), (2.0, -0.5), (0.3, 3.0, 1.5)])
def test_partial_sums_respect_the_pointwise_cap(b):
    fam = partial_sum_family(50, b, kmin=0)
    points = random_polys(1)
    report = pointwise_bounds(fam, points)
    for i, x in enumerate(points):
        assert report.per_point_bounds[i] <= partial_sum_pointwise_cap(x, b) * (1 + 1e-12)


def test_partial_sum_ladder_with_the_ones_witness():
    fam = partial_sum_family(50, (1.0,), kmin=0)
    report = uniform_bound_refutation(fam, partial_sum_witness)
    lowers = [e.lower for e in report.per_member_norm_lower]
    assert lowers == [k + 1.0 for k in range(51)]
    assert report.uniform_bound_refuted
    assert report.uniform_lower == max(lowers) == 51.0


def test_partial_sum_witness_value():
    from nnorm.core import PolyCoeffProductNorm

    anchors = BAnchors.constants(PolyCoeffProductNorm(3, 16), [2.0, -3.0])
    assert anchors(ones_witness(7)) == 6.0


def test_constant_family_is_not_refuted():
    report = uniform_bound_refutation(FunctionalFamily([T1] * 10))
    assert not report.uniform_bound_refuted
    assert report.uniform_lower == 1.0


def test_linearly_growing_family_is_refuted():
    fam = FunctionalFamily(scaled_family(T1, range(1, 21)))
    report = uniform_bound_refutation(fam)
    assert [e.exact for e in report.per_member_norm_lower] == [float(k) for k in range(1, 21)]
    assert report.uniform_bound_refuted


def test_growth_rule():
    assert growth_refutes_bound([1, 2, 3, 4, 5])
    assert growth_refutes_bound([float(k) for k in range(20)])
    assert not growth_refutes_bound([2 - 2.0 ** -k for k in range(20)])
    assert not growth_refutes_bound([1 - 1 / k for k in range(1, 51)])
    assert not growth_refutes_bound([1, 1, 1, 1])
    assert not growth_refutes_bound([1, 2])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 8))
def test_uniform_bound_implies_pointwise_bound(seed, members):
    rng = np.random.default_rng(seed)
    A = BAnchors(DeterminantNorm(3), list(rng.standard_normal((2, 3))))
    cs = rng.uniform(-3, 3, members)
    fam = FunctionalFamily([BLinearFunctional(A, DeterminantForm(c)) for c in cs])
    K = max(exact_norm_determinant(T).exact for T in fam)
    points = list(rng.standard_normal((10, 3)))
    report = pointwise_bounds(fam, points)
    for i, x in enumerate(points):
        assert report.per_point_bounds[i] <= K * A(x) + 1e-9


def test_family_needs_shared_anchors():
    other = BAnchors(DeterminantNorm(2), [np.array([1.0, 1.0])])
    with pytest.raises(NNormError):
        FunctionalFamily([T1, BLinearFunctional(other, DeterminantForm(1.0))])
    with pytest.raises(NNormError):
        FunctionalFamily([])


# --- uniform convergence on nets ---------------------------------------------


def unit_net(count=5):
    angles = np.linspace(0.1, np.pi - 0.1, count)
    return [np.array([np.cos(a), np.sin(a)]) for a in angles]


def test_net_convergence_constant_family():
    rep = uniform_convergence_on_net([T1] * 5, T1, EpsNet(unit_net(), 0.1), member_norm_cap=1.0)
    assert rep.net_sup == [0.0] * 5


def test_net_convergence_inverse_k():
    net = unit_net()
    fam = scaled_family(T1, [1 + 1 / k for k in range(1, 21)])
    rep = uniform_convergence_on_net(fam, T1, EpsNet(net, 0.05), member_norm_cap=2.0)
    center_vals = max(abs(T1(c)) for c in net)
    for k, s in enumerate(rep.net_sup, start=1):
        assert s == pytest.approx(center_vals / k, rel=1e-12)
    assert rep.converging
    assert rep.propagated_bound[-1] == pytest.approx(rep.net_sup[-1] + (2.0 + 1.0 + 1.0) * 0.05)


def test_net_convergence_alternating_family():
    fam = scaled_family(T1, [(-1.0) ** k for k in range(10)])
    rep = uniform_convergence_on_net(fam, T1, EpsNet(unit_net(), 0.1), member_norm_cap=1.0)
    assert not rep.converging


def test_net_cap_violation_names_the_member():
    fam = scaled_family(T1, [1.0, 5.0])
    with pytest.raises(PreconditionError, match=r"5\*T\[1\]"):
        uniform_convergence_on_net(fam, T1, EpsNet(unit_net(), 0.1), member_norm_cap=2.0)
    with pytest.raises(NNormError):
        EpsNet(unit_net(), 0.0)


def test_net_bound_covers_the_whole_set():
    # points within the net radius of a center obey the propagated bound
    rng = np.random.default_rng(2)
    A = BAnchors(DeterminantNorm(2), [np.array([0.3, 1.0])])
    T = BLinearFunctional(A, DeterminantForm(1.0))
    net = [rng.uniform(-1, 1, 2) for _ in range(6)]
    radius = 0.05
    fam = scaled_family(T, [1 + 0.5 / k for k in range(1, 11)])
    rep = uniform_convergence_on_net(fam, T, EpsNet(net, radius), member_norm_cap=1.5)
    v = cofactor(A)
    for k, Tk in enumerate(fam):
        worst = 0.0
        for c in net:
            # move off the center along the norm-measured direction, staying within the radius
            for t in np.linspace(-0.999, 0.999, 41):
                x = c + radius * t * v / (v @ v)
                assert A(x - c) < radius
                worst = max(worst, abs(Tk(x) - T(x)))
        assert worst <= rep.propagated_bound[k]


# --- Cauchy families and pointwise limits ------------------------------------


def test_cauchy_family_examples():
    fam = FunctionalFamily(scaled_family(T1, [1 + 2.0 ** -k for k in range(1, 41)]))
    rep = cauchy_family_bound(fam, BASIS2)
    assert all(p["cauchy"] for p in rep.cauchy_points.values())
    assert rep.uniform_lower <= 2.0 and not rep.uniform_bound_refuted
    fam = FunctionalFamily(scaled_family(T1, range(1, 41)))
    rep = cauchy_family_bound(fam, [np.array([1.0, 0.0])])
    assert not rep.cauchy_points[0]["cauchy"]
    zero = FunctionalFamily([BLinearFunctional(E2, WeightForm(np.zeros(2)))] * 5)
    rep = cauchy_family_bound(zero, BASIS2)
    assert all(p["cauchy"] for p in rep.cauchy_points.values()) and rep.uniform_lower == 0.0


def test_pointwise_limit_examples():
    fam = scaled_family(T1, [1 + 1 / k for k in range(1, 201)])
    T = pointwise_limit_functional(fam, BASIS2, tol=1e-2, extrapolation="inverse_k")
    np.testing.assert_allclose(T.action.w, cofactor(E2), atol=1e-9)
    fam = scaled_family(T1, [1 + 2.0 ** -k for k in range(1, 41)])
    T = pointwise_limit_functional(fam, BASIS2)
    np.testing.assert_allclose(T.action.w, cofactor(E2), atol=1e-9)
    W = BLinearFunctional(E2, WeightForm(np.array([2.0, 0.0])))
    T = pointwise_limit_functional([W] * 5, BASIS2)
    np.testing.assert_array_equal(T.action.w, W.action.w)


def test_pointwise_limit_rejects_oscillation():
    fam = scaled_family(T1, [(-1.0) ** k for k in range(20)])
    with pytest.raises(PreconditionError, match="basis element 0"):
        pointwise_limit_functional(fam, BASIS2)


def test_pointwise_limit_is_linear_and_bounded():
    rng = np.random.default_rng(6)
    A = BAnchors(DeterminantNorm(3), list(rng.standard_normal((2, 3))))
    base = BLinearFunctional(A, DeterminantForm(1.5))
    fam = scaled_family(base, [1 - 2.0 ** -k for k in range(1, 45)])
    T = pointwise_limit_functional(fam, list(np.eye(3)))
    assert check_b_linearity(T, random_pairs(A.norm, 100, seed=1)).ok
    X = rng.standard_normal((1000, 3))
    assert np.all(np.abs(T.values(X)) <= T.bound * A.norm_coords(X) + 1e-9)


# --- weak* -------------------------------------------------------------------


def test_weakstar_examples():
    fam = scaled_family(T1, [1 + 2.0 ** -k for k in range(1, 41)])
    rep = weakstar_check(fam, T1, BASIS2, BASIS2)
    assert rep.norms_bounded and rep.cauchy_on_total_set and rep.converges_to_candidate and rep.agrees
    wrong = T1.scaled(2.0)
    rep = weakstar_check(fam, wrong, BASIS2, BASIS2)
    assert rep.norms_bounded and rep.cauchy_on_total_set and not rep.converges_to_candidate
    rep = weakstar_check([T1] * 6, T1, BASIS2, BASIS2)
    assert rep.agrees and rep.max_cauchy_gap == 0.0 and rep.max_residual == 0.0


def test_weakstar_divergent_family_agrees_on_failure():
    fam = scaled_family(T1, range(1, 30))
    rep = weakstar_check(fam, T1, BASIS2, BASIS2)
    assert not rep.conditions_hold and not rep.converges_to_candidate and rep.agrees


def test_weakstar_requires_spanning_total_set():
    with pytest.raises(NNormError):
        weakstar_check([T1] * 3, T1, [np.array([1.0, 0.0])], BASIS2)
