import numpy as np
import pytest

from nnorm.core import DeterminantNorm, NNormError, PolyCoeffProductNorm, Polynomial
from nnorm.sequences import SequenceSample, check_cauchy, check_closed_graph, check_convergence

N2 = DeterminantNorm(2)
B = [[np.array([0.0, 1.0])]]


def test_constant_sequence_converges():
    x = np.array([1.0, 2.0])
    r = check_convergence(N2, SequenceSample([x] * 20, B), x)
    assert r.converged and r.max_tail_norm == 0.0 and r.evidence_only


def test_inverse_k_sequence_converges():
    terms = [np.array([1.0 / k, 0.0]) for k in range(1, 1001)]
    r = check_convergence(N2, SequenceSample(terms, B), np.zeros(2), tol=1e-2, include_standard=False)
    assert r.converged
    assert r.max_tail_norm == pytest.approx(1 / 501, rel=1e-12)


def test_alternating_sequence_does_not_converge():
    terms = [(-1.0) ** k * np.array([1.0, 0.0]) for k in range(100)]
    r = check_convergence(N2, SequenceSample(terms, B), np.zeros(2))
    assert not r.converged and r.max_tail_norm == 1.0


def test_cauchy_examples():
    x = np.array([1.0, 2.0])
    assert check_cauchy(N2, SequenceSample([x] * 10, B)).converged
    partial = np.cumsum([2.0 ** -k for k in range(1, 60)])
    assert check_cauchy(N2, SequenceSample([np.array([s, 0.0]) for s in partial], B), tol=1e-6).converged
    assert not check_cauchy(N2, SequenceSample([np.array([float(k), 0.0]) for k in range(50)], B)).converged


def test_geometric_sequences_meet_their_analytic_tail_bound():
    for ratio in (0.5, 0.8, 0.9):
        terms = [np.array([ratio ** k, -2 * ratio ** k]) for k in range(200)]
        bound = 2 * ratio ** 100  # largest tail entry, maximised over standard anchors
        assert check_convergence(N2, SequenceSample(terms), np.zeros(2), tol=bound * (1 + 1e-12)).converged


def test_polynomial_sequences():
    N = PolyCoeffProductNorm(2, 4)
    terms = [Polynomial([1.0, 1.0 / k]) for k in range(1, 200)]
    r = check_convergence(N, SequenceSample(terms), Polynomial([1.0, 0.0]), tol=1e-2)
    assert r.converged


def test_anchor_set_size_is_checked():
    with pytest.raises(NNormError):
        check_convergence(N2, SequenceSample([np.zeros(2)], [[np.zeros(2), np.zeros(2)]]), np.zeros(2))
    with pytest.raises(NNormError):
        SequenceSample([])


def test_closed_graph_examples():
    terms = [np.array([1.0 / k, 1.0 / k]) for k in range(1, 2001)]
    seq = SequenceSample(terms)
    r = check_closed_graph(N2, N2, np.eye(2), seq, np.zeros(2), np.zeros(2), tol=1e-2)
    assert r.closed and r.residual == 0.0
    A = np.diag([2.0, 3.0])
    r = check_closed_graph(N2, N2, A, seq, np.zeros(2), np.zeros(2), tol=1e-2)
    assert r.closed and r.residual == 0.0 and r.x_converged and r.y_converged
    r = check_closed_graph(N2, N2, A, seq, np.zeros(2), np.array([1.0, 0.0]), tol=1e-2)
    assert not r.closed and r.residual == 1.0
    assert r.residual == r.x_residual + r.y_residual


def test_closed_graph_for_random_operators():
    rng = np.random.default_rng(4)
    N3 = DeterminantNorm(3)
    for _ in range(5):
        A = rng.standard_normal((3, 3))
        x, u = rng.standard_normal(3), rng.standard_normal(3)
        terms = [x + u * 2.0 ** -k for k in range(60)]
        r = check_closed_graph(N3, N3, A, SequenceSample(terms), x, A @ x, tol=1e-9)
        assert r.closed and r.residual <= 1e-9


def test_closed_graph_shape_mismatch():
    with pytest.raises(NNormError):
        check_closed_graph(N2, N2, np.ones((3, 2)), SequenceSample([np.zeros(2)]), np.zeros(2), np.zeros(2))
