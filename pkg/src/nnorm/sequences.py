"""Finite-prefix convergence, Cauchy and closed-graph checks.

All verdicts are evidence from a finite tail of terms against a finite list
of anchor sets; ``evidence_only`` is always set on the reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import NNorm, NNormError, ProductPair, ProductSumNorm, standard_anchor_sets


@dataclass
class SequenceSample:
    terms: list
    anchor_sets: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.terms) == 0:
            raise NNormError("sequence sample needs at least one term")


@dataclass
class ConvergenceReport:
    converged: bool
    limit: object
    max_tail_norm: float
    per_anchor_tail: list
    evidence_only: bool = True


@dataclass
class GraphReport:
    closed: bool
    residual: float
    x_residual: float
    y_residual: float
    x_converged: bool
    y_converged: bool
    max_graph_tail: float
    evidence_only: bool = True


def _tail(terms: Sequence, tail_fraction: float) -> list:
    if not 0 < tail_fraction <= 1:
        raise NNormError("tail_fraction must be in (0, 1]")
    start = min(len(terms) - 1, int(np.floor(len(terms) * (1 - tail_fraction))))
    return list(terms[start:])


def anchor_sets_for(norm: NNorm, seq: SequenceSample, include_standard: bool = True) -> list[list]:
    sets = [list(s) for s in seq.anchor_sets]
    for s in sets:
        if len(s) != norm.arity - 1:
            raise NNormError(f"anchor set of size {len(s)}, need {norm.arity - 1}")
    if include_standard:
        sets += standard_anchor_sets(norm)
    return sets


def _tail_norms(norm: NNorm, diffs: np.ndarray, anchor_sets: list[list]) -> np.ndarray:
    """``(len(anchor_sets), len(diffs))`` array of ``||d, a_2..a_n||``."""
    out = np.empty((len(anchor_sets), diffs.shape[0]))
    for j, anchors in enumerate(anchor_sets):
        A = norm.coords(anchors)
        L = max(A.shape[1], diffs.shape[1])
        D = np.pad(diffs, ((0, 0), (0, L - diffs.shape[1])))
        A = np.pad(A, ((0, 0), (0, L - A.shape[1])))
        arr = np.concatenate([D[:, None, :], np.broadcast_to(A, (D.shape[0],) + A.shape)], axis=1)
        out[j] = norm.evaluate_coords(arr)
    return out


def check_convergence(norm: NNorm, seq: SequenceSample, candidate_limit, tail_fraction: float = 0.5,
                      tol: float = 1e-6, include_standard: bool = True) -> ConvergenceReport:
    """Tail evidence that ``x_k -> candidate_limit`` under every anchor set."""
    sets = anchor_sets_for(norm, seq, include_standard)
    tail = _tail(seq.terms, tail_fraction)
    C = norm.coords(tail + [candidate_limit])
    diffs = C[:-1] - C[-1]
    norms = _tail_norms(norm, diffs, sets) if sets else np.zeros((0, len(tail)))
    per = [float(np.max(r)) for r in norms]
    worst = max(per, default=0.0)
    return ConvergenceReport(worst <= tol, candidate_limit, worst, per)


def check_cauchy(norm: NNorm, seq: SequenceSample, tail_fraction: float = 0.5, tol: float = 1e-6,
                 include_standard: bool = True) -> ConvergenceReport:
    """Tail evidence that ``||x_l - x_k, a..|| -> 0`` over all tail pairs."""
    sets = anchor_sets_for(norm, seq, include_standard)
    tail = _tail(seq.terms, tail_fraction)
    C = norm.coords(tail)
    i, j = np.triu_indices(len(tail), k=1)
    if i.size == 0:
        return ConvergenceReport(True, None, 0.0, [0.0] * len(sets))
    diffs = C[i] - C[j]
    norms = _tail_norms(norm, diffs, sets) if sets else np.zeros((0, diffs.shape[0]))
    per = [float(np.max(r)) for r in norms]
    worst = max(per, default=0.0)
    return ConvergenceReport(worst <= tol, None, worst, per)


def check_closed_graph(norm_X: NNorm, norm_Y: NNorm, operator: np.ndarray, seq: SequenceSample,
                       x_limit, y_limit, tol: float = 1e-6, tail_fraction: float = 0.5) -> GraphReport:
    """Sample-scale closed-graph check for a matrix operator ``X -> Y``.

    Uses the sum norm on ``X x Y``: the tail of ``(x_k, T x_k) - (x, y)`` is
    measured under every pair of anchor sets, and the residual is the graph
    norm of ``(x, T x) - (x, y)``, which splits as X-part plus Y-part.
    """
    A = np.atleast_2d(np.asarray(operator, dtype=float))
    if A.shape != (norm_Y.dim, norm_X.dim):
        raise NNormError(f"operator shape {A.shape} does not map dim {norm_X.dim} to dim {norm_Y.dim}")
    graph = ProductSumNorm(norm_X, norm_Y)

    def image(x):
        return norm_Y.element(A @ norm_X.coords([x])[0])

    pairs = [ProductPair(x, image(x)) for x in seq.terms]
    x_sets = [s for s in seq.anchor_sets if len(s) == norm_X.arity - 1]
    sets = standard_anchor_sets(graph)
    tail = _tail(pairs, tail_fraction)
    G = graph.coords(tail + [ProductPair(x_limit, y_limit)])
    diffs = G[:-1] - G[-1]
    gnorms = _tail_norms(graph, diffs, sets)
    max_graph_tail = float(np.max(gnorms)) if gnorms.size else 0.0

    xs = SequenceSample(seq.terms, x_sets)
    x_conv = check_convergence(norm_X, xs, x_limit, tail_fraction, tol)
    y_conv = check_convergence(norm_Y, SequenceSample([image(x) for x in seq.terms]), y_limit, tail_fraction, tol)

    lim = graph.coords([ProductPair(x_limit, image(x_limit)), ProductPair(x_limit, y_limit)])
    d = (lim[0] - lim[1])[None]
    dx, dy = graph.split(d)
    x_res = float(np.max(_tail_norms(norm_X, dx, standard_anchor_sets(norm_X))))
    y_res = float(np.max(_tail_norms(norm_Y, dy, standard_anchor_sets(norm_Y))))
    return GraphReport(
        closed=x_res + y_res <= tol,
        residual=x_res + y_res,
        x_residual=x_res,
        y_residual=y_res,
        x_converged=x_conv.converged,
        y_converged=y_conv.converged,
        max_graph_tail=max_graph_tail,
    )
