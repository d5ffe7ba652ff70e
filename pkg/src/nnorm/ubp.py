"""Pointwise versus uniform boundedness of functional families, the unbounded
partial-sum family on polynomials, uniform convergence on eps-nets,
pointwise limits and weak* convergence checks.

Finite slices of a family can refute uniform boundedness, never certify
it; every report carries evidence flags rather than verdicts of truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .core import DeterminantNorm, NNormError, PolyCoeffProductNorm, Polynomial
from .functional import (
    BAnchors,
    BLinearFunctional,
    Certificate,
    DeterminantForm,
    NormEstimate,
    PartialSumForm,
    PreconditionError,
    WeightForm,
    check_b_linearity,
    estimate_norm_sampling,
    exact_norm_determinant,
)
from .rng import sub_rng

CAUCHY_TOL = 1e-8
CAUCHY_TAIL = 0.25


class FunctionalFamily:
    """Ordered functionals sharing one set of anchors."""

    def __init__(self, members: Sequence[BLinearFunctional], labels: Sequence[str] | None = None):
        members = list(members)
        if not members:
            raise NNormError("a family needs at least one member")
        first = members[0].anchors
        for i, T in enumerate(members):
            if T.anchors is not first and not _same_anchors(T.anchors, first):
                raise NNormError(f"member {i} does not share the family's anchors")
        self.members = members
        self.labels = list(labels) if labels is not None else [T.label or str(i) for i, T in enumerate(members)]

    @property
    def anchors(self) -> BAnchors:
        return self.members[0].anchors

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _same_anchors(a: BAnchors, b: BAnchors) -> bool:
    if type(a.norm) is not type(b.norm) or a.norm.arity != b.norm.arity or a.constant != b.constant:
        return False
    if a.constant:
        return a.scalars == b.scalars
    return a.coords.shape == b.coords.shape and bool(np.all(a.coords == b.coords))


@dataclass
class BoundReport:
    per_point_bounds: dict = field(default_factory=dict)
    per_member_norm_lower: list = field(default_factory=list)
    uniform_lower: float = 0.0
    pointwise_bounded_evidence: bool = True
    uniform_bound_refuted: bool = False
    cauchy_points: dict = field(default_factory=dict)
    norms_bounded_evidence: bool = True


@dataclass
class ConvergenceOnSetReport:
    net_sup: list
    propagated_bound: list
    member_norm_lower: list
    limit_norm: float
    converging: bool
    evidence_only: bool = True


@dataclass
class WeakStarReport:
    norms_bounded: bool
    cauchy_on_total_set: bool
    converges_to_candidate: bool
    conditions_hold: bool
    agrees: bool
    converges_pointwise: bool
    member_norm_lower: list
    max_cauchy_gap: float
    max_residual: float
    evidence_only: bool = True


# ---------------------------------------------------------------------------
# the partial-sum family on polynomials


def partial_sum_family(kmax: int, b_scalars: Sequence[float] = (1.0,), kmin: int = 0,
                       max_degree: int | None = None) -> FunctionalFamily:
    """Functionals ``T_k(x) = (a_0 + ... + a_k) b_2...b_n`` for ``k = kmin..kmax``.

    Anchors are constant polynomials entering the coefficient norm as a
    multiplicative factor, so ``||x, b..|| = max_j |a_j| * |b_2...b_n|``.
    """
    if kmax < kmin:
        raise NNormError("kmax must be >= kmin")
    n = len(b_scalars) + 1
    norm = PolyCoeffProductNorm(n, max_degree if max_degree is not None else max(kmax, 1))
    anchors = BAnchors.constants(norm, b_scalars)
    members = [BLinearFunctional(anchors, PartialSumForm(k), label=f"T_{k}") for k in range(kmin, kmax + 1)]
    return FunctionalFamily(members)


def ones_witness(k: int) -> Polynomial:
    """``1 + t + ... + t^k``."""
    return Polynomial(np.ones(k + 1))


def partial_sum_witness(T: BLinearFunctional) -> Polynomial:
    if not isinstance(T.action, PartialSumForm):
        raise NNormError("ones witness applies to partial-sum forms only")
    return ones_witness(T.action.k)


def partial_sum_pointwise_cap(x: Polynomial, b_scalars: Sequence[float]) -> float:
    """``(N_x + 1) * max_j |a_j b_2...b_n|`` over ``j <= N_x``, a bound on
    ``|T_k(x)|`` valid for every ``k``."""
    N = x.degree
    prod = float(np.prod(b_scalars))
    return (N + 1) * float(np.max(np.abs(x.coeffs[: N + 1] * prod)))


# ---------------------------------------------------------------------------
# bounds


def member_norm(T: BLinearFunctional, budget: int = 10_000, seed: int = 42,
                witness: Callable | None = None) -> NormEstimate:
    """Exact norm where a cofactor certificate exists, else a lower bound
    from ``witness`` (if given) or from sampling."""
    if isinstance(T.space, DeterminantNorm) and not isinstance(T.action, PartialSumForm):
        return exact_norm_determinant(T)
    if witness is not None:
        x = witness(T)
        nx = T.anchors(x)
        if nx <= 0:
            raise NNormError(f"witness for {T.label or T} has zero norm")
        return NormEstimate(abs(T(x)) / nx, x)
    return estimate_norm_sampling(T, budget, seed)


def _norms(family: FunctionalFamily, budget: int, seed: int, witness=None) -> list[NormEstimate]:
    return [member_norm(T, budget, _member_seed(seed, i), witness) for i, T in enumerate(family)]


def _member_seed(seed: int, i: int) -> int:
    return int(sub_rng(seed, "member", i).integers(2**31))


def pointwise_bounds(family: FunctionalFamily, points: Sequence) -> BoundReport:
    """Per-point maxima of ``|T(x)|`` over the family slice."""
    report = BoundReport()
    for i, x in enumerate(points):
        report.per_point_bounds[i] = max(abs(T(x)) for T in family)
    report.pointwise_bounded_evidence = all(np.isfinite(v) for v in report.per_point_bounds.values())
    return report


def growth_refutes_bound(values: Sequence[float], tail_fraction: float = 0.5) -> bool:
    """True when the tail is strictly increasing with non-decaying increments.

    Increments that stay at least half the first tail increment add up
    without bound, so no fixed constant dominates the sequence; decaying
    increments (a bounded monotone sequence) do not refute.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size < 3 or not np.all(np.isfinite(vals)):
        return bool(np.any(np.isinf(vals)))
    start = min(vals.size - 3, int(np.floor(vals.size * (1 - tail_fraction))))
    inc = np.diff(vals[start:])
    return bool(np.all(inc > 0) and np.min(inc) >= 0.5 * inc[0])


def uniform_bound_refutation(family: FunctionalFamily, witness_builder: Callable | None = None,
                             budget: int = 10_000, seed: int = 42) -> BoundReport:
    """Per-member norm lower bounds; flags refutation of a uniform bound."""
    norms = _norms(family, budget, seed, witness_builder)
    lowers = [e.lower for e in norms]
    report = BoundReport(per_member_norm_lower=norms, uniform_lower=max(lowers))
    report.uniform_bound_refuted = growth_refutes_bound(lowers) or any(e.unbounded for e in norms)
    report.norms_bounded_evidence = not report.uniform_bound_refuted
    return report


def cauchy_gap(values: np.ndarray, tail_fraction: float = CAUCHY_TAIL) -> float:
    """``max |v_l - v_k|`` over the trailing fraction of a value sequence."""
    vals = np.asarray(values, dtype=float)
    start = min(vals.size - 1, int(np.floor(vals.size * (1 - tail_fraction))))
    tail = vals[start:]
    return float(np.max(tail) - np.min(tail)) if tail.size else 0.0


def cauchy_family_bound(family: FunctionalFamily, points: Sequence, tol: float = CAUCHY_TOL,
                        budget: int = 10_000, seed: int = 42) -> BoundReport:
    """Per-point Cauchy behaviour of ``T_k(x)`` plus per-member norm bounds."""
    norms = _norms(family, budget, seed)
    lowers = [e.lower for e in norms]
    report = BoundReport(per_member_norm_lower=norms, uniform_lower=max(lowers))
    for i, x in enumerate(points):
        vals = np.array([T(x) for T in family])
        gap = cauchy_gap(vals)
        report.per_point_bounds[i] = float(np.max(np.abs(vals)))
        report.cauchy_points[i] = {"gap": gap, "cauchy": gap <= tol}
    report.uniform_bound_refuted = growth_refutes_bound(lowers) or any(e.unbounded for e in norms)
    report.norms_bounded_evidence = not report.uniform_bound_refuted
    return report


# ---------------------------------------------------------------------------
# uniform convergence on totally bounded sets


@dataclass
class EpsNet:
    centers: list
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise NNormError("net radius must be positive")
        if not self.centers:
            raise NNormError("net needs at least one center")


def uniform_convergence_on_net(family: Sequence[BLinearFunctional], limit: BLinearFunctional, net: EpsNet,
                               member_norm_cap: float, limit_norm: float | None = None,
                               budget: int = 10_000, seed: int = 42) -> ConvergenceOnSetReport:
    """Sup of ``|T_k - T|`` over net centers, propagated to the covered set.

    Every point within ``radius`` of a center satisfies
    ``|T_k(x) - T(x)| <= net_sup_k + (cap + 1 + ||T||) * radius``.
    """
    fam = FunctionalFamily(list(family))
    norms = _norms(fam, budget, seed)
    for label, e in zip(fam.labels, norms):
        if e.lower > member_norm_cap:
            raise PreconditionError(f"member {label} has norm >= {e.lower:.6g}, above the cap {member_norm_cap:.6g}")
    if limit_norm is None:
        limit_norm = member_norm(limit, budget, seed).lower
    X = fam.anchors.x_coords(net.centers)
    t = limit.values(X)
    sups = [float(np.max(np.abs(T.values(X) - t))) for T in fam]
    inflate = (member_norm_cap + 1.0 + limit_norm) * net.radius
    propagated = [s + inflate for s in sups]
    return ConvergenceOnSetReport(sups, propagated, [e.lower for e in norms], float(limit_norm),
                                  _decreasing_tail(sups))


def _decreasing_tail(values: Sequence[float], tol: float = 1e-12) -> bool:
    vals = np.asarray(values, dtype=float)
    start = min(vals.size - 1, vals.size // 2)
    tail = vals[start:]
    if np.any(np.diff(tail) > tol * (1.0 + np.abs(tail[:-1]))):
        return False
    return bool(tail[-1] <= tol or tail[-1] < tail[0] or vals[-1] < vals[0])


# ---------------------------------------------------------------------------
# pointwise limits and weak* convergence


def pointwise_limit_functional(family: Sequence[BLinearFunctional], basis: Sequence,
                               tol: float = CAUCHY_TOL, extrapolation: str = "last",
                               check_samples: int = 1000, seed: int = 42,
                               budget: int = 10_000) -> BLinearFunctional:
    """Weight-form limit of ``T_k`` from limiting values on a basis.

    ``extrapolation`` is ``"last"`` (final member's value) or
    ``"inverse_k"`` (least-squares fit of ``a + b/k`` over the tail, for
    sequences converging like ``1/k``). The result is checked for linearity
    and for ``|T(x)| <= M ||x, b..||`` on seeded samples, with ``M`` the
    largest member norm bound.
    """
    fam = FunctionalFamily(list(family))
    anchors = fam.anchors
    if anchors.constant:
        raise NNormError("pointwise limits need a finite-dimensional space")
    B = anchors.x_coords(list(basis))
    if B.shape[0] != B.shape[1] or linalg.rank(B) < B.shape[0]:
        raise NNormError("basis must be a basis of the ambient space")
    vals = np.stack([T.values(B) for T in fam])  # (K, dim)
    limits = np.empty(B.shape[0])
    for i in range(B.shape[0]):
        gap = cauchy_gap(vals[:, i])
        if gap > tol:
            raise PreconditionError(f"values on basis element {i} do not settle (tail gap {gap:.3g})")
        limits[i] = _extrapolate(vals[:, i], extrapolation)
    w = np.linalg.solve(B, limits)
    T = BLinearFunctional(anchors, WeightForm(w), label="limit")

    norms = _norms(fam, budget, seed)
    M = max(e.lower for e in norms)
    rng = sub_rng(seed, "limit-check")
    S = rng.standard_normal((check_samples, B.shape[1]))
    lhs = np.abs(T.values(S))
    rhs = M * anchors.norm_coords(S)
    worst = float(np.max(lhs - rhs))
    if worst > 1e-9 * max(1.0, float(np.max(rhs))):
        raise PreconditionError(f"limit exceeds the member bound M={M:.6g} by {worst:.3g}")
    pairs = [(S[i], S[i + 1]) for i in range(0, min(check_samples, 200) - 1, 2)]
    if not check_b_linearity(T, pairs).ok:
        raise PreconditionError("limit functional failed the linearity check")
    T.bound = M
    return T


def _extrapolate(values: np.ndarray, method: str, tail_fraction: float = CAUCHY_TAIL) -> float:
    if method == "last":
        return float(values[-1])
    if method == "inverse_k":
        K = values.size
        start = min(K - 2, int(np.floor(K * (1 - tail_fraction))))
        k = np.arange(start + 1, K + 1, dtype=float)
        A = np.stack([np.ones_like(k), 1.0 / k], axis=1)
        coef, *_ = np.linalg.lstsq(A, values[start:], rcond=None)
        return float(coef[0])
    raise NNormError(f"unknown extrapolation {method!r}")


def weakstar_check(family: Sequence[BLinearFunctional], candidate_limit: BLinearFunctional,
                   total_set: Sequence, points: Sequence, tol: float = CAUCHY_TOL,
                   budget: int = 10_000, seed: int = 42, witness_builder: Callable | None = None) -> WeakStarReport:
    """Evidence for weak* convergence of ``T_k`` to ``candidate_limit``.

    (a) member norms show no unbounded growth; (b) ``T_k(x)`` is Cauchy for
    each ``x`` in ``total_set``; (c) ``T_k(x) -> candidate(x)`` on ``points``.
    ``conditions_hold`` is (a) and (b). Independently of any candidate,
    ``converges_pointwise`` records whether ``T_k(x)`` settles at every probe
    point (total set and ``points``); ``agrees`` says whether that matches
    the conditions, which is what the weak* criterion asserts.
    """
    fam = FunctionalFamily(list(family))
    anchors = fam.anchors
    M = anchors.x_coords(list(total_set))
    P = anchors.x_coords(list(points))
    if linalg.rank(M) < M.shape[1]:
        raise NNormError(f"total set has rank {int(linalg.rank(M))}, space has dimension {M.shape[1]}")

    norms = _norms(fam, budget, seed, witness_builder)
    lowers = [e.lower for e in norms]
    bounded = not (growth_refutes_bound(lowers) or any(e.unbounded for e in norms))

    vals_M = np.stack([T.values(M) for T in fam])
    gaps = [cauchy_gap(vals_M[:, i]) for i in range(M.shape[0])]
    cauchy = max(gaps) <= tol

    vals_P = np.stack([T.values(P) for T in fam])
    settles = all(cauchy_gap(vals_P[:, i]) <= tol * (1.0 + float(np.max(np.abs(vals_P[-1]), initial=0.0)))
                  for i in range(P.shape[0]))
    target = candidate_limit.values(P)
    start = min(len(fam) - 1, int(np.floor(len(fam) * (1 - CAUCHY_TAIL))))
    resid = np.abs(vals_P[start:] - target[None, :])
    max_resid = float(np.max(resid)) if resid.size else 0.0
    direct = max_resid <= tol * (1.0 + float(np.max(np.abs(target), initial=0.0)))

    cond = bounded and cauchy
    pointwise = cauchy and settles
    return WeakStarReport(bounded, cauchy, direct, cond, cond == pointwise, pointwise, lowers, max(gaps), max_resid)


def scaled_family(T: BLinearFunctional, coefficients: Sequence[float]) -> list[BLinearFunctional]:
    """Members ``c_k * T`` for each coefficient."""
    out = []
    for k, c in enumerate(coefficients):
        S = T.scaled(c)
        S.label = f"{c:.6g}*T[{k}]"
        out.append(S)
    return out


def is_exact(e: NormEstimate) -> bool:
    return e.certificate is Certificate.COFACTOR


__all__ = [
    "BoundReport",
    "ConvergenceOnSetReport",
    "DeterminantForm",
    "EpsNet",
    "FunctionalFamily",
    "WeakStarReport",
    "cauchy_family_bound",
    "partial_sum_family",
    "partial_sum_pointwise_cap",
    "pointwise_bounds",
    "pointwise_limit_functional",
    "uniform_bound_refutation",
    "uniform_convergence_on_net",
    "weakstar_check",
]
