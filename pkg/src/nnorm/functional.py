"""b-linear functionals: maps linear in the first slot with slots 2..n pinned
to fixed anchors, plus exact and sampled norm computation and continuity
checks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .core import (
    DeterminantNorm,
    NNorm,
    NNormError,
    PolyCoeffProductNorm,
    Polynomial,
    element_kind,
    sub,
)
from .rng import sub_rng

UNBOUNDED_TOL = 1e-9
UNBOUNDED_RATIO = 1e6
MIN_SAMPLE_NORM = 1e-12
# near-degenerate samples have inflated rounding error in the ratio
REL_SAMPLE_NORM = 1e-8
DELTA_RUNGS = 60
CARRIER_TOL = 1e-8


class PreconditionError(NNormError):
    """An operation's premise does not hold; distinct from a property failure."""


class BAnchors:
    """The fixed elements ``b_2..b_n`` together with the n-norm of their space.

    Anchors must be linearly independent. The one exception is
    ``constant=True``: anchors are constant polynomials that enter the
    polynomial coefficient norm multiplicatively, as in the unbounded
    partial-sum family, even though distinct constants are dependent.
    """

    def __init__(self, norm: NNorm, anchors: Sequence, constant: bool = False):
        anchors = list(anchors)
        if len(anchors) != norm.arity - 1:
            raise NNormError(f"{norm.kind} norm of arity {norm.arity} needs {norm.arity - 1} anchors, got {len(anchors)}")
        self.norm = norm
        self.constant = bool(constant)
        if self.constant:
            if not isinstance(norm, PolyCoeffProductNorm):
                raise NNormError("constant anchors are only defined for the polynomial coefficient norm")
            for i, b in enumerate(anchors):
                if not isinstance(b, Polynomial) or b.degree != 0:
                    raise NNormError(f"anchor {i} is not a constant polynomial")
            self.anchors = anchors
            self.product = float(np.prod([b.coeffs[0] for b in anchors]))
            return
        self.anchors = anchors
        self.coords = norm.coords(anchors)
        if linalg.rank(self.coords) < len(anchors):
            raise NNormError("anchors are linearly dependent")
        self.product = None

    @classmethod
    def constants(cls, norm: PolyCoeffProductNorm, scalars: Sequence[float]) -> "BAnchors":
        return cls(norm, [Polynomial([s]) for s in scalars], constant=True)

    @property
    def scalars(self) -> list[float] | None:
        return [float(b.coeffs[0]) for b in self.anchors] if self.constant else None

    def x_coords(self, xs: Sequence) -> np.ndarray:
        return self.norm.coords(list(xs))

    def _stack(self, X: np.ndarray) -> np.ndarray:
        B = self.coords
        if X.shape[1] != B.shape[1]:
            L = max(X.shape[1], B.shape[1])
            X = np.pad(X, ((0, 0), (0, L - X.shape[1])))
            B = np.pad(B, ((0, 0), (0, L - B.shape[1])))
        return np.concatenate([X[:, None, :], np.broadcast_to(B, (X.shape[0],) + B.shape)], axis=1)

    def norm_coords(self, X: np.ndarray) -> np.ndarray:
        """``||x, b_2, ..., b_n||`` for each row of a coordinate matrix."""
        X = np.atleast_2d(X)
        if self.constant:
            return np.max(np.abs(X), axis=1) * abs(self.product)
        return self.norm.evaluate_coords(self._stack(X))

    def norm_and_scale(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Norm values plus the magnitude scale their rounding error is relative to."""
        X = np.atleast_2d(X)
        if self.constant:
            v = self.norm_coords(X)
            return v, v
        arr = self._stack(X)
        return self.norm.evaluate_coords(arr), self.norm.scale_coords(arr)

    def __call__(self, x) -> float:
        """``||x, b_2, ..., b_n||``."""
        if self.constant:
            return float(self.norm_coords(self.x_coords([x]))[0])
        return self.norm([x, *self.anchors])

    def to_dict(self) -> dict:
        from .serialize import encode_element

        out = {"norm": self.norm.to_dict(), "anchors": [encode_element(b) for b in self.anchors]}
        if self.constant:
            out["constant"] = True
        return out


@dataclass(frozen=True)
class WeightForm:
    """Acts as ``w . x`` on coordinates."""

    w: np.ndarray

    def to_dict(self):
        return {"kind": "weight", "w": [float(v) for v in self.w]}


@dataclass(frozen=True)
class DeterminantForm:
    """Acts as ``c * det(x, b_2, ..., b_n)``."""

    c: float

    def to_dict(self):
        return {"kind": "determinant", "c": float(self.c)}


@dataclass(frozen=True)
class PartialSumForm:
    """Acts as ``(a_0 + ... + a_k) * b_2 * ... * b_n`` on polynomials."""

    k: int

    def to_dict(self):
        return {"kind": "partial_sum", "k": int(self.k)}


class BLinearFunctional:
    """A b-linear functional with fixed anchors.

    ``carrier``, when set, is a matrix whose rows span the subspace the
    functional is defined on; evaluating outside it raises.
    """

    def __init__(self, anchors: BAnchors, action, carrier: np.ndarray | None = None, label: str = ""):
        self.anchors = anchors
        self.action = action
        self.label = label
        norm = anchors.norm
        if isinstance(action, WeightForm):
            w = np.asarray(action.w, dtype=float)
            if w.ndim != 1 or not np.all(np.isfinite(w)):
                raise NNormError("weight vector must be a finite 1-d array")
            if isinstance(norm, PolyCoeffProductNorm):
                if w.size < 1:
                    raise NNormError("empty weight vector")
            elif w.size != norm.dim:
                raise NNormError(f"weight vector has length {w.size}, space has dimension {norm.dim}")
            self.action = WeightForm(w)
        elif isinstance(action, DeterminantForm):
            if not isinstance(norm, DeterminantNorm):
                raise NNormError("determinant form needs the determinant n-norm")
            if anchors.constant:
                raise NNormError("determinant form needs vector anchors")
        elif isinstance(action, PartialSumForm):
            if not anchors.constant:
                raise NNormError("partial-sum form needs constant polynomial anchors")
            if action.k < 0:
                raise NNormError("partial-sum index must be >= 0")
        else:
            raise NNormError(f"unknown action {action!r}")
        self.carrier = None if carrier is None else np.atleast_2d(np.asarray(carrier, dtype=float))

    @property
    def space(self) -> NNorm:
        return self.anchors.norm

    def scaled(self, alpha: float) -> "BLinearFunctional":
        a = self.action
        if isinstance(a, WeightForm):
            new = WeightForm(alpha * a.w)
        elif isinstance(a, DeterminantForm):
            new = DeterminantForm(alpha * a.c)
        else:
            raise NNormError("partial-sum forms cannot be rescaled")
        return BLinearFunctional(self.anchors, new, self.carrier, self.label)

    def values(self, X: np.ndarray) -> np.ndarray:
        """Values on each row of a coordinate matrix."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.carrier is not None:
            self._check_carrier(X)
        a = self.action
        if isinstance(a, WeightForm):
            w = a.w
            if X.shape[1] > w.size:
                if np.any(np.abs(X[:, w.size:]) > 0):
                    raise NNormError("element has coordinates beyond the weight vector's length")
                X = X[:, : w.size]
            elif X.shape[1] < w.size:
                X = np.pad(X, ((0, 0), (0, w.size - X.shape[1])))
            return X @ w
        if isinstance(a, DeterminantForm):
            B = self.anchors.coords
            arr = np.concatenate([X[:, None, :], np.broadcast_to(B, (X.shape[0],) + B.shape)], axis=1)
            return a.c * linalg.det(arr)
        return np.sum(X[:, : a.k + 1], axis=1) * self.anchors.product

    def _check_carrier(self, X: np.ndarray) -> None:
        C = self.carrier
        coeffs, *_ = np.linalg.lstsq(C.T, X.T, rcond=None)
        resid = np.linalg.norm(C.T @ coeffs - X.T, axis=0)
        scale = np.maximum(1.0, np.linalg.norm(X, axis=1))
        bad = np.nonzero(resid > CARRIER_TOL * scale)[0]
        if bad.size:
            raise NNormError(f"element {int(bad[0])} lies outside the functional's carrier subspace")

    def __call__(self, x) -> float:
        if element_kind(x) != self.space.element_kind:
            raise NNormError(f"functional acts on {self.space.element_kind}s, got a {element_kind(x)}")
        return float(self.values(self.anchors.x_coords([x]))[0])

    def to_dict(self) -> dict:
        out = {**self.anchors.to_dict(), "action": self.action.to_dict()}
        if self.anchors.constant:
            out["action"]["b_scalars"] = self.anchors.scalars
        if self.carrier is not None:
            out["carrier"] = self.carrier.tolist()
        if self.label:
            out["label"] = self.label
        return out

    def __repr__(self):
        return f"BLinearFunctional({self.action!r}, label={self.label!r})"


def evaluate(T: BLinearFunctional, x) -> float:
    """``T(x, b_2, ..., b_n)``."""
    return T(x)


class Certificate(str, enum.Enum):
    COFACTOR = "CofactorDecomposition"
    NONE = "None"


@dataclass
class NormEstimate:
    lower: float
    witness: object = None
    exact: float | None = None
    certificate: Certificate = Certificate.NONE
    unbounded: bool = False
    samples: int = 0


# ---------------------------------------------------------------------------
# exact norms for the determinant n-norm


def cofactor(anchors: BAnchors) -> np.ndarray:
    """Vector ``v`` with ``det(x, b_2, ..., b_n) = v . x``."""
    if not isinstance(anchors.norm, DeterminantNorm):
        raise NNormError("cofactor vector is defined for the determinant n-norm only")
    return linalg.cofactor_vector(anchors.coords)


def weight_vector(T: BLinearFunctional) -> np.ndarray:
    """Coordinate weights of a weight or determinant form."""
    if isinstance(T.action, WeightForm):
        return T.action.w
    if isinstance(T.action, DeterminantForm):
        return T.action.c * cofactor(T.anchors)
    raise NNormError("partial-sum forms have no finite weight vector")


def match_cofactor(w: np.ndarray, v: np.ndarray, basis: np.ndarray | None = None,
                   tol: float = UNBOUNDED_TOL) -> tuple[float | None, np.ndarray]:
    """Find ``c`` with ``w = c v`` on the span of ``basis`` (default: all).

    Returns ``(c, residual_direction)``; ``c`` is None when the residual
    exceeds ``tol`` relative to ``|w|``. The residual direction, mapped back
    to coordinates, lies in the kernel of ``v`` and has ``w . x != 0``.
    """
    B = np.eye(v.size) if basis is None else np.atleast_2d(basis)
    if B.shape[0] == 0:
        return 0.0, np.zeros(v.size)
    wb, vb = B @ w, B @ v
    vv = float(vb @ vb)
    c = float(wb @ vb) / vv if vv > 0 else 0.0
    r = wb - c * vb
    if float(np.linalg.norm(r)) > tol * float(np.linalg.norm(wb)):
        return None, r @ B
    return c, np.zeros(v.size)


def exact_norm_determinant(T: BLinearFunctional, tol: float = UNBOUNDED_TOL) -> NormEstimate:
    """Exact norm of a weight or determinant form under the determinant n-norm."""
    if not isinstance(T.space, DeterminantNorm) or isinstance(T.action, PartialSumForm):
        raise NNormError("exact norms need a weight/determinant form on the determinant n-norm")
    v = cofactor(T.anchors)
    if not np.any(v):
        raise NNormError("anchors are dependent; the n-norm degenerates")
    if isinstance(T.action, DeterminantForm) and T.carrier is None:
        c = float(T.action.c)
        return NormEstimate(abs(c), v / float(v @ v), abs(c), Certificate.COFACTOR)
    c, r = match_cofactor(weight_vector(T), v, T.carrier, tol)
    if c is None:
        return NormEstimate(np.inf, r, None, Certificate.NONE, unbounded=True)
    vb = v if T.carrier is None else _best_direction(T.carrier, v)
    denom = float(v @ vb)
    witness = vb / denom if denom != 0 else vb
    return NormEstimate(abs(c), witness, abs(c), Certificate.COFACTOR)


def _best_direction(basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(basis @ v) / np.maximum(np.linalg.norm(basis, axis=1), 1e-300)))
    return basis[i]


# ---------------------------------------------------------------------------
# sampled norms


def _sample_dim(T: BLinearFunctional, max_degree: int | None) -> int:
    if T.carrier is not None:
        return T.carrier.shape[0]
    norm = T.space
    if isinstance(norm, PolyCoeffProductNorm):
        d = norm.dim if max_degree is None else max_degree + 1
        if isinstance(T.action, WeightForm):
            d = max(d, T.action.w.size)
        return d
    return norm.dim


def _ratios(T: BLinearFunctional, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = S if T.carrier is None else S @ T.carrier
    nx, scale = T.anchors.norm_and_scale(X)
    vals = np.abs(T.values(X))
    ok = (nx >= MIN_SAMPLE_NORM) & (nx >= REL_SAMPLE_NORM * scale)
    ratio = np.where(ok, vals / np.where(ok, nx, 1.0), -np.inf)
    return ratio, nx


def _draw(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    S = rng.standard_normal((m, d))
    S[1::2] = rng.choice([-1.0, 1.0], size=S[1::2].shape)
    return S


def _refine(T: BLinearFunctional, s: np.ndarray, best: float, iters: int) -> tuple[np.ndarray, float]:
    d = s.size
    step = 0.5 * max(float(np.max(np.abs(s))), 1e-3)
    moves = np.concatenate([np.eye(d), -np.eye(d)])
    for _ in range(iters):
        trial = s[None, :] + step * moves
        r, _ = _ratios(T, trial)
        j = int(np.argmax(r))
        if r[j] > best:
            s, best = trial[j], float(r[j])
            step *= 2.0
        else:
            step *= 0.5
            if step < 1e-14 * max(float(np.max(np.abs(s))), 1e-300):
                break
    return s, best


def estimate_norm_sampling(T: BLinearFunctional, budget: int = 10_000, seed: int = 42,
                           max_degree: int | None = None, refine_starts: int = 4,
                           refine_iters: int = 200, chunk: int = 4096) -> NormEstimate:
    """Lower bound on ``||T||`` from seeded random directions.

    Draws ``budget`` usable directions (half Gaussian, half random signs),
    discards those with ``||x, b..|| < 1e-12``, then runs a coordinate
    pattern search from the best few. Each chunk of draws has its own
    sub-seed, so the result depends only on ``seed`` and ``budget``.
    """
    if budget < 1:
        raise NNormError("budget must be >= 1")
    d = _sample_dim(T, max_degree)
    kept_s, kept_r = [], []
    have, ci = 0, 0
    max_chunks = 4 * (budget // chunk + 1) + 4
    while have < budget and ci < max_chunks:
        m = min(chunk, budget - have)
        S = _draw(sub_rng(seed, "norm-sampling", ci), m, d)
        r, _ = _ratios(T, S)
        ok = np.isfinite(r)
        kept_s.append(S[ok])
        kept_r.append(r[ok])
        have += int(ok.sum())
        ci += 1
    if have == 0:
        return NormEstimate(0.0, None, samples=0)
    S = np.concatenate(kept_s)
    R = np.concatenate(kept_r)
    order = np.argsort(-R, kind="stable")[:refine_starts]
    best_s, best = S[order[0]], float(R[order[0]])
    for i in order:
        s, r = _refine(T, S[i], float(R[i]), refine_iters)
        if r > best:
            best_s, best = s, r
    X = best_s if T.carrier is None else best_s @ T.carrier
    nx = float(T.anchors.norm_coords(X[None])[0])
    witness = T.space.element(X / nx) if nx > 0 else None
    return NormEstimate(best, witness, unbounded=best > UNBOUNDED_RATIO, samples=have)


def sampled_norm_variants(T: BLinearFunctional, budget: int = 100_000, seed: int = 42,
                          max_degree: int | None = None) -> dict:
    """Three sampled forms of ``||T||``: sup over the unit ball, sup over the
    unit sphere, and sup of ``|T(x)| / ||x, b..||``."""
    d = _sample_dim(T, max_degree)
    rng = sub_rng(seed, "norm-variants")
    S = _draw(rng, budget, d)
    X = S if T.carrier is None else S @ T.carrier
    nx = T.anchors.norm_coords(X)
    ok = nx >= MIN_SAMPLE_NORM
    X, nx = X[ok], nx[ok]
    vals = np.abs(T.values(X))
    ratio = float(np.max(vals / nx))
    sphere = float(np.max(np.abs(T.values(X / nx[:, None]))))
    radii = rng.random(X.shape[0]) ** (1.0 / d)
    ball = float(np.max(np.abs(T.values(X * (radii / nx)[:, None]))))
    return {"ball": ball, "sphere": sphere, "ratio": ratio}


# ---------------------------------------------------------------------------
# property checks


@dataclass
class PropertyReport:
    ok: bool
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)


def check_b_linearity(T: BLinearFunctional, pairs: Sequence[tuple], scalars: Sequence[float] = (-1.0, 0.0, 0.5, 2.0),
                      tol: float = 1e-9) -> PropertyReport:
    """Additivity and homogeneity residuals on sample pairs."""
    from .core import add, scale

    if not pairs:
        raise NNormError("need at least one sample pair")
    viol = []
    worst = 0.0
    for i, (x, y) in enumerate(pairs):
        tx, ty = T(x), T(y)
        r = abs(T(add(x, y)) - tx - ty)
        worst = max(worst, r)
        if r > tol * (1 + abs(tx) + abs(ty)):
            viol.append({"pair": i, "kind": "additivity", "residual": r})
        for a in scalars:
            r = abs(T(scale(a, x)) - a * tx)
            worst = max(worst, r)
            if r > tol * (1 + abs(a * tx)):
                viol.append({"pair": i, "kind": "homogeneity", "scalar": a, "residual": r})
    return PropertyReport(not viol, viol, {"max_residual": worst})


def check_lipschitz(T: BLinearFunctional, norm_bound: float, pairs: Sequence[tuple], tol: float = 1e-9) -> PropertyReport:
    """``|T(x) - T(y)| <= norm_bound * ||x - y, b..|| + tol`` on each pair."""
    viol = []
    slack = np.inf
    for i, (x, y) in enumerate(pairs):
        lhs = abs(T(x) - T(y))
        rhs = norm_bound * T.anchors(sub(x, y))
        slack = min(slack, rhs + tol - lhs)
        if lhs > rhs + tol:
            viol.append({"pair": i, "lhs": lhs, "rhs": rhs})
    return PropertyReport(not viol, viol, {"min_slack": float(slack)})


def check_b_sequential_continuity(T: BLinearFunctional, seq, limit, tol: float = 1e-6,
                                  tail_fraction: float = 0.5) -> PropertyReport:
    """Tail of ``|T(x_k) - T(x)|`` below ``tol`` for a convergent sequence.

    Convergence of ``x_k`` is checked first, over the functional's anchors
    plus the default anchor sets; failure there raises
    :class:`PreconditionError`.
    """
    from .sequences import SequenceSample, check_convergence

    sample = SequenceSample(seq.terms, [list(T.anchors.anchors), *seq.anchor_sets]) if not T.anchors.constant else seq
    conv = check_convergence(T.space, sample, limit, tail_fraction, tol)
    if not conv.converged:
        raise PreconditionError(f"sequence does not converge at sample scale (tail norm {conv.max_tail_norm:.3g})")
    start = _tail_start(len(seq.terms), tail_fraction)
    t_lim = T(limit)
    diffs = [abs(T(x) - t_lim) for x in seq.terms[start:]]
    viol = [{"term": start + i, "gap": g} for i, g in enumerate(diffs) if g > tol]
    return PropertyReport(not viol, viol, {"max_tail_gap": max(diffs) if diffs else 0.0})


def _tail_start(count: int, tail_fraction: float) -> int:
    if not 0 < tail_fraction <= 1:
        raise NNormError("tail_fraction must be in (0, 1]")
    return min(count - 1, int(np.floor(count * (1 - tail_fraction))))


def delta_ladder(rungs: int = DELTA_RUNGS) -> np.ndarray:
    return 0.5 ** np.arange(rungs)


def check_epsilon_delta_continuity(T: BLinearFunctional, point, epsilons: Sequence[float],
                                   probe_budget: int = 256, seed: int = 42,
                                   rungs: int = DELTA_RUNGS) -> PropertyReport:
    """For each epsilon, the largest rung ``delta`` of ``1, 1/2, 1/4, ...``
    such that every probe in the anchored ``delta``-ball around ``point``
    maps within epsilon of ``T(point)``."""
    if probe_budget < 1:
        raise NNormError("probe_budget must be >= 1")
    norm = T.space
    p = T.anchors.x_coords([point])[0]
    t0 = float(T.values(p[None])[0])
    d = _sample_dim(T, None)
    rng = sub_rng(seed, "eps-delta")
    U = rng.standard_normal((probe_budget, d))
    if T.carrier is not None:
        U = U @ T.carrier
    nu = T.anchors.norm_coords(U)
    keep = nu >= MIN_SAMPLE_NORM
    U, nu = U[keep], nu[keep]
    radii = rng.random(U.shape[0])
    U = U * (radii / nu)[:, None]
    if p.size < U.shape[1]:
        p = np.pad(p, (0, U.shape[1] - p.size))
    found = {}
    viol = []
    for eps in epsilons:
        delta = None
        for dl in delta_ladder(rungs):
            gaps = np.abs(T.values(p[None, :] + dl * U) - t0)
            if gaps.size == 0 or float(np.max(gaps)) < eps:
                delta = float(dl)
                break
        found[float(eps)] = delta
        if delta is None:
            viol.append({"epsilon": float(eps), "reason": "ladder exhausted"})
    return PropertyReport(not viol, viol, {"deltas": found, "probes": int(U.shape[0]), "space": norm.kind})


def functional_from_weights(anchors: BAnchors, w: Sequence[float], label: str = "") -> BLinearFunctional:
    return BLinearFunctional(anchors, WeightForm(np.asarray(w, dtype=float)), label=label)


def random_pairs(norm: NNorm, count: int, seed: int, sampler: Callable | None = None) -> list[tuple]:
    out = []
    for i in range(count):
        rng = sub_rng(seed, "pairs", i)
        draw = sampler or norm.random_element
        out.append((draw(rng), draw(rng)))
    return out
