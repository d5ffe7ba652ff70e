"""Constructive Hahn-Banach machinery for b-linear functionals.

One-step extension from a subspace ``W`` to ``span(W, x0)`` through the
admissible interval for the value at ``x0``, the exact extension for the
determinant n-norm, norming and annihilating functionals, the dual-sup
formula for ``||x, b..||`` and the distance duality.

Work happens in coordinates: a :class:`Subspace` stores its basis as rows
of the coordinate matrix of the n-norm's space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import linalg
from .core import DeterminantNorm, NNormError, eval_nnorm
from .functional import (
    BAnchors,
    BLinearFunctional,
    DeterminantForm,
    PartialSumForm,
    PreconditionError,
    WeightForm,
    cofactor,
    estimate_norm_sampling,
    exact_norm_determinant,
    match_cofactor,
    weight_vector,
)
from .rng import sub_rng

log = logging.getLogger(__name__)

DECOMP_TOL = 1e-8
VALIDATION_TOL = 1e-6
EXACT_TOL = 1e-9
MAX_ROUNDS = 3
INTERVAL_SLACK = 1e-10


class ExtensionError(NNormError):
    """A constructed extension failed validation on fresh samples."""


@dataclass
class Subspace:
    """Span of the rows of ``basis``; zero rows means the trivial subspace."""

    basis: np.ndarray
    ambient_dim: int

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float).reshape(-1, self.ambient_dim)
        if B.shape[0] and linalg.rank(B) < B.shape[0]:
            raise NNormError("subspace basis is linearly dependent")
        if B.shape[0] > self.ambient_dim:
            raise NNormError("more basis vectors than the ambient dimension")
        self.basis = B

    @classmethod
    def from_elements(cls, anchors: BAnchors, elements: Sequence) -> "Subspace":
        elements = list(elements)
        d = _dim(anchors)
        if not elements:
            return cls(np.zeros((0, d)), d)
        return cls(_coords(anchors, elements, d), d)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, x: np.ndarray, tol: float = DECOMP_TOL) -> bool:
        if self.dim == 0:
            return not np.any(np.abs(x) > tol * max(1.0, float(np.max(np.abs(x)))))
        return linalg.solve_in_span(self.basis, x)[1] <= tol

    def to_dict(self) -> dict:
        return {"basis": self.basis.tolist(), "ambient_dim": self.ambient_dim}


@dataclass
class AlphaInterval:
    lo: float
    hi: float
    lo_witness: object
    hi_witness: object
    sample_count: int
    # size of the terms cancelled at the witnesses; rounding scales with it
    magnitude: float = 1.0

    @property
    def consistent(self) -> bool:
        """``lo <= hi`` up to rounding; a single-point interval may come out
        inverted in the last few digits."""
        return self.lo <= self.hi + INTERVAL_SLACK * max(1.0, abs(self.lo), abs(self.hi), self.magnitude)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_witness": self.lo_witness, "hi_witness": self.hi_witness,
                "sample_count": self.sample_count, "magnitude": self.magnitude, "consistent": self.consistent}


@dataclass
class ExtensionResult:
    extended: BLinearFunctional
    restriction_residual: float
    norm_original: float
    norm_extended_lower: float
    norm_extended_exact: float | None
    preserved: bool
    alpha: float | None = None
    interval: AlphaInterval | None = None
    validation_excess: float | None = None
    rounds: int = 1
    norm_original_sampled: float | None = None


@dataclass
class DistanceResult:
    h: float
    witness: object
    exact: bool
    upper_bound: bool
    samples: int = 0


@dataclass
class DualityReport:
    lhs: float
    rhs: float
    gap: float
    exact: bool
    weak_duality: bool
    pool_size: int
    notes: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# coordinate helpers


def _dim(anchors: BAnchors) -> int:
    if anchors.constant:
        raise NNormError("extensions need anchors that are genuine elements of a finite coordinate space")
    return anchors.coords.shape[1]


def _coords(anchors: BAnchors, xs: Sequence, d: int) -> np.ndarray:
    X = anchors.x_coords(list(xs))
    if X.shape[1] > d:
        if np.any(X[:, d:]):
            raise NNormError("element has more coordinates than the space in use")
        X = X[:, :d]
    return np.pad(X, ((0, 0), (0, d - X.shape[1])))


def _vec(anchors: BAnchors, x) -> np.ndarray:
    return _coords(anchors, [x], _dim(anchors))[0]


def _elem(anchors: BAnchors, row: np.ndarray):
    return anchors.norm.element(np.asarray(row, dtype=float))


def decompose(y: np.ndarray, W: Subspace, x0: np.ndarray, tol: float = DECOMP_TOL) -> tuple[np.ndarray, float]:
    """Unique ``(s, t)`` with ``y = s @ W.basis + t * x0``."""
    C = np.vstack([W.basis, x0])
    coeffs, resid = linalg.solve_in_span(C, np.asarray(y, dtype=float))
    if resid > tol:
        raise NNormError(f"element lies outside span(W, x0) (relative residual {resid:.3g})")
    return coeffs[:-1], float(coeffs[-1])


def _check_outside(W: Subspace, x0: np.ndarray) -> None:
    if W.dim and linalg.rank(np.vstack([W.basis, x0])) <= W.dim:
        raise PreconditionError("x0 lies in W")
    if not W.dim and not np.any(x0):
        raise PreconditionError("x0 lies in W")


def restricted(T: BLinearFunctional, W: Subspace) -> BLinearFunctional:
    """``T`` with its carrier set to ``W``."""
    return BLinearFunctional(T.anchors, T.action, W.basis if W.dim else None, T.label)


def functional_on(anchors: BAnchors, W: Subspace, values: Sequence[float], label: str = "") -> BLinearFunctional:
    """Weight form on ``W`` taking ``values[i]`` at ``W.basis[i]`` (minimum-norm weights)."""
    w, *_ = np.linalg.lstsq(W.basis, np.asarray(values, dtype=float), rcond=None)
    return BLinearFunctional(anchors, WeightForm(w), W.basis, label)


def known_norm(T: BLinearFunctional, budget: int = 10_000, seed: int = 42) -> tuple[float, bool]:
    """``(norm, exact)``: the cofactor value where available, else a sampled lower bound
    (or a ``bound`` attribute attached by a constructor)."""
    if isinstance(T.space, DeterminantNorm) and not isinstance(T.action, PartialSumForm):
        e = exact_norm_determinant(T)
        return (float(e.exact), True) if e.exact is not None else (np.inf, False)
    if getattr(T, "bound", None) is not None:
        return float(T.bound), False
    return estimate_norm_sampling(T, budget, seed).lower, False


# ---------------------------------------------------------------------------
# the admissible interval and the one-step extension


def _scaled_draws(rng: np.random.Generator, m: int, k: int, scale: float) -> np.ndarray:
    S = rng.standard_normal((m, k))
    radii = scale * 10.0 ** rng.uniform(-3, 3, size=(m, 1))
    return S * radii / np.maximum(np.linalg.norm(S, axis=1, keepdims=True), 1e-300)


def _polish(f, starts: Sequence[np.ndarray], scale: float = 1.0, restarts: int = 2) -> tuple[np.ndarray, float]:
    """Minimize ``f`` with Nelder-Mead from several starts, restarting each from
    its own result to escape simplex collapse on piecewise-linear objectives."""
    best_s, best = None, np.inf
    for s0 in starts:
        s = np.asarray(s0, dtype=float)
        val = float(f(s))
        for _ in range(restarts):
            res = minimize(f, s, method="Nelder-Mead",
                           options={"xatol": 1e-10 * max(scale, float(np.max(np.abs(s)))),
                                    "fatol": 1e-14 * max(1.0, abs(val)), "maxiter": 200 * s.size,
                                    "initial_simplex": _simplex(s, scale)})
            if not res.fun < val - 1e-15 * max(1.0, abs(val)):
                break
            s, val = res.x, float(res.fun)
        if val < best:
            best_s, best = s, val
    return best_s, best


def _simplex(s: np.ndarray, scale: float) -> np.ndarray:
    step = 0.1 * max(scale, float(np.max(np.abs(s))))
    return np.vstack([s, s + step * np.eye(s.size)])


def alpha_interval(T_W: BLinearFunctional, W: Subspace, x0, norm_TW: float, budget: int = 2000,
                   seed: int = 42, refine_starts: int = 2) -> AlphaInterval:
    """Admissible range ``[lo, hi]`` for ``alpha = -T0(x0)``.

    ``lo = sup_x T_W(x) - N ||x + x0, b..||`` and
    ``hi = inf_x T_W(x) + N ||x + x0, b..||`` over ``x`` in ``W``. The first
    objective is concave and the second convex, so seeded sampling followed
    by local polishing from the best starts approaches both optima; sampled
    values bracket the true interval from outside.
    """
    if budget < 1:
        raise NNormError("budget must be >= 1")
    anchors = T_W.anchors
    x0 = _vec(anchors, x0) if not isinstance(x0, np.ndarray) or x0.ndim != 1 else np.asarray(x0, dtype=float)
    _check_outside(W, x0)
    N = float(norm_TW)
    if W.dim == 0:
        r = N * float(anchors.norm_coords(x0[None])[0])
        zero = _elem(anchors, np.zeros_like(x0))
        return AlphaInterval(-r, r, zero, zero, 1, max(1.0, r))
    B = W.basis
    tw = T_W.values(B)  # T_W(s @ B) = s . tw

    def parts(S):
        S = np.atleast_2d(S)
        return S @ tw, N * anchors.norm_coords(S @ B + x0)

    def f_lo(s):  # negated, for minimization
        t, n = parts(s)
        return float(n[0] - t[0])

    def f_hi(s):
        t, n = parts(s)
        return float(t[0] + n[0])

    scale = float(np.linalg.norm(x0)) / max(float(np.min(np.linalg.norm(B, axis=1))), 1e-300)
    S = np.vstack([np.zeros((1, W.dim)), _scaled_draws(sub_rng(seed, "alpha"), budget, W.dim, scale),
                   linalg.solve_in_span(B, -x0)[0][None]])
    t, n = parts(S)
    lo_vals, hi_vals = t - n, t + n
    out = []
    magnitude = 1.0
    for vals, f, sign in ((lo_vals, f_lo, -1.0), (hi_vals, f_hi, 1.0)):
        order = np.argsort(sign * vals, kind="stable")[:refine_starts]
        s, v = _polish(f, [S[i] for i in order], scale)
        t, nrm = parts(s)
        magnitude = max(magnitude, abs(float(t[0])), float(nrm[0]))
        out.append((sign * v, _elem(anchors, s @ B)))
    (lo, lo_w), (hi, hi_w) = out
    iv = AlphaInterval(float(lo), float(hi), lo_w, hi_w, S.shape[0], magnitude)
    if not iv.consistent:
        log.warning("sampled alpha interval is inverted: lo=%.17g > hi=%.17g", lo, hi)
    return iv


def one_step_extension(T_W: BLinearFunctional, W: Subspace, x0, alpha: float, norm_TW: float,
                       seed: int = 42, samples: int = 1000, tol: float = VALIDATION_TOL,
                       interval: AlphaInterval | None = None) -> ExtensionResult:
    """``T0(x + t x0) = T_W(x) - t alpha`` on ``span(W, x0)``.

    The result is a weight form whose carrier is ``span(W, x0)``. It is
    validated on fresh seeded samples of the carrier against
    ``|T0(y)| <= norm_TW ||y, b..|| + tol (1 + norm_TW ||y, b..||)``.
    """
    anchors = T_W.anchors
    x0 = _vec(anchors, x0) if not isinstance(x0, np.ndarray) or x0.ndim != 1 else np.asarray(x0, dtype=float)
    _check_outside(W, x0)
    C = np.vstack([W.basis, x0])
    targets = np.concatenate([T_W.values(W.basis) if W.dim else np.zeros(0), [-alpha]])
    w0, *_ = np.linalg.lstsq(C, targets, rcond=None)
    T0 = BLinearFunctional(anchors, WeightForm(w0), C, label=(T_W.label + "+" if T_W.label else "extension"))

    rng = sub_rng(seed, "extension-validation")
    Y = rng.standard_normal((samples, C.shape[0])) @ C
    ny = norm_TW * anchors.norm_coords(Y)
    excess = np.abs(T0.values(Y)) - ny
    rel_excess = float(np.max(excess / (1.0 + ny)))
    residual = 0.0
    if W.dim:
        X = rng.standard_normal((samples, W.dim)) @ W.basis
        residual = float(np.max(np.abs(T0.values(X) - T_W.values(X))))
    exact = None
    if isinstance(anchors.norm, DeterminantNorm):
        e = exact_norm_determinant(T0)
        exact = e.exact
        lower = e.lower
    else:
        lower = estimate_norm_sampling(T0, 4 * samples, seed).lower
    ok = rel_excess <= tol and residual <= tol
    if exact is not None:
        # norm_TW may be an upper bound; preservation is judged against the
        # exact norm of T_W on W (zero when W is trivial)
        original = exact_norm_determinant(restricted(T_W, W)).exact if W.dim else 0.0
        slack = max(tol, 1e-6 * norm_TW)
        ok = ok and exact <= norm_TW + slack and (original is None or exact >= original - slack)
        if W.dim == 0 or original is None:
            ok = ok and abs(exact - norm_TW) <= slack
    return ExtensionResult(T0, residual, float(norm_TW), float(lower), exact, bool(ok), float(alpha), interval,
                           float(max(rel_excess, 0.0)))


def extend(T_W: BLinearFunctional, W: Subspace, x0, norm_TW: float | None = None, budget: int = 2000,
           seed: int = 42, tol: float = VALIDATION_TOL, rounds: int = MAX_ROUNDS) -> ExtensionResult:
    """Interval, midpoint choice of alpha, validation; on failure the interval is
    re-estimated with four times the budget, up to ``rounds`` rounds."""
    T_W = restricted(T_W, W) if W.dim and T_W.carrier is None else T_W
    if norm_TW is None:
        norm_TW, _ = known_norm(T_W, budget, seed)
    if not np.isfinite(norm_TW):
        raise PreconditionError("T_W is unbounded on W")
    b = budget
    result = None
    for r in range(1, rounds + 1):
        iv = alpha_interval(T_W, W, x0, norm_TW, b, seed=int(sub_rng(seed, "round", r).integers(2**31)))
        result = one_step_extension(T_W, W, x0, iv.midpoint, norm_TW, seed, tol=tol, interval=iv)
        result.rounds = r
        if result.validation_excess <= tol and result.restriction_residual <= tol:
            return result
        b *= 4
    raise ExtensionError(
        f"extension failed validation after {rounds} rounds (excess {result.validation_excess:.3g})"
    )


def extend_to_space(T: BLinearFunctional, norm_T: float, budget: int = 2000, seed: int = 42,
                    tol: float = VALIDATION_TOL, targets: np.ndarray | None = None) -> ExtensionResult:
    """Chain one-step extensions from ``T``'s carrier until it contains every
    row of ``targets`` (default: the coordinate basis)."""
    C = T.carrier
    d = C.shape[1]
    targets = np.eye(d) if targets is None else np.atleast_2d(targets)
    result = None
    for i, e in enumerate(targets):
        if linalg.rank(np.vstack([C, e])) <= C.shape[0]:
            continue
        result = extend(T, Subspace(C, d), e, norm_T, budget, int(sub_rng(seed, "chain", i).integers(2**31)), tol)
        T, C = result.extended, result.extended.carrier
    if result is None:
        return ExtensionResult(T, 0.0, norm_T, norm_T, None, True)
    return result


def extend_determinant_form(T_W: BLinearFunctional, W: Subspace, tol: float = EXACT_TOL,
                            budget: int = 10_000, seed: int = 42) -> ExtensionResult:
    """Exact norm-preserving extension ``c det(x, b..)`` of a form bounded on ``W``.

    ``c`` matches the weights of ``T_W`` against the cofactor vector on
    ``W``; when ``W`` lies in the kernel of the cofactor vector and ``T_W``
    vanishes there, ``c = 0``.
    """
    anchors = T_W.anchors
    if not isinstance(anchors.norm, DeterminantNorm):
        raise NNormError("exact extension needs the determinant n-norm")
    if W.dim == 0:
        raise NNormError("W must be nontrivial")
    TW = restricted(T_W, W)
    v = cofactor(anchors)
    w = weight_vector(TW) if isinstance(TW.action, WeightForm) else weight_vector(T_W)
    c, r = match_cofactor(w, v, W.basis, tol)
    if c is None:
        raise PreconditionError(f"T_W is unbounded on W: it is nonzero along {r.tolist()}, where det(., b..) vanishes")
    T = BLinearFunctional(anchors, DeterminantForm(c), label="extension")
    rng = sub_rng(seed, "det-extension")
    X = np.vstack([W.basis, rng.standard_normal((256, W.dim)) @ W.basis])
    residual = float(np.max(np.abs(T.values(X) - TW.values(X))))
    original = exact_norm_determinant(TW).exact
    sampled = estimate_norm_sampling(TW, budget, seed).lower
    preserved = abs(abs(c) - original) <= tol * max(1.0, original) and residual <= tol * max(1.0, original)
    return ExtensionResult(T, residual, float(original), abs(c), abs(c), bool(preserved),
                           norm_original_sampled=float(sampled))


def example_anchors(n: int) -> list[np.ndarray]:
    """Anchors ``b_i`` equal to all ones except a zero at position ``i - 2``."""
    if n < 2:
        raise NNormError("n must be >= 2")
    out = []
    for i in range(n - 1):
        b = np.ones(n)
        b[i] = 0.0
        out.append(b)
    return out


def example_instance(n: int) -> tuple[BLinearFunctional, Subspace]:
    """The determinant form restricted to ``W = {x : x_n = 0}`` with the anchors above."""
    anchors = BAnchors(DeterminantNorm(n), example_anchors(n))
    W = Subspace(np.eye(n)[: n - 1], n)
    return BLinearFunctional(anchors, DeterminantForm(1.0), W.basis, label="T_1"), W


# ---------------------------------------------------------------------------
# norming functionals and the dual-sup formula


def norming_functional(x0, anchors: BAnchors, budget: int = 2000, seed: int = 42,
                       tol: float = VALIDATION_TOL) -> BLinearFunctional:
    """A norm-one functional with ``T(x0) = ||x0, b..||``."""
    nx = float(anchors(x0))
    if not nx > 0:
        raise PreconditionError("x0 is degenerate with the anchors (||x0, b..|| = 0)")
    if isinstance(anchors.norm, DeterminantNorm):
        v = cofactor(anchors)
        c = float(np.sign(v @ _vec(anchors, x0)))
        return BLinearFunctional(anchors, DeterminantForm(c), label="norming")
    x = _vec(anchors, x0)
    T = BLinearFunctional(anchors, WeightForm(x * nx / float(x @ x)), x[None], label="norming")
    result = extend_to_space(T, 1.0, budget, seed, tol, _effective_targets(anchors, x))
    T = result.extended
    T.bound = 1.0
    if abs(T.values(x[None])[0] - nx) > tol * max(1.0, nx):
        raise ExtensionError("norming functional lost its value at x0")
    return T


def _effective_targets(anchors: BAnchors, x: np.ndarray) -> np.ndarray:
    """Coordinate directions actually used by ``x`` and the anchors."""
    used = np.any(np.vstack([anchors.coords[:, : x.size] if anchors.coords.shape[1] >= x.size
                             else np.pad(anchors.coords, ((0, 0), (0, x.size - anchors.coords.shape[1]))),
                             x[None]]) != 0, axis=0)
    return np.eye(x.size)[used]


def norm_via_dual_sup(x, anchors: BAnchors, functional_pool: Sequence[BLinearFunctional],
                      budget: int = 10_000, seed: int = 42) -> float:
    """``max |T(x)| / ||T||`` over the pool; members of norm zero are skipped."""
    pool = list(functional_pool)
    if not pool:
        raise NNormError("functional pool is empty")
    X = _coords(anchors, [x], _dim(anchors))
    best = 0.0
    for i, T in enumerate(pool):
        nT, _ = known_norm(T, budget, seed)
        if not nT > 0:
            log.info("skipping pool member %d with norm 0", i)
            continue
        if not np.isfinite(nT):
            log.info("skipping unbounded pool member %d", i)
            continue
        best = max(best, abs(float(T.values(X)[0])) / nT)
    return best


# ---------------------------------------------------------------------------
# distance to a subspace, annihilators and duality


def _orthogonal(v: np.ndarray, S: Subspace) -> bool:
    """``v`` orthogonal to every basis vector of ``S``, relative to their sizes."""
    if S.dim == 0:
        return True
    vs = S.basis @ v
    return bool(np.max(np.abs(vs)) <= EXACT_TOL * np.linalg.norm(v) * np.max(np.linalg.norm(S.basis, axis=1)))


def distance_to_subspace(x, S: Subspace, anchors: BAnchors, budget: int = 2000, seed: int = 42) -> DistanceResult:
    """``inf_{s in S} ||x - s, b..||``.

    Exact for the determinant n-norm: ``det(x - s, b..) = v.x - v.s`` is
    affine in ``s``, so the infimum is 0 unless ``v`` is orthogonal to ``S``,
    when it is ``|v.x|``. Otherwise a seeded multi-start minimization gives
    an upper bound on the infimum.
    """
    xv = _vec(anchors, x)
    zero = _elem(anchors, np.zeros_like(xv))
    if S.dim == 0:
        return DistanceResult(float(anchors.norm_coords(xv[None])[0]), zero, True, False)
    if isinstance(anchors.norm, DeterminantNorm):
        v = cofactor(anchors)
        vs = S.basis @ v
        if not _orthogonal(v, S):
            i = int(np.argmax(np.abs(vs)))
            s = S.basis[i] * (float(v @ xv) / float(vs[i]))
            return DistanceResult(0.0, _elem(anchors, s), True, False)
        return DistanceResult(eval_nnorm(anchors.norm, [xv, *anchors.anchors]), zero, True, False)

    def g(s):
        return float(anchors.norm_coords((xv - np.atleast_2d(s) @ S.basis))[0])

    proj = linalg.solve_in_span(S.basis, xv)[0]
    scale = float(np.linalg.norm(xv)) / max(float(np.min(np.linalg.norm(S.basis, axis=1))), 1e-300)
    Sm = np.vstack([np.zeros((1, S.dim)), proj[None], _scaled_draws(sub_rng(seed, "distance"), budget, S.dim, scale)])
    vals = anchors.norm_coords(xv - Sm @ S.basis)
    order = np.argsort(vals, kind="stable")[:3]
    s, h = _polish(g, [Sm[i] for i in order], scale)
    return DistanceResult(max(h, 0.0), _elem(anchors, s @ S.basis), False, True, Sm.shape[0])


def annihilator_functional(x1, W: Subspace, anchors: BAnchors, budget: int = 2000, seed: int = 42,
                           extend_full: bool = False) -> BLinearFunctional:
    """Functional vanishing on ``W`` with norm one and value ``h`` at ``x1``,
    where ``h`` is the distance from ``x1`` to ``W``."""
    xv = _vec(anchors, x1)
    if linalg.rank(np.vstack([xv, anchors.coords])) < anchors.coords.shape[0] + 1:
        raise PreconditionError("x1 and the anchors are linearly dependent")
    dist = distance_to_subspace(x1, W, anchors, budget, seed)
    if not dist.h > 0:
        raise PreconditionError("distance from x1 to W is 0")
    if isinstance(anchors.norm, DeterminantNorm):
        c = float(np.sign(cofactor(anchors) @ xv))
        return BLinearFunctional(anchors, DeterminantForm(c), label="annihilator")
    C = np.vstack([W.basis, xv])
    T = functional_on(anchors, Subspace(C, C.shape[1]), np.concatenate([np.zeros(W.dim), [dist.h]]), "annihilator")
    T.bound = 1.0
    if extend_full:
        T = extend_to_space(T, 1.0, budget, seed).extended
        T.bound = 1.0
    return T


def distance_duality_check(x, S: Subspace, anchors: BAnchors, pool_size: int = 16, seed: int = 42,
                           budget: int = 2000) -> DualityReport:
    """Both sides of ``inf_s ||x - s, b..|| = sup |T(x)|`` over norm-one
    functionals vanishing on ``S``."""
    dist = distance_to_subspace(x, S, anchors, budget, seed)
    xv = _vec(anchors, x)
    notes = []
    if isinstance(anchors.norm, DeterminantNorm):
        v = cofactor(anchors)
        # bounded S-annihilators are multiples of det(., b..) with v orthogonal to S
        if dist.h > 0 and _orthogonal(v, S):
            T = BLinearFunctional(anchors, DeterminantForm(float(np.sign(v @ xv))), label="annihilator")
            rhs = abs(float(T.values(xv[None])[0]))
        else:
            rhs = 0.0
            notes.append("only the zero functional annihilates S boundedly" if dist.h == 0 else "x in S")
        return DualityReport(dist.h, rhs, abs(dist.h - rhs), True, rhs <= dist.h + EXACT_TOL, 1, notes)

    # sampled pool: random S-annihilating weight forms, normalized by a norm
    # estimate that includes the distance witness, so weak duality is exact
    d = xv.size
    perp = linalg.null_space(S.basis) if S.dim else np.eye(d)
    rng = sub_rng(seed, "duality-pool")
    resid = xv - _vec(anchors, dist.witness)
    rhs = 0.0
    pool = [perp.T @ (perp @ xv)] + [perp.T @ rng.standard_normal(perp.shape[0]) for _ in range(pool_size - 1)]
    for i, w in enumerate(pool):
        if not np.any(w):
            continue
        T = BLinearFunctional(anchors, WeightForm(w), label=f"pool-{i}")
        nT = estimate_norm_sampling(T, budget, int(sub_rng(seed, "pool", i).integers(2**31))).lower
        n_res = float(anchors.norm_coords(resid[None])[0])
        if n_res > 0:
            nT = max(nT, abs(float(T.values(resid[None])[0])) / n_res)
        if nT > 0 and np.isfinite(nT):
            rhs = max(rhs, abs(float(T.values(xv[None])[0])) / nT)
    notes.append("distance is an upper bound on the infimum; pool norms are sampled")
    return DualityReport(dist.h, rhs, abs(dist.h - rhs), False, rhs <= dist.h + EXACT_TOL, len(pool), notes)


__all__ = [
    "AlphaInterval",
    "DistanceResult",
    "DualityReport",
    "ExtensionError",
    "ExtensionResult",
    "Subspace",
    "alpha_interval",
    "annihilator_functional",
    "decompose",
    "distance_duality_check",
    "distance_to_subspace",
    "example_anchors",
    "example_instance",
    "extend",
    "extend_determinant_form",
    "extend_to_space",
    "known_norm",
    "norm_via_dual_sup",
    "norming_functional",
    "one_step_extension",
]
