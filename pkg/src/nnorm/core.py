"""Elements, the four n-norms, linear dependence, axiom checks and balls.

Elements of a space are plain 1-d numpy arrays (coordinate vectors),
:class:`Polynomial` objects, or :class:`ProductPair` objects. Every n-norm
works internally on coordinate arrays of shape ``(m, n, D)``: ``m`` tuples
of ``n`` elements, each flattened to ``D`` coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg

TRIM_TOL = 1e-12
ZERO_TOL = 1e-9
DEFAULT_MAX_DEGREE = 32


class NNormError(ValueError):
    """Raised for incompatible shapes, arities or non-finite input."""


def _finite(arr: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise NNormError(f"{what} contains non-finite values")
    return arr


class Polynomial:
    """Real polynomial ``a_0 + a_1 t + ... + a_m t^m`` stored by coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float]):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        _finite(c, "polynomial")
        c.setflags(write=False)
        self.coeffs = c

    @property
    def degree(self) -> int:
        """Index of the last coefficient above the trim threshold (0 for zero)."""
        nz = np.nonzero(np.abs(self.coeffs) >= TRIM_TOL)[0]
        return int(nz[-1]) if nz.size else 0

    def trimmed(self) -> "Polynomial":
        return Polynomial(self.coeffs[: self.degree + 1])

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self.coeffs.size))
        out[: self.coeffs.size] = self.coeffs
        return out

    def __call__(self, t: float) -> float:
        return float(np.polynomial.polynomial.polyval(t, self.coeffs))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        L = max(self.coeffs.size, other.coeffs.size)
        return Polynomial(self.padded(L) + other.padded(L))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self) -> "Polynomial":
        return (-1.0) * self

    def __mul__(self, alpha: float) -> "Polynomial":
        if isinstance(alpha, (Polynomial, ProductPair)):
            return NotImplemented
        return Polynomial(float(alpha) * self.coeffs)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self.trimmed().coeffs, other.trimmed().coeffs
        return a.shape == b.shape and bool(np.all(a == b))

    def __hash__(self) -> int:
        return hash(tuple(self.trimmed().coeffs))

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs.tolist()})"


@dataclass(frozen=True)
class ProductPair:
    """Element ``(left, right)`` of a Cartesian product ``X x Y``."""

    left: object
    right: object

    def __post_init__(self):
        for side in (self.left, self.right):
            if isinstance(side, Polynomial):
                continue
            arr = np.asarray(side, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise NNormError("product pair sides must be non-empty vectors or polynomials")

    def __add__(self, other):
        if not isinstance(other, ProductPair):
            return NotImplemented
        return ProductPair(_add(self.left, other.left), _add(self.right, other.right))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, alpha):
        if isinstance(alpha, (Polynomial, ProductPair)):
            return NotImplemented
        return ProductPair(_scale(self.left, alpha), _scale(self.right, alpha))

    __rmul__ = __mul__


def _add(a, b):
    if isinstance(a, Polynomial):
        return a + b
    return np.asarray(a, dtype=float) + np.asarray(b, dtype=float)


def _scale(a, alpha):
    if isinstance(a, Polynomial):
        return float(alpha) * a
    return float(alpha) * np.asarray(a, dtype=float)


def add(x, y):
    """Sum of two elements of the same kind."""
    if isinstance(x, ProductPair):
        return x + y
    return _add(x, y)


def scale(alpha: float, x):
    """Scalar multiple of an element."""
    if isinstance(x, ProductPair):
        return x * alpha
    return _scale(x, alpha)


def sub(x, y):
    return add(x, scale(-1.0, y))


def element_kind(x) -> str:
    if isinstance(x, Polynomial):
        return "polynomial"
    if isinstance(x, ProductPair):
        return "pair"
    return "vector"


def _flatten(x, left_len: int | None = None) -> np.ndarray:
    if isinstance(x, Polynomial):
        return x.coeffs
    if isinstance(x, ProductPair):
        left = _flatten(x.left)
        if left_len is not None:
            left = np.pad(left, (0, left_len - left.size))
        return np.concatenate([left, _flatten(x.right)])
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise NNormError(f"vector must be 1-d, got shape {arr.shape}")
    return _finite(arr, "vector")


def stack_elements(elements: Sequence) -> np.ndarray:
    """Coordinate matrix of a homogeneous list of elements (zero padded)."""
    if len(elements) == 0:
        raise NNormError("empty tuple")
    kinds = {element_kind(e) for e in elements}
    if len(kinds) != 1:
        raise NNormError(f"mixed element kinds in tuple: {sorted(kinds)}")
    kind = kinds.pop()
    if kind == "pair":
        left_len = max(_flatten(e.left).size for e in elements)
        rows = [_flatten(e, left_len) for e in elements]
    else:
        rows = [_flatten(e) for e in elements]
    L = max(r.size for r in rows)
    if kind == "vector" and any(r.size != L for r in rows):
        raise NNormError(f"vectors of unequal dimension: {[r.size for r in rows]}")
    out = np.zeros((len(rows), L))
    for i, r in enumerate(rows):
        out[i, : r.size] = r
    return out


@dataclass(frozen=True)
class DependenceVerdict:
    dependent: bool
    rank: int
    tolerance_used: float


def is_linearly_dependent(elements: Sequence, tol: float = linalg.RANK_TOL) -> DependenceVerdict:
    """Rank test of a tuple of elements by row elimination.

    Polynomials are embedded as coefficient vectors padded to a common
    length; product pairs as the concatenation of both sides.
    """
    if len(elements) == 0:
        raise NNormError("empty tuple")
    if tol <= 0:
        raise NNormError("tol must be positive")
    if all(isinstance(e, ProductPair) for e in elements):
        lefts = stack_elements([e.left for e in elements])
        rights = stack_elements([e.right for e in elements])
        mat = np.hstack([lefts, rights])
    else:
        mat = stack_elements(elements)
    r = int(linalg.rank(mat, tol))
    return DependenceVerdict(dependent=r < len(elements), rank=r, tolerance_used=tol)


class NNorm:
    """Base class for n-norms evaluated on stacked coordinate arrays."""

    kind: str = ""
    element_kind: str = ""

    def __init__(self, arity: int):
        if int(arity) < 2:
            raise NNormError(f"arity must be >= 2, got {arity}")
        self.arity = int(arity)

    # coordinate space -------------------------------------------------
    @property
    def dim(self) -> int:
        """Number of coordinates used when sampling elements."""
        raise NotImplementedError

    def coords(self, elements: Sequence) -> np.ndarray:
        """``(k, D)`` coordinate matrix for a list of elements."""
        raise NotImplementedError

    def element(self, row: np.ndarray):
        """Inverse of :meth:`coords` for a single row."""
        raise NotImplementedError

    def basis(self) -> list:
        return [self.element(e) for e in np.eye(self.dim)]

    # evaluation -------------------------------------------------------
    def evaluate_coords(self, arr: np.ndarray) -> np.ndarray:
        """Norm values for a ``(m, n, D)`` stack of coordinate tuples."""
        raise NotImplementedError

    def scale_coords(self, arr: np.ndarray) -> np.ndarray:
        """Magnitude scale of each tuple; zero tests are relative to it."""
        return np.prod(np.max(np.abs(arr), axis=2), axis=1)

    def dependent_coords(self, arr: np.ndarray, tol: float = linalg.RANK_TOL) -> np.ndarray:
        return linalg.rank(arr, tol) < arr.shape[1]

    def tuple_coords(self, elements: Sequence) -> np.ndarray:
        self._check_tuple(elements)
        return self.coords(list(elements))[None]

    def __call__(self, elements: Sequence) -> float:
        return float(self.evaluate_coords(self.tuple_coords(elements))[0])

    def _check_tuple(self, elements: Sequence) -> None:
        if len(elements) != self.arity:
            raise NNormError(f"{self.kind} norm has arity {self.arity}, got {len(elements)} elements")
        for i, e in enumerate(elements):
            if element_kind(e) != self.element_kind:
                raise NNormError(
                    f"entry {i} is a {element_kind(e)}, {self.kind} norm expects {self.element_kind}"
                )

    def random_element(self, rng: np.random.Generator):
        return self.element(rng.standard_normal(self.dim))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "arity": self.arity}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(arity={self.arity})"


class DeterminantNorm(NNorm):
    """``|det|`` of the ``n x n`` matrix whose rows are the ``n`` vectors of ``R^n``."""

    kind = "determinant"
    element_kind = "vector"

    @property
    def dim(self) -> int:
        return self.arity

    def coords(self, elements):
        rows = [_finite(np.asarray(e, dtype=float), "vector") for e in elements]
        for i, r in enumerate(rows):
            if r.shape != (self.arity,):
                raise NNormError(
                    f"entry {i} has dimension {r.size}; determinant norm of arity "
                    f"{self.arity} needs vectors of R^{self.arity}"
                )
        return np.stack(rows) if rows else np.zeros((0, self.arity))

    def element(self, row):
        return np.array(row, dtype=float)

    def evaluate_coords(self, arr):
        return np.abs(linalg.det(arr))


class SignedDeterminantNorm(DeterminantNorm):
    """Deliberately broken "norm" (no absolute value) for negative tests."""

    kind = "determinant_signed"

    def evaluate_coords(self, arr):
        return linalg.det(arr)


class PolyCoeffProductNorm(NNorm):
    """Product over the tuple of each polynomial's largest absolute coefficient.

    The value is 0 whenever the tuple is linearly dependent.
    """

    kind = "poly_coeff_product"
    element_kind = "polynomial"

    def __init__(self, arity: int, max_degree: int = DEFAULT_MAX_DEGREE):
        super().__init__(arity)
        if max_degree < 0:
            raise NNormError("max_degree must be >= 0")
        self.max_degree = int(max_degree)

    @property
    def dim(self) -> int:
        return self.max_degree + 1

    def coords(self, elements):
        polys = list(elements)
        L = max([self.dim] + [p.coeffs.size for p in polys])
        return np.stack([p.padded(L) for p in polys]) if polys else np.zeros((0, L))

    def padded_coords(self, elements) -> np.ndarray:
        """Coordinates capped at :attr:`dim`; rejects longer polynomials."""
        out = []
        for p in elements:
            if p.degree > self.max_degree:
                raise NNormError(f"polynomial degree {p.degree} exceeds max_degree {self.max_degree}")
            out.append(p.padded(self.dim)[: self.dim])
        return np.stack(out) if out else np.zeros((0, self.dim))

    def element(self, row):
        return Polynomial(row)

    def evaluate_coords(self, arr):
        vals = np.prod(np.max(np.abs(arr), axis=2), axis=1)
        return np.where(self.dependent_coords(arr), 0.0, vals)

    def to_dict(self):
        return {**super().to_dict(), "max_degree": self.max_degree}


class _ProductNorm(NNorm):
    element_kind = "pair"

    def __init__(self, left: NNorm, right: NNorm):
        if left.arity != right.arity:
            raise NNormError(f"component arities differ: {left.arity} vs {right.arity}")
        if isinstance(left, _ProductNorm) or isinstance(right, _ProductNorm):
            raise NNormError("nested product norms are not supported")
        super().__init__(left.arity)
        self.left = left
        self.right = right

    @property
    def dim(self) -> int:
        return self.left.dim + self.right.dim

    def _side(self, norm: NNorm, items) -> np.ndarray:
        if isinstance(norm, PolyCoeffProductNorm):
            return norm.padded_coords(items)
        return norm.coords(items)

    def coords(self, elements):
        for i, e in enumerate(elements):
            if element_kind(e.left) != self.left.element_kind or element_kind(e.right) != self.right.element_kind:
                raise NNormError(f"entry {i} does not match the product's component spaces")
        a = self._side(self.left, [e.left for e in elements])
        b = self._side(self.right, [e.right for e in elements])
        return np.hstack([a, b])

    def element(self, row):
        row = np.asarray(row, dtype=float)
        d = self.left.dim
        return ProductPair(self.left.element(row[:d]), self.right.element(row[d:]))

    def split(self, arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.left.dim
        return arr[..., :d], arr[..., d:]

    def component_values(self, arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.split(arr)
        return self.left.evaluate_coords(a), self.right.evaluate_coords(b)

    def scale_coords(self, arr):
        a, b = self.split(arr)
        return self.left.scale_coords(a) + self.right.scale_coords(b)

    def to_dict(self):
        return {**super().to_dict(), "components": [self.left.to_dict(), self.right.to_dict()]}


class ProductSumNorm(_ProductNorm):
    """``||x-tuple||_X + ||y-tuple||_Y`` on ``X x Y``."""

    kind = "product_sum"

    def evaluate_coords(self, arr):
        a, b = self.component_values(arr)
        return a + b


class ProductMaxNorm(_ProductNorm):
    """``max(||x-tuple||_X, ||y-tuple||_Y)`` on ``X x Y``."""

    kind = "product_max"

    def evaluate_coords(self, arr):
        a, b = self.component_values(arr)
        return np.maximum(a, b)


def eval_nnorm(norm: NNorm, elements: Sequence) -> float:
    """Value of ``norm`` on the tuple ``elements``."""
    return norm(elements)


def make_norm(kind: str, arity: int, components: Sequence[NNorm] = (), **kw) -> NNorm:
    if kind == "determinant":
        return DeterminantNorm(arity)
    if kind == "determinant_signed":
        return SignedDeterminantNorm(arity)
    if kind == "poly_coeff_product":
        return PolyCoeffProductNorm(arity, **kw)
    if kind in ("product_sum", "product_max"):
        if len(components) != 2:
            raise NNormError(f"{kind} needs exactly two components")
        cls = ProductSumNorm if kind == "product_sum" else ProductMaxNorm
        return cls(*components)
    raise NNormError(f"unknown norm kind {kind!r}")


# ---------------------------------------------------------------------------
# axioms


@dataclass
class Violation:
    axiom: str
    sample: int
    detail: str
    witness: list


@dataclass
class AxiomReport:
    norm_kind: str
    n_samples: int
    violations: list[Violation] = field(default_factory=list)
    # violation counts per axiom, including ones not itemized
    checks: dict = field(default_factory=lambda: {"N1": 0, "N2": 0, "N3": 0, "N4": 0})

    @property
    def ok(self) -> bool:
        return sum(self.checks.values()) == 0


DEFAULT_SCALARS = (-2.0, -1.0, 0.0, 0.5, 3.0)


def check_axioms(norm: NNorm, samples: Sequence[Sequence], scalars: Sequence[float] = DEFAULT_SCALARS,
                 tol: float = ZERO_TOL, max_listed: int = 20) -> AxiomReport:
    """Check nullity, permutation invariance, homogeneity and the triangle
    inequality of ``norm`` on each sample tuple.

    Triangle checks pair the first slot of sample ``i`` with the first slot
    of sample ``i + 1``, keeping the remaining slots of sample ``i``.
    Violations beyond ``max_listed`` per axiom are counted but not itemized.
    """
    if len(samples) == 0:
        raise NNormError("check_axioms needs at least one sample")
    arr = np.concatenate([norm.tuple_coords(s) for s in samples])
    m, n, _ = arr.shape
    report = AxiomReport(norm.kind, m)
    counts = report.checks

    def flag(axiom, idx, detail):
        counts[axiom] += 1
        if counts[axiom] <= max_listed:
            report.violations.append(Violation(axiom, int(idx), detail, _jsonable(samples[idx])))

    base = norm.evaluate_coords(arr)
    scale_ = norm.scale_coords(arr)

    is_zero = base < tol * np.maximum(scale_, 1e-300)
    dep = norm.dependent_coords(arr, linalg.RANK_TOL)
    for i in np.nonzero(is_zero != dep)[0]:
        flag("N1", i, f"value={base[i]:.17g} dependent={bool(dep[i])}")
    for i in np.nonzero(base < -tol * np.maximum(scale_, 1.0))[0]:
        flag("N1", i, f"negative value {base[i]:.17g}")

    for perm in itertools.permutations(range(n)):
        if perm == tuple(range(n)):
            continue
        vals = norm.evaluate_coords(arr[:, list(perm), :])
        bad = np.abs(vals - base) > tol * (1.0 + np.abs(base))
        for i in np.nonzero(bad)[0]:
            flag("N2", i, f"perm={list(perm)} {vals[i]:.17g} vs {base[i]:.17g}")

    for alpha in scalars:
        scaled = arr.copy()
        scaled[:, 0, :] *= alpha
        vals = norm.evaluate_coords(scaled)
        want = abs(alpha) * base
        bad = np.abs(vals - want) > tol * (1.0 + np.abs(want))
        for i in np.nonzero(bad)[0]:
            flag("N3", i, f"alpha={alpha} {vals[i]:.17g} vs {want[i]:.17g}")

    if m >= 2:
        x = arr[:-1]
        y = arr[:-1].copy()
        y[:, 0, :] = arr[1:, 0, :]
        s = arr[:-1].copy()
        s[:, 0, :] = x[:, 0, :] + y[:, 0, :]
        lhs = norm.evaluate_coords(s)
        rhs = norm.evaluate_coords(x) + norm.evaluate_coords(y)
        for i in np.nonzero(lhs > rhs + tol)[0]:
            flag("N4", i, f"{lhs[i]:.17g} > {rhs[i]:.17g}")
    return report


def _jsonable(sample):
    from .serialize import encode_element

    return [encode_element(e) for e in sample]


def random_tuples(norm: NNorm, count: int, seed: int, dependent_fraction: float = 0.0) -> list[list]:
    """Seeded random tuples; a fraction can be made dependent on purpose."""
    from .rng import sub_rng

    out = []
    for i in range(count):
        rng = sub_rng(seed, "tuple", i)
        t = [norm.random_element(rng) for _ in range(norm.arity)]
        if dependent_fraction > 0 and rng.random() < dependent_fraction:
            w = rng.standard_normal(norm.arity - 1)
            acc = scale(0.0, t[0])
            for wi, e in zip(w, t[1:]):
                acc = add(acc, scale(wi, e))
            t[0] = acc
        out.append(t)
    return out


# ---------------------------------------------------------------------------
# balls


def ball_contains(norm: NNorm, anchors: Sequence, center, radius: float, point, open: bool = True) -> bool:
    """Membership of ``point`` in the ball of ``radius`` about ``center``
    measured by ``||point - center, e_2, ..., e_n||``."""
    if not radius > 0:
        raise NNormError("radius must be positive")
    if len(anchors) != norm.arity - 1:
        raise NNormError(f"need {norm.arity - 1} anchors, got {len(anchors)}")
    d = norm([sub(point, center), *anchors])
    return d < radius if open else d <= radius


def standard_anchor_sets(norm: NNorm, limit: int = 64) -> list[list]:
    """(n-1)-subsets of the coordinate basis, as anchor lists."""
    if isinstance(norm, _ProductNorm):
        left = standard_anchor_sets(norm.left, limit)
        right = standard_anchor_sets(norm.right, limit)
        sets = []
        for a, b in itertools.product(left, right):
            sets.append([ProductPair(x, y) for x, y in zip(a, b)])
            if len(sets) >= limit:
                break
        return sets
    basis = norm.basis()
    if isinstance(norm, PolyCoeffProductNorm):
        basis = basis[: max(norm.arity + 1, min(len(basis), 6))]
    return [list(c) for c in itertools.islice(itertools.combinations(basis, norm.arity - 1), limit)]
