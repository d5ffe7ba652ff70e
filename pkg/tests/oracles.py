"""Independent reference computations used by the tests.

Nothing here calls into the package: determinants by Laplace expansion,
rank by exact rational elimination, norms by brute force on grids.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def det_cofactor(m) -> float:
    """Determinant by recursive first-row Laplace expansion."""
    m = [list(map(float, row)) for row in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det_cofactor(minor)
    return total


def cofactor_vector_oracle(anchors) -> np.ndarray:
    """``v_j`` = ``det`` of the matrix with first row ``e_j`` over the anchors."""
    anchors = [list(map(float, b)) for b in anchors]
    n = len(anchors) + 1
    return np.array([det_cofactor([list(np.eye(n)[j])] + anchors) for j in range(n)])


def rank_exact(rows) -> int:
    """Rank by Gaussian elimination over the rationals (exact for float input)."""
    mat = [[Fraction(float(v)) for v in row] for row in rows]
    if not mat:
        return 0
    r = 0
    cols = len(mat[0])
    for c in range(cols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c] / mat[r][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    return r


def poly_coeff_product_oracle(polys) -> float:
    """Product of max-abs coefficients, or 0 for a dependent tuple (exact rank)."""
    L = max(len(p) for p in polys)
    rows = [list(p) + [0.0] * (L - len(p)) for p in polys]
    if rank_exact(rows) < len(rows):
        return 0.0
    return float(np.prod([max(abs(c) for c in p) for p in polys]))


def grid_sup_ratio(values, norms) -> float:
    """``max |T(x)| / ||x, b..||`` over grid points with nonzero norm."""
    values, norms = np.asarray(values), np.asarray(norms)
    ok = norms > 1e-12
    return float(np.max(np.abs(values[ok]) / norms[ok]))


def grid(dim: int, lo: float = -2.0, hi: float = 2.0, steps: int = 41) -> np.ndarray:
    axis = np.linspace(lo, hi, steps)
    return np.array(list(itertools.product(axis, repeat=dim)))


def det_norm_oracle(rows) -> float:
    return abs(det_cofactor(rows))
