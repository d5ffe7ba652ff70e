"""Small dense linear algebra: batched determinants, rank, cofactor vectors.

Everything here works on stacks of small matrices, shape ``(..., r, c)``,
using partial-pivot Gaussian elimination vectorized over the leading axes.
"""

from __future__ import annotations

import numpy as np

RANK_TOL = 1e-9


def det(mats: np.ndarray) -> np.ndarray:
    """Determinant of each square matrix in a stack, by partial pivoting."""
    a = np.array(mats, dtype=float, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"det needs square matrices, got shape {a.shape}")
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape((-1, n, n))
    m = a.shape[0]
    sign = np.ones(m)
    rows = np.arange(m)
    for j in range(n):
        p = j + np.argmax(np.abs(a[:, j:, j]), axis=1)
        swap = p != j
        if np.any(swap):
            sign[swap] = -sign[swap]
            pj = a[rows, p, :].copy()
            a[rows, p, :] = a[:, j, :]
            a[:, j, :] = pj
        piv = a[:, j, j]
        nz = piv != 0.0
        if j + 1 < n:
            factors = np.zeros((m, n - j - 1))
            factors[nz] = a[nz, j + 1:, j] / piv[nz, None]
            a[:, j + 1:, j:] -= factors[:, :, None] * a[:, None, j, j:]
    out = sign * np.prod(np.diagonal(a, axis1=1, axis2=2), axis=1)
    return out.reshape(batch_shape)


def rank(mats: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Row rank of each matrix in a stack.

    A pivot counts when its magnitude exceeds ``tol`` times the largest
    absolute entry of the original matrix. Zero matrices have rank 0.
    """
    a = np.array(mats, dtype=float, copy=True)
    if a.ndim < 2:
        raise ValueError(f"rank needs matrices, got shape {a.shape}")
    batch_shape = a.shape[:-2]
    r, c = a.shape[-2:]
    a = a.reshape((-1, r, c))
    m = a.shape[0]
    if r == 0 or c == 0:
        return np.zeros(batch_shape, dtype=int)
    thresh = tol * np.max(np.abs(a), axis=(1, 2))
    k = np.zeros(m, dtype=int)
    rows = np.arange(m)
    row_idx = np.arange(r)
    for j in range(c):
        active = k < r
        if not np.any(active):
            break
        col = np.abs(a[:, :, j])
        col[row_idx[None, :] < k[:, None]] = -1.0
        p = np.argmax(col, axis=1)
        ok = active & (col[rows, p] > thresh) & (thresh > 0)
        if not np.any(ok):
            continue
        b = rows[ok]
        kb, pb = k[ok], p[ok]
        tmp = a[b, pb, :].copy()
        a[b, pb, :] = a[b, kb, :]
        a[b, kb, :] = tmp
        piv = a[b, kb, j]
        below = row_idx[None, :] > kb[:, None]
        factors = np.where(below, a[b, :, j] / piv[:, None], 0.0)
        a[b] -= factors[:, :, None] * a[b, kb, :][:, None, :]
        k[ok] += 1
    return k.reshape(batch_shape)


def cofactor_vector(anchors: np.ndarray) -> np.ndarray:
    """Vector ``v`` with ``det([x; anchors]) == v @ x`` for every ``x``.

    ``anchors`` is an ``(n-1, n)`` array. Entries are the signed first-row
    cofactors, each minor computed with :func:`det`.
    """
    b = np.asarray(anchors, dtype=float)
    n = b.shape[1]
    if b.shape != (n - 1, n):
        raise ValueError(f"anchors must have shape (n-1, n), got {b.shape}")
    if n == 1:
        return np.ones(1)
    minors = np.stack([np.delete(b, j, axis=1) for j in range(n)])
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return signs * det(minors)


def null_space(mat: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as rows) of the null space of ``mat``."""
    a = np.atleast_2d(np.asarray(mat, dtype=float))
    if a.size == 0:
        return np.eye(a.shape[1])
    _, s, vt = np.linalg.svd(a)
    cutoff = tol * (s[0] if s.size else 0.0)
    r = int(np.sum(s > cutoff)) if s.size and s[0] > 0 else 0
    return vt[r:]


def solve_in_span(basis: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of ``y`` against the rows of ``basis``.

    Returns ``(coeffs, relative_residual)``; the residual is measured
    against ``max(1, |y|)``.
    """
    b = np.atleast_2d(np.asarray(basis, dtype=float))
    y = np.asarray(y, dtype=float)
    if b.shape[0] == 0:
        return np.zeros(0), float(np.linalg.norm(y)) / max(1.0, float(np.linalg.norm(y)))
    coeffs, *_ = np.linalg.lstsq(b.T, y, rcond=None)
    resid = float(np.linalg.norm(b.T @ coeffs - y))
    return coeffs, resid / max(1.0, float(np.linalg.norm(y)))
