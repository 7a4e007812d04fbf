"""Batched inverses of small dense complex matrices.

LU with partial pivoting written against stacks ``(..., n, n)`` so a whole
frequency grid is inverted in one pass. Each stack element is processed
with the same elementwise operations, so results do not depend on how a
grid is chunked.
"""
from __future__ import annotations

import numpy as np


def lu_factor(A):
    """In-place style LU with row pivoting; returns ``(LU, perm)``.

    ``perm[..., i]`` is the original row placed at position ``i``.
    """
    LU = np.array(A, dtype=complex, copy=True)
    *batch, n, _ = LU.shape
    perm = np.broadcast_to(np.arange(n), tuple(batch) + (n,)).copy()
    idx = np.indices(tuple(batch)) if batch else ()
    for k in range(n - 1):
        pivot = k + np.argmax(np.abs(LU[..., k:, k]), axis=-1)
        if batch:
            rows_k = LU[..., k, :].copy()
            LU[..., k, :] = LU[(*idx, pivot)]
            LU[(*idx, pivot)] = rows_k
            pk = perm[..., k].copy()
            perm[..., k] = perm[(*idx, pivot)]
            perm[(*idx, pivot)] = pk
        else:
            p = int(pivot)
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        piv = LU[..., k, k]
        safe = np.where(piv == 0, 1.0, piv)
        factors = LU[..., k + 1:, k] / safe[..., None]
        LU[..., k + 1:, k] = factors
        LU[..., k + 1:, k + 1:] -= factors[..., :, None] * LU[..., k, None, k + 1:]
    return LU, perm


def matmul(A, B):
    """Stacked matrix product with a fixed summation order."""
    n = A.shape[-1]
    out = A[..., :, 0, None] * B[..., None, 0, :]
    for j in range(1, n):
        out = out + A[..., :, j, None] * B[..., None, j, :]
    return out


def lu_solve(LU, perm, B):
    """Solve ``A X = B`` given the factorisation of ``A`` (B is ``(..., n, m)``)."""
    n = LU.shape[-1]
    X = np.take_along_axis(np.asarray(B, dtype=complex), perm[..., :, None], axis=-2).copy()
    for i in range(1, n):
        for j in range(i):
            X[..., i, :] -= LU[..., i, j, None] * X[..., j, :]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            X[..., i, :] -= LU[..., i, j, None] * X[..., j, :]
        X[..., i, :] /= LU[..., i, i][..., None]
    return X


def inverse(A, refine=1):
    """Inverse via LU plus ``refine`` steps of iterative refinement.

    Returns ``(inv, residual, cond1)`` where ``residual`` is
    ``max |A inv - I|`` and ``cond1`` the 1-norm condition number, both per
    stack element.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=complex), A.shape)
    LU, perm = lu_factor(A)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = lu_solve(LU, perm, eye)
        for _ in range(refine):
            R = eye - matmul(A, inv)
            inv = inv + lu_solve(LU, perm, R)
        residual = np.abs(matmul(A, inv) - eye).max(axis=(-2, -1))
        cond = np.abs(A).sum(axis=-2).max(axis=-1) * np.abs(inv).sum(axis=-2).max(axis=-1)
    residual = np.where(np.isfinite(residual), residual, np.inf)
    cond = np.where(np.isfinite(cond), cond, np.inf)
    return inv, residual, cond


def inverse_2x2(A):
    """Closed-form inverse of one or many 2x2 matrices; returns ``(inv, det)``."""
    A = np.asarray(A, dtype=complex)
    a, b, c, d = A[..., 0, 0], A[..., 0, 1], A[..., 1, 0], A[..., 1, 1]
    det = a * d - b * c
    inv = np.empty_like(A)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv[..., 0, 0] = d / det
        inv[..., 0, 1] = -b / det
        inv[..., 1, 0] = -c / det
        inv[..., 1, 1] = a / det
    return inv, det
