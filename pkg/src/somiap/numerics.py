"""Dense kernels: orthonormal 2-D DCT-II and Jacobi eigensolvers."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError, ShapeError, SingularityError

MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray  # descending
    vectors: np.ndarray  # column i pairs with values[i]


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    return a


@lru_cache(maxsize=16)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; row k is frequency k."""
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * x + 1) * k / (2 * n))
    c[0] *= np.sqrt(1.0 / n)
    c[1:] *= np.sqrt(2.0 / n)
    c.setflags(write=False)
    return c


def dct2(block) -> np.ndarray:
    """Orthonormal separable 2-D DCT-II of a square block.

    The block mean is removed before transforming and restored on the DC
    term, so AC coefficients of a constant block come out exactly zero.
    """
    x = _as_matrix(block)
    n, m = x.shape
    if n != m:
        raise ShapeError(f"dct2 needs a square block, got {n}x{m}")
    if n < 2:
        raise ShapeError("dct2 needs a block of side >= 2")
    c = dct_matrix(n)
    mean = x.mean()
    out = c @ (x - mean) @ c.T
    out[0, 0] += n * mean
    return out


def idct2(coeffs) -> np.ndarray:
    x = _as_matrix(coeffs)
    n, m = x.shape
    if n != m:
        raise ShapeError(f"idct2 needs a square block, got {n}x{m}")
    c = dct_matrix(n)
    return c.T @ x @ c


def _round_robin(n: int):
    """Pair schedule covering every (p, q) once per sweep, disjoint per round."""
    players = list(range(n)) if n % 2 == 0 else list(range(n)) + [-1]
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, symmetric_tol: float = 1e-9) -> EigenDecomposition:
    """Symmetric eigendecomposition by cyclic Jacobi rotations.

    Rotations within a round act on disjoint index pairs, so each round is
    applied as one vectorised update. Stops when the largest off-diagonal
    entry drops to ``1e-12 * ||a||_F`` or after 100 sweeps.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ShapeError(f"jacobi_eigh needs a square matrix, got {n}x{m}")
    scale = max(1.0, np.abs(a).max())
    if np.abs(a - a.T).max() > symmetric_tol * scale:
        raise ContractError("jacobi_eigh needs a symmetric matrix")
    a = (a + a.T) / 2.0
    v = np.eye(n)
    tol = OFFDIAG_TOL * np.linalg.norm(a)
    rounds = _round_robin(n)

    for _ in range(MAX_SWEEPS):
        off = np.abs(a - np.diag(np.diag(a)))
        if n < 2 or off.max() <= tol:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > tol * 1e-3
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            app, aqq = a[p, p], a[q, q]
            tau = (aqq - app) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # rows: A <- J^T A
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            # columns: A <- A J, V <- V J
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], v[:, order])


def generalized_symmetric_eig(b, w, regularization: float = 0.0) -> EigenDecomposition:
    """Solve ``B v = lambda W v`` for symmetric ``B`` and positive definite ``W``.

    ``W`` is whitened through its own Jacobi decomposition. The returned
    vectors are W-orthonormal (``V^T W V = I``). ``regularization`` adds
    ``regularization * trace(W) / dim`` to the diagonal of ``W`` first.
    """
    b = _as_matrix(b)
    w = _as_matrix(w)
    if b.shape != w.shape or b.shape[0] != b.shape[1]:
        raise ShapeError(f"incompatible shapes {b.shape} and {w.shape}")
    dim = w.shape[0]
    if regularization:
        w = w + np.eye(dim) * (regularization * np.trace(w) / dim)
    wdec = jacobi_eigh(w)
    floor = 1e-12 * max(1.0, abs(wdec.values[0]))
    if wdec.values[-1] <= floor:
        raise SingularityError(
            f"W is not positive definite (smallest eigenvalue {wdec.values[-1]:.3e})"
        )
    u = wdec.vectors
    inv_sqrt = (u / np.sqrt(wdec.values)) @ u.T
    c = inv_sqrt @ b @ inv_sqrt
    inner = jacobi_eigh((c + c.T) / 2.0)
    return EigenDecomposition(inner.values, inv_sqrt @ inner.vectors)
