"""Truncated SVD of sparse matrices and of products of sparse matrices.

The solver is a restarted block Krylov method on ``X^T X``: each cycle grows
an orthonormal basis ``P`` of the right Krylov space from a start block,
extracts Ritz triples from ``X P``, and restarts from the leading Ritz
vectors until every wanted triple meets the residual bound. Only
matrix-block products with ``X`` and ``X^T`` are needed, so ``X`` never has
to be formed when it is a product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import ProductOverflowError, SvdConvergenceError
from .graph import GraphSequence, WeightedGraph

__all__ = [
    "LinearOperator",
    "SvdFactors",
    "LowRankMatrix",
    "truncated_svd",
    "objective",
    "low_rank_reconstruct",
    "DEFAULT_TOL",
    "DEGENERATE_GAP",
]

DEFAULT_TOL = 1e-9
DEGENERATE_GAP = 1e-10


class LinearOperator:
    """Square matrix given as an ordered product ``F[0] @ F[1] @ ... @ F[-1]``.

    Factors may be scipy sparse matrices or dense arrays. A single factor is
    the ordinary static case.
    """

    def __init__(self, factors: Sequence):
        factors = list(factors)
        if not factors:
            raise ValueError("LinearOperator needs at least one factor")
        n = factors[0].shape[0]
        for f in factors:
            if f.shape != (n, n):
                raise ValueError(f"factor shape {f.shape} does not match ({n}, {n})")
        self.factors = factors
        # transposes are built once; rebuilding them per product dominates small problems
        self._transposed = [f.T.tocsr() if sp.issparse(f) else np.asarray(f).T for f in factors]
        self.shape = (n, n)

    @classmethod
    def from_graph(cls, g: WeightedGraph, weights=None) -> "LinearOperator":
        return cls([g.to_csr(weights)])

    @classmethod
    def from_sequence(cls, seq: GraphSequence, weights=None) -> "LinearOperator":
        if weights is None:
            weights = [None] * len(seq)
        return cls([g.to_csr(w) for g, w in zip(seq, weights)])

    def matmat(self, x: np.ndarray) -> np.ndarray:
        for f in reversed(self.factors):
            x = f @ x
        return np.asarray(x)

    def rmatmat(self, y: np.ndarray) -> np.ndarray:
        for f in self._transposed:
            y = f @ y
        return np.asarray(y)

    def to_dense(self) -> np.ndarray:
        out = np.eye(self.shape[0])
        for f in self.factors:
            f = f.toarray() if sp.issparse(f) else np.asarray(f)
            out = out @ f
        return out

    @property
    def nnz(self) -> int:
        return sum(f.nnz if sp.issparse(f) else int(np.count_nonzero(f)) for f in self.factors)


def as_operator(x) -> LinearOperator:
    if isinstance(x, LinearOperator):
        return x
    if isinstance(x, WeightedGraph):
        return LinearOperator.from_graph(x)
    if isinstance(x, GraphSequence):
        return LinearOperator.from_sequence(x)
    if sp.issparse(x):
        return LinearOperator([sp.csr_matrix(x)])
    return LinearOperator([np.asarray(x, dtype=np.float64)])


@dataclass(frozen=True)
class SvdFactors:
    """Leading ``rank`` singular triples, descending, sign-normalized.

    ``gap`` is ``lambda_r - lambda_{r+1}`` with ``lambda_{r+1}`` taken from
    the extra Ritz triple the solver carries (zero when ``r == n``).
    ``residual`` is the largest achieved ``||X^T u_k - lambda_k v_k|| / lambda_1``.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    gap: float
    next_value: float
    residual: float
    cycles: int = field(default=0, compare=False)

    @property
    def rank(self) -> int:
        return len(self.singular_values)

    @property
    def degenerate(self) -> bool:
        return self.gap < DEGENERATE_GAP

    def objective(self) -> float:
        return float(np.sum(self.singular_values**2))


class LowRankMatrix:
    """Lazy ``sum_k lambda_k u_k v_k^T``; single entries cost O(r)."""

    def __init__(self, factors: SvdFactors):
        self._lam = factors.singular_values
        self._u = factors.left_vectors
        self._v = factors.right_vectors
        self.shape = (self._u.shape[0], self._v.shape[0])

    def __getitem__(self, ij):
        i, j = ij
        return float(np.dot(self._u[i] * self._lam, self._v[j]))

    def entries(self, rows, cols) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        return np.einsum("ek,k,ek->e", self._u[rows], self._lam, self._v[cols])

    def to_dense(self) -> np.ndarray:
        return (self._u * self._lam) @ self._v.T


def low_rank_reconstruct(factors: SvdFactors) -> LowRankMatrix:
    return LowRankMatrix(factors)


def _orthonormalize(x, basis, scale):
    """Columns of ``x`` made orthonormal to ``basis`` and to each other.

    Directions whose norm after projection falls below ``1e-12 * scale`` are
    dropped, which is how an exhausted (invariant) Krylov space shows up.
    """
    has_basis = basis is not None and basis.shape[1] > 0
    if has_basis:
        x = x - basis @ (basis.T @ x)
    if x.shape[1] == 0:
        return x
    q, r, _ = sla.qr(x, mode="economic", pivoting=True)
    d = np.abs(np.diag(r))
    keep = int(np.count_nonzero(d > 1e-12 * max(scale, np.finfo(float).tiny)))
    q = q[:, :keep]
    if keep and has_basis:
        # second projection pass restores orthogonality lost to cancellation
        q = q - basis @ (basis.T @ q)
        q, _ = np.linalg.qr(q)
    return q


def _sign_normalize(u, v):
    idx = np.argmax(np.abs(u), axis=0)
    flip = u[idx, np.arange(u.shape[1])] < 0
    s = np.where(flip, -1.0, 1.0)
    return u * s, v * s


def truncated_svd(
    op,
    r: int,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    *,
    start=None,
    max_cycles=None,
    block_size=None,
    depth: int = 8,
) -> SvdFactors:
    """Leading ``r`` singular triples of ``op`` (graph, matrix or :class:`LinearOperator`).

    Every returned triple satisfies ``||X v - lambda u|| <= tol * lambda_1``
    and ``||X^T u - lambda v|| <= tol * lambda_1``; for numerically zero
    singular values ``u`` is only guaranteed orthogonal to the other left
    vectors. ``start`` optionally seeds the first block with approximate
    right singular vectors (columns); the remainder is filled from ``seed``.
    The result is a deterministic function of the inputs.

    Raises :class:`SvdConvergenceError` when ``max_cycles`` (default ``50 * r``)
    restarts do not reach ``tol``.
    """
    op = as_operator(op)
    n = op.shape[0]
    r = int(r)
    if r < 1 or r > n:
        raise ValueError(f"rank must satisfy 1 <= r <= n={n}, got {r}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    want = min(r + 1, n)
    b = min(n, block_size or (want + max(4, want // 2)))
    maxdim = min(n, b * max(depth, 2))
    if max_cycles is None:
        max_cycles = 50 * r
    rng = np.random.default_rng(seed)
    block = rng.standard_normal((n, b))
    if start is not None:
        start = np.asarray(start, dtype=np.float64)[:, :b]
        block[:, : start.shape[1]] = start

    residual = math.inf
    P = np.empty((n, maxdim), order="F")
    AP = np.empty((n, maxdim), order="F")
    for cycle in range(1, max_cycles + 1):
        q = _orthonormalize(block, None, float(np.max(np.linalg.norm(block, axis=0))))
        dim = q.shape[1]
        P[:, :dim] = q
        AP[:, :dim] = op.matmat(q)
        lo = 0
        exhausted = dim >= n
        while dim < maxdim:
            raw = op.rmatmat(AP[:, lo:dim])
            scale = float(np.max(np.linalg.norm(raw, axis=0))) if raw.size else 0.0
            q = _orthonormalize(raw[:, : maxdim - dim], P[:, :dim], scale) if scale else raw[:, :0]
            if q.shape[1] == 0:
                # invariant subspace: further cycles cannot improve the Ritz triples
                exhausted = True
                break
            lo, dim = dim, dim + q.shape[1]
            P[:, lo:dim] = q
            AP[:, lo:dim] = op.matmat(q)
            exhausted = exhausted or dim >= n
        if not np.all(np.isfinite(AP[:, :dim])):
            raise ProductOverflowError(
                "matrix-vector products overflowed float64; normalize the weights"
            )
        # select the leading Ritz subspace cheaply from the Gram matrix, then
        # extract accurate triples from it with a small QR-based Rayleigh-Ritz
        gram = AP[:, :dim].T @ AP[:, :dim]
        w, z = np.linalg.eigh(gram)
        z = z[:, ::-1][:, : min(b, dim)]
        vb = P[:, :dim] @ z
        qy, ry = np.linalg.qr(AP[:, :dim] @ z)
        ut, s, vt = np.linalg.svd(ry)
        u = qy @ ut
        v = vb @ vt.T
        lam1 = float(s[0]) if len(s) else 0.0
        top = min(r, len(s))
        resid = np.linalg.norm(op.rmatmat(u[:, :top]) - v[:, :top] * s[:top], axis=0)
        resid = np.where(s[:top] <= tol * lam1, 0.0, resid)
        residual = float(resid.max() / lam1) if lam1 > 0 else 0.0
        if (top == r and residual <= tol) or exhausted:
            break
        block = v
        if block.shape[1] < b:
            block = np.hstack([block, rng.standard_normal((n, b - block.shape[1]))])
    else:
        raise SvdConvergenceError(
            f"truncated SVD (r={r}) did not converge in {max_cycles} cycles; "
            f"relative residual {residual:.3e} > tol {tol:.1e}",
            residual=residual,
        )

    lam = np.zeros(r)
    U = np.zeros((n, r))
    V = np.zeros((n, r))
    top = min(r, len(s))
    lam[:top] = s[:top]
    U[:, :top] = u[:, :top]
    V[:, :top] = v[:, :top]
    if top < r:
        # complete with orthonormal directions for the zero singular values
        fill = rng.standard_normal((n, r - top))
        U[:, top:] = _orthonormalize(fill, U[:, :top], 1.0)[:, : r - top]
        V[:, top:] = _orthonormalize(fill.copy(), V[:, :top], 1.0)[:, : r - top]
    U, V = _sign_normalize(U, V)
    nxt = float(s[r]) if len(s) > r and r < n else 0.0
    return SvdFactors(
        singular_values=lam,
        left_vectors=U,
        right_vectors=V,
        gap=float(lam[-1] - nxt),
        next_value=nxt,
        residual=residual,
        cycles=cycle,
    )


def objective(op, r: int, tol: float = DEFAULT_TOL, seed: int = 0, **kwargs) -> float:
    """Sum of the ``r`` largest squared singular values."""
    return truncated_svd(op, r, tol=tol, seed=seed, **kwargs).objective()
