"""Generalized edge centrality: the gradient of the top-r spectral objective.

For a static matrix with truncated SVD ``sum_k lam_k u_k v_k^T`` the score of
edge ``(i, j)`` is ``2 sum_k lam_k u_k[i] v_k[j]``. For a product
``X = M_0 M_1 ... M_{s-1}`` the score of edge ``(i, j)`` in step ``t`` is the
``(i, j)`` entry of ``2 A_t^T X_r B_t^T`` with ``A_t = M_0 ... M_{t-1}`` and
``B_t = M_{t+1} ... M_{s-1}``. That entry is again a rank-r bilinear form,
with ``u_k`` replaced by ``A_t^T u_k`` and ``v_k`` by ``B_t v_k``, so both
cases share one kernel and no n-by-n product is ever formed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateSpectrumWarning, GraphValidationError, ProductOverflowError
from .graph import GraphSequence, WeightedGraph
from .svd import DEFAULT_TOL, LinearOperator, SvdFactors, truncated_svd

__all__ = ["EdgeScoreList", "static_scores", "timevarying_scores", "propagate_factors"]


@dataclass(frozen=True)
class EdgeScoreList:
    """One score per support edge, keyed by ``(step, src, dst)``.

    Entries are stored in ``(step, src, dst)`` order unless
    ``sorted_descending`` is set, in which case scores are non-increasing and
    ties keep that lexicographic order.
    """

    step: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    score: np.ndarray
    sorted_descending: bool = False
    factors: SvdFactors | None = None

    def __len__(self) -> int:
        return len(self.score)

    def order(self) -> np.ndarray:
        """Permutation sorting by descending score, ties by ``(step, src, dst)``."""
        # -0.0 and 0.0 compare equal so the key is total and stable
        return np.lexsort((self.dst, self.src, self.step, -self.score))

    def sorted(self) -> "EdgeScoreList":
        if self.sorted_descending:
            return self
        o = self.order()
        return EdgeScoreList(self.step[o], self.src[o], self.dst[o], self.score[o], True, self.factors)

    def rows(self):
        for t, i, j, s in zip(self.step, self.src, self.dst, self.score):
            yield int(t), int(i), int(j), float(s)

    def to_dict(self) -> dict:
        return {(t, i, j): s for t, i, j, s in self.rows()}

    @property
    def degenerate(self) -> bool:
        return self.factors is not None and self.factors.degenerate


def _warn_degenerate(f: SvdFactors, r: int):
    if f.degenerate and f.singular_values[-1] > 0:
        warnings.warn(
            f"lambda_{r} and lambda_{r + 1} are tied (gap {f.gap:.2e}); "
            "edge scores are a subgradient, not the gradient",
            DegenerateSpectrumWarning,
            stacklevel=3,
        )


def static_scores(
    g: WeightedGraph,
    r: int,
    weights=None,
    *,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    factors: SvdFactors | None = None,
) -> EdgeScoreList:
    """Scores on the support of ``g`` for the matrix with entries ``weights``.

    ``weights`` (aligned with ``g``'s stored edges, zeros allowed) defaults to
    the graph's own weights. Precomputed ``factors`` skip the SVD.
    """
    if g.edge_count == 0:
        raise GraphValidationError("edge scores need a nonempty support")
    if factors is None:
        factors = truncated_svd(LinearOperator.from_graph(g, weights), r, tol=tol, seed=seed)
    _warn_degenerate(factors, r)
    sc = kernels.edge_scores(g.src, g.dst, factors.left_vectors, factors.right_vectors,
                             factors.singular_values)
    step = np.zeros(g.edge_count, dtype=np.int64)
    return EdgeScoreList(step, g.src.astype(np.int64), g.dst.astype(np.int64), sc, False, factors)


def propagate_factors(mats, factors: SvdFactors):
    """Per-step ``(A_t^T U, B_t V)`` for the sparse factors ``mats``.

    Raises :class:`ProductOverflowError` if any propagated block is not finite.
    """
    s = len(mats)
    left = [None] * s
    right = [None] * s
    left[0] = factors.left_vectors
    for t in range(1, s):
        left[t] = np.asarray(mats[t - 1].T @ left[t - 1])
    right[s - 1] = factors.right_vectors
    for t in range(s - 2, -1, -1):
        right[t] = np.asarray(mats[t + 1] @ right[t + 1])
    for blk in left + right:
        if not np.all(np.isfinite(blk)):
            raise ProductOverflowError(
                "partial products of the sequence overflowed float64; normalize the weights"
            )
    return left, right


def timevarying_scores(
    seq: GraphSequence,
    r: int,
    weights=None,
    *,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    factors: SvdFactors | None = None,
) -> EdgeScoreList:
    """Scores for every ``(t, i, j)`` on the supports of ``seq``'s steps.

    ``weights`` is an optional list of per-step arrays aligned with each
    step's stored edges. A single-step sequence reproduces
    :func:`static_scores` exactly.
    """
    if isinstance(seq, WeightedGraph):
        seq = GraphSequence([seq])
    if weights is None:
        weights = [None] * len(seq)
    if sum(g.edge_count for g in seq) == 0:
        raise GraphValidationError("edge scores need a nonempty support")
    mats = [g.to_csr(w) for g, w in zip(seq, weights)]
    if factors is None:
        factors = truncated_svd(LinearOperator(mats), r, tol=tol, seed=seed)
    _warn_degenerate(factors, r)
    left, right = propagate_factors(mats, factors)
    lam = factors.singular_values
    steps, srcs, dsts, scores = [], [], [], []
    for t, g in enumerate(seq):
        steps.append(np.full(g.edge_count, t, dtype=np.int64))
        srcs.append(g.src.astype(np.int64))
        dsts.append(g.dst.astype(np.int64))
        scores.append(kernels.edge_scores(g.src, g.dst, left[t], right[t], lam))
    return EdgeScoreList(
        np.concatenate(steps), np.concatenate(srcs), np.concatenate(dsts),
        np.concatenate(scores), False, factors,
    )
