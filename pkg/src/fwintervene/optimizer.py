"""Frank-Wolfe minimization of the top-r spectral objective under a weight budget.

The feasible set is ``{M : 0 <= M <= W on the support, sum(W - M) <= B}``
(and the same with one shared budget over every step of a sequence). Its
linear minimization oracle is solved exactly by a greedy pass: reduce edges
to zero in descending order of edge centrality until the budget runs out.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .centrality import EdgeScoreList, static_scores, timevarying_scores
from .errors import DataError, FeasibilityError, InfeasibleBudgetError
from .graph import GraphSequence, WeightedGraph, ensure_sequence
from .svd import DEFAULT_TOL, LinearOperator, SvdFactors, truncated_svd

__all__ = [
    "BudgetSpec",
    "LineSearchGrid",
    "SvdOptions",
    "InterventionResult",
    "resolve_budget",
    "top_k_edge_centrality",
    "top_k_timevarying",
    "frank_wolfe_static",
    "frank_wolfe_timevarying",
    "build_result",
    "check_result",
    "largest_singular_value",
]

# relative slack for budget feasibility and budget-equals-total detection
BUDGET_RTOL = 1e-9
EARLY_STOP_RTOL = 1e-8
SCORE_ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class BudgetSpec:
    """Budget given either as an absolute amount or as a fraction of total weight."""

    absolute: float | None = None
    fraction: float | None = None

    def __post_init__(self):
        if (self.absolute is None) == (self.fraction is None):
            raise ValueError("give exactly one of absolute or fraction")
        v = self.absolute if self.absolute is not None else self.fraction
        if not (math.isfinite(v) and v >= 0):
            raise DataError(f"budget must be a finite nonnegative number, got {v}")

    @classmethod
    def of_fraction(cls, fraction: float) -> "BudgetSpec":
        return cls(fraction=float(fraction))

    @classmethod
    def of_amount(cls, amount: float) -> "BudgetSpec":
        return cls(absolute=float(amount))

    def resolve(self, total: float) -> float:
        """Concrete budget for a graph (or sequence) of total weight ``total``."""
        b = self.absolute if self.absolute is not None else self.fraction * total
        if b > total * (1 + BUDGET_RTOL):
            raise InfeasibleBudgetError(f"budget {b:.6g} exceeds total reducible weight {total:.6g}")
        return min(b, total)

    def to_dict(self) -> dict:
        if self.absolute is not None:
            return {"absolute": self.absolute}
        return {"fraction": self.fraction}


def resolve_budget(budget, total: float) -> float:
    """Accept a :class:`BudgetSpec` or a plain number (absolute amount)."""
    if not isinstance(budget, BudgetSpec):
        budget = BudgetSpec.of_amount(float(budget))
    return budget.resolve(total)


@dataclass(frozen=True)
class LineSearchGrid:
    """Candidate step sizes in [0, 1]; zero is always included."""

    values: tuple = ()

    def __post_init__(self):
        v = np.unique(np.asarray(tuple(self.values) + (0.0,), dtype=np.float64))
        if np.any(v < 0) or np.any(v > 1) or not np.all(np.isfinite(v)):
            raise DataError("line-search steps must lie in [0, 1]")
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    @classmethod
    def log_spaced(cls, lo: float = 1e-3, hi: float = 1e-1, count: int = 30) -> "LineSearchGrid":
        if count < 1 or not 0 < lo <= hi <= 1:
            raise DataError(f"bad grid ({lo}, {hi}, {count})")
        return cls(tuple(np.geomspace(lo, hi, count)))

    @classmethod
    def default(cls) -> "LineSearchGrid":
        return cls.log_spaced()

    @property
    def positive(self) -> tuple:
        return tuple(x for x in self.values if x > 0)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SvdOptions:
    tol: float = DEFAULT_TOL
    line_search_tol: float = 1e-6
    seed: int = 0
    threads: int = 1


@dataclass
class InterventionResult:
    """Outcome of an intervention on a graph or a graph sequence.

    ``weights`` holds the reduced weights aligned with each original step's
    stored edges (zeros kept), ``reductions`` the nonzero ``W - M`` entries.
    ``objective_trace`` is ``f(M_0), ..., f(M_T), f(M*)`` for Frank-Wolfe and
    ``f(W), f(M)`` for one-shot strategies.
    """

    original: WeightedGraph | GraphSequence
    weights: list
    budget: float
    rank: int
    strategy: str
    objective_trace: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    budget_trace: list = field(default_factory=list)
    iterations_run: int = 0
    mop_up: bool = False
    factors: SvdFactors | None = None
    iteration_seconds: list = field(default_factory=list)

    @property
    def is_sequence(self) -> bool:
        return isinstance(self.original, GraphSequence)

    @property
    def reduced(self):
        seq = ensure_sequence(self.original)
        steps = [g.with_weights(w) for g, w in zip(seq, self.weights)]
        return GraphSequence(steps) if self.is_sequence else steps[0]

    @property
    def budget_used(self) -> float:
        seq = ensure_sequence(self.original)
        return math.fsum(math.fsum(g.weights - w) for g, w in zip(seq, self.weights))

    @property
    def reductions(self):
        """``(step, src, dst, amount)`` arrays for edges with positive reduction."""
        seq = ensure_sequence(self.original)
        out = [[], [], [], []]
        for t, (g, w) in enumerate(zip(seq, self.weights)):
            red = g.weights - w
            k = red > 0
            out[0].append(np.full(int(k.sum()), t, dtype=np.int64))
            out[1].append(g.src[k].astype(np.int64))
            out[2].append(g.dst[k].astype(np.int64))
            out[3].append(red[k])
        return tuple(np.concatenate(a) for a in out)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]

    @property
    def singular_values(self) -> np.ndarray:
        return self.factors.singular_values if self.factors is not None else np.array([])

    @property
    def lambda1(self) -> float:
        return largest_singular_value(self.original, self.weights)


def largest_singular_value(original, weights=None, tol=DEFAULT_TOL, seed=0) -> float:
    seq = ensure_sequence(original)
    op = LinearOperator.from_sequence(seq, weights)
    return float(truncated_svd(op, 1, tol=tol, seed=seed).singular_values[0])


def check_result(res: InterventionResult, rtol: float = BUDGET_RTOL) -> None:
    """Raise :class:`FeasibilityError` unless ``res`` satisfies every invariant.

    Box constraints, budget, monotone objective trace and support containment.
    """
    seq = ensure_sequence(res.original)
    if len(res.weights) != len(seq):
        raise FeasibilityError("one weight vector per step is required")
    for t, (g, w) in enumerate(zip(seq, res.weights)):
        if w.shape != g.weights.shape:
            raise FeasibilityError(f"step {t}: weights not aligned with the support")
        if np.any(w < 0):
            raise FeasibilityError(f"step {t}: negative reduced weight")
        if np.any(w > g.weights):
            raise FeasibilityError(f"step {t}: reduced weight exceeds original")
    used = res.budget_used
    if used > res.budget + rtol * max(res.budget, 1e-300) + 1e-300:
        raise FeasibilityError(f"budget used {used!r} exceeds budget {res.budget!r}")
    tr = np.asarray(res.objective_trace)
    if len(tr) and np.any(np.diff(tr) > 0):
        raise FeasibilityError("objective trace increases")


def _operator(seq, weights):
    return LinearOperator([g.to_csr(w) for g, w in zip(seq, weights)])


def _svd(seq, weights, r, tol, seed, start=None):
    return truncated_svd(_operator(seq, weights), r, tol=tol, seed=seed, start=start)


def _scores(seq, weights, r, factors, opts) -> EdgeScoreList:
    if len(seq) == 1:
        return static_scores(seq[0], r, weights[0], factors=factors)
    return timevarying_scores(seq, r, weights, factors=factors)


def _greedy(ref, scores: EdgeScoreList, budget: float, skip_nonpositive: bool = True):
    """Targets ``ref - reduction`` per step from one global greedy pass.

    ``scores`` must be in ``(step, src, dst)`` order, which is the
    concatenation order of ``ref``. With ``skip_nonpositive=False`` the
    pass keeps deleting past the positive scores until the budget is spent.
    """
    flat = np.concatenate(ref)
    sc = scores.score
    # round-off scores on edges the factors do not touch count as zero
    cut = SCORE_ZERO_RTOL * float(np.max(np.abs(sc), initial=0.0))
    sc = np.where(sc > cut, sc, 0.0)
    # stable sort on -score keeps (t, i, j) order among ties
    order = np.argsort(-sc, kind="stable")
    gate = sc if skip_nonpositive else np.ones_like(sc)
    red = kernels.greedy_reduction(order, flat, gate, float(budget))
    target = flat - red
    np.maximum(target, 0.0, out=target)
    out, lo = [], 0
    for w in ref:
        out.append(target[lo:lo + len(w)])
        lo += len(w)
    return out


def _aligned(seq, m_cur):
    """Weights of ``m_cur`` aligned with the support of ``seq``."""
    if m_cur is None:
        return [g.weights.copy() for g in seq]
    if isinstance(m_cur, (WeightedGraph, GraphSequence)):
        cur = ensure_sequence(m_cur)
        if len(cur) != len(seq):
            raise DataError("current iterate has a different number of steps")
        out = []
        for g, c in zip(seq, cur):
            w = np.zeros(g.edge_count)
            pos = g.edge_positions(c.src, c.dst)
            if np.any(pos < 0):
                raise DataError("current iterate has edges outside the reference support")
            w[pos] = c.weights
            out.append(w)
        return out
    if isinstance(m_cur, np.ndarray) and len(seq) == 1:
        m_cur = [m_cur]
    return [np.asarray(w, dtype=np.float64) for w in m_cur]


def _top_k(w_ref, budget, m_cur, r, opts):
    seq = ensure_sequence(w_ref)
    budget = resolve_budget(budget, seq.total_weight())
    cur = _aligned(seq, m_cur)
    f = _svd(seq, cur, r, opts.tol, opts.seed)
    sc = _scores(seq, cur, r, f, opts)
    target = _greedy([g.weights for g in seq], sc, budget)
    steps = [g.with_weights(w) for g, w in zip(seq, target)]
    return steps


def top_k_edge_centrality(w_ref: WeightedGraph, budget, m_cur=None, r: int = 1,
                          opts: SvdOptions = SvdOptions()) -> WeightedGraph:
    """Greedy descent target: ``w_ref`` with its top-scored edges removed.

    Scores are the rank-``r`` edge centralities of ``m_cur`` (default
    ``w_ref``), which may be a graph on a subset of ``w_ref``'s support or a
    weight array aligned with it. Edges are zeroed in descending score order
    while the cumulative reference weight fits in the budget; the boundary
    edge absorbs the remainder, and nonpositive scores are never reduced.
    """
    return _top_k(w_ref, budget, m_cur, r, opts)[0]


def top_k_timevarying(seq_ref: GraphSequence, budget, seq_cur=None, r: int = 1,
                      opts: SvdOptions = SvdOptions()) -> GraphSequence:
    """Sequence version of :func:`top_k_edge_centrality` with one global sort and budget."""
    return GraphSequence(_top_k(ensure_sequence(seq_ref), budget, seq_cur, r, opts))


def _used(ref, x) -> float:
    return math.fsum(math.fsum(w - v) for w, v in zip(ref, x))


def _combine(x, g, eta, ref):
    out = []
    for xi, gi, wi in zip(x, g, ref):
        y = (1.0 - eta) * xi + eta * gi
        # convex combinations stay in the box; clip rounding only
        np.clip(y, 0.0, wi, out=y)
        out.append(y)
    return out


def _line_search(seq, x, g, f_cur, grid, r, opts, start):
    etas = [e for e in grid.positive]

    def evaluate(eta):
        y = _combine(x, g, eta, [s.weights for s in seq])
        return _svd(seq, y, r, opts.line_search_tol, opts.seed, start=start).objective()

    if opts.threads > 1 and len(etas) > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as ex:
            values = list(ex.map(evaluate, etas))
    else:
        values = [evaluate(e) for e in etas]
    best_eta, best_f = 0.0, f_cur
    for eta, v in zip(etas, values):
        # strict improvement only: ties go to the smaller step
        if v < best_f:
            best_eta, best_f = eta, v
    return best_eta


def build_result(original, weights, budget, r, strategy, opts=SvdOptions(), **kw) -> InterventionResult:
    """Wrap per-step weights as a result, evaluating ``f`` before and after."""
    seq = ensure_sequence(original)
    f0 = _svd(seq, [g.weights for g in seq], r, opts.tol, opts.seed).objective()
    fac = _svd(seq, weights, r, opts.tol, opts.seed)
    return InterventionResult(original, list(weights), budget, r, strategy,
                              objective_trace=[f0, fac.objective()], factors=fac, **kw)


def _frank_wolfe(original, budget, r, T, grid, opts, strategy) -> InterventionResult:
    seq = ensure_sequence(original)
    if T < 1:
        raise DataError("iterations must be >= 1")
    grid = grid if isinstance(grid, LineSearchGrid) else LineSearchGrid(tuple(grid))
    n = seq.node_count
    if not 1 <= r <= n:
        raise DataError(f"rank must satisfy 1 <= r <= {n}")
    total = seq.total_weight()
    B = resolve_budget(budget, total)
    ref = [g.weights for g in seq]
    x = [w.copy() for w in ref]
    fac = _svd(seq, x, r, opts.tol, opts.seed)
    f_cur = fac.objective()
    trace, steps, used, seconds = [f_cur], [], [0.0], []
    if sum(g.edge_count for g in seq) == 0:
        return InterventionResult(original, x, B, r, strategy, trace + [f_cur], steps, used + [0.0],
                                  0, False, fac)
    for _ in range(T):
        tick = time.perf_counter()
        sc = _scores(seq, x, r, fac, opts)
        g = _greedy(ref, sc, B)
        if all(np.array_equal(gi, xi) for gi, xi in zip(g, x)):
            break
        eta = _line_search(seq, x, g, f_cur, grid, r, opts, fac.right_vectors)
        if eta == 0.0:
            break
        x_new = _combine(x, g, eta, ref)
        fac_new = _svd(seq, x_new, r, opts.tol, opts.seed)
        f_new = fac_new.objective()
        if f_new > f_cur:
            # the loose line-search SVD misranked this step; keep the iterate
            break
        x, fac = x_new, fac_new
        seconds.append(time.perf_counter() - tick)
        decrease = f_cur - f_new
        f_cur = f_new
        trace.append(f_cur)
        steps.append(eta)
        used.append(_used(ref, x))
        if decrease <= EARLY_STOP_RTOL * max(trace[-2], 1e-300):
            break
    iterations = len(steps)

    # spend whatever budget the convex combinations left unused
    mop = False
    remaining = B - _used(ref, x)
    if remaining > BUDGET_RTOL * max(B, 1e-300):
        cur_total = math.fsum(math.fsum(xi) for xi in x)
        if remaining >= cur_total * (1 - BUDGET_RTOL):
            y = [np.zeros_like(xi) for xi in x]
        else:
            sc = _scores(seq, x, r, fac, opts)
            y = _greedy(x, sc, remaining)
        fac_y = _svd(seq, y, r, opts.tol, opts.seed)
        if fac_y.objective() <= f_cur:
            x, fac, f_cur, mop = y, fac_y, fac_y.objective(), True
        else:
            mgrid = LineSearchGrid(grid.values + (1.0,))
            eta = _line_search(seq, x, y, f_cur, mgrid, r, opts, fac.right_vectors)
            if eta > 0:
                z = _combine(x, y, eta, ref)
                fac_z = _svd(seq, z, r, opts.tol, opts.seed)
                if fac_z.objective() <= f_cur:
                    x, fac, f_cur, mop = z, fac_z, fac_z.objective(), True
    trace.append(f_cur)
    return InterventionResult(original, x, B, r, strategy, trace, steps, used + [_used(ref, x)],
                              iterations, mop, fac, seconds)


def frank_wolfe_static(g: WeightedGraph, budget, r: int = 1, T: int = 30,
                       grid: LineSearchGrid | Sequence[float] | None = None,
                       opts: SvdOptions = SvdOptions()) -> InterventionResult:
    """Frank-Wolfe with the greedy edge-centrality oracle on a single graph.

    Each iteration moves to ``(1 - eta) M + eta G`` where ``G`` is the greedy
    target and ``eta`` minimizes ``f`` over ``grid``; the loop stops early
    when no step decreases ``f`` or the relative decrease falls below 1e-8.
    Budget left after the loop is spent by one more greedy pass against the
    final iterate.
    """
    if not isinstance(g, WeightedGraph):
        raise TypeError("frank_wolfe_static needs a WeightedGraph")
    return _frank_wolfe(g, budget, r, T, grid or LineSearchGrid.default(), opts, "frank_wolfe")


def frank_wolfe_timevarying(seq: GraphSequence, budget, r: int = 1, T: int = 30,
                            grid: LineSearchGrid | Sequence[float] | None = None,
                            opts: SvdOptions = SvdOptions()) -> InterventionResult:
    """Frank-Wolfe on the product of a graph sequence with one shared budget."""
    seq = ensure_sequence(seq)
    if not isinstance(seq, GraphSequence):
        raise TypeError("frank_wolfe_timevarying needs a GraphSequence")
    return _frank_wolfe(seq, budget, r, T, grid or LineSearchGrid.default(), opts, "frank_wolfe")
