"""Stochastic epidemic simulators for judging interventions.

Two models are provided:

* Node-level SEIR/SIR/SIS on a weighted graph. A susceptible node ``i`` is
  infected in an epoch with probability
  ``1 - prod_{j infectious} max(1 - W[i, j] * beta, 0)``; latency and
  recovery are geometric with means ``delta_e`` and ``delta_i`` epochs.
  Updates are synchronous, so every transition in an epoch is drawn from
  the state at the start of it.
* Metapopulation SEIR on a bipartite group-by-location visit matrix, where
  each group is a well-mixed population and locations couple them.

Randomness in the graph model is counter based: the uniform for
``(seed, replica, epoch, node)`` is a fixed hash, so traces do not depend on
how replicas are split across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import DataError
from .graph import BipartiteGraph, WeightedGraph
from .svd import truncated_svd

__all__ = [
    "EpidemicParams",
    "MetapopParams",
    "SimulationTrace",
    "simulate_graph",
    "simulate_metapop",
    "sweep_lambda_scaling",
    "initial_states",
    "infection_probability",
]

MODELS = ("SEIR", "SIR", "SIS", "METAPOP_SEIR")
_MODEL_CODE = {"SEIR": kernels.MODEL_SEIR, "SIR": kernels.MODEL_SIR, "SIS": kernels.MODEL_SIS}
# epoch key reserved for initial seeding; simulation epochs never reach it
SEED_EPOCH = 2**32
# metapopulation replicas share one generator per block of this many, keyed by
# (seed, block, epoch); fixed so results never depend on thread count
METAPOP_BLOCK = 256


@dataclass(frozen=True)
class EpidemicParams:
    model: str = "SEIR"
    beta: float = 0.05
    p0: float = 0.01
    delta_e: float = 4.0
    delta_i: float = 5.0
    epochs: int = 50
    replicas: int = 1
    seed: int = 0

    def __post_init__(self):
        model = self.model.upper()
        object.__setattr__(self, "model", model)
        if model not in MODELS:
            raise DataError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise DataError("beta must be >= 0")
        if not 0 <= self.p0 <= 1:
            raise DataError("p0 must lie in [0, 1]")
        if self.delta_e < 1 or self.delta_i < 1:
            raise DataError("delta_e and delta_i must be >= 1")
        if self.epochs < 1 or self.replicas < 1:
            raise DataError("epochs and replicas must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MetapopParams:
    """Metapopulation parameters; ``poi_*`` arrays are per location, ``populations`` per group."""

    psi: float
    poi_areas: np.ndarray
    poi_dwell: np.ndarray
    populations: np.ndarray
    epidemic: EpidemicParams = field(default_factory=lambda: EpidemicParams(model="METAPOP_SEIR"))

    def __post_init__(self):
        areas = np.asarray(self.poi_areas, dtype=np.float64)
        dwell = np.asarray(self.poi_dwell, dtype=np.float64)
        pops = np.asarray(self.populations)
        if np.any(areas <= 0) or not np.all(np.isfinite(areas)):
            raise DataError("POI areas must be positive")
        if np.any(dwell < 0) or areas.shape != dwell.shape:
            raise DataError("POI dwell times must be nonnegative, one per POI")
        if np.any(pops < 1) or np.any(pops != np.floor(pops)):
            raise DataError("group populations must be positive integers")
        if self.psi < 0:
            raise DataError("psi must be >= 0")
        object.__setattr__(self, "poi_areas", areas)
        object.__setattr__(self, "poi_dwell", dwell)
        object.__setattr__(self, "populations", pops.astype(np.int64))


@dataclass
class SimulationTrace:
    """Compartment counts ``counts[replica, epoch, (S, E, I, R)]``.

    ``ever[replica, epoch]`` counts nodes (or individuals) that have left S
    by that epoch, including the initial seeds.
    """

    counts: np.ndarray
    ever: np.ndarray
    seed: int
    params: EpidemicParams
    group_counts: np.ndarray | None = None

    @property
    def replicas(self) -> int:
        return self.counts.shape[0]

    @property
    def epochs(self) -> int:
        return self.counts.shape[1] - 1

    @property
    def total_infected(self) -> np.ndarray:
        return self.ever[:, -1]

    def mean_total_infected(self) -> float:
        return float(np.mean(self.total_infected))

    def std_total_infected(self) -> float:
        ti = self.total_infected
        return float(np.std(ti, ddof=1)) if len(ti) > 1 else 0.0

    def rows(self):
        """``(replica, epoch, S, E, I, R)`` tuples in replica-major order."""
        R, E, _ = self.counts.shape
        for r in range(R):
            for e in range(E):
                yield (r, e, *(int(x) for x in self.counts[r, e]))

    def summary(self) -> dict:
        return {
            "replicas": self.replicas,
            "epochs": self.epochs,
            "seed": self.seed,
            "mean_total_infected": self.mean_total_infected(),
            "std_total_infected": self.std_total_infected(),
        }


def _seed_count(p0, n):
    x = p0 * n
    k = round(x)
    # guard against 0.07 * 100 = 7.000000000000001
    return int(k) if abs(x - k) <= 1e-9 * max(1.0, x) else int(math.ceil(x))


def initial_states(n, params: EpidemicParams, replicas) -> np.ndarray:
    """``(len(replicas), n)`` int8 states with ``ceil(p0 * n)`` random seeds each."""
    k = min(n, _seed_count(params.p0, n))
    seeded = kernels.EXPOSED if params.model == "SEIR" else kernels.INFECTIOUS
    states = np.zeros((len(replicas), n), dtype=np.int8)
    nodes = np.arange(n, dtype=np.uint64)
    for row, r in enumerate(replicas):
        u = kernels.hash_uniform(params.seed, r, SEED_EPOCH, nodes)
        states[row, np.argsort(u, kind="stable")[:k]] = seeded
    return states


def infection_probability(g: WeightedGraph, infectious, beta: float) -> np.ndarray:
    """Per-node infection probability given a boolean infectious mask."""
    infectious = np.asarray(infectious, dtype=bool)
    f = np.where(infectious[g.indices], np.maximum(1.0 - g.weights * beta, 0.0), 1.0)
    p = np.zeros(g.node_count)
    for i in range(g.node_count):
        lo, hi = g.indptr[i], g.indptr[i + 1]
        if hi > lo:
            p[i] = 1.0 - np.prod(f[lo:hi])
    return p


def simulate_graph(g: WeightedGraph, params: EpidemicParams, threads: int = 1,
                   initial=None) -> SimulationTrace:
    """Run ``params.replicas`` independent replicas of the node-level model.

    ``initial`` optionally fixes the starting states (length ``n`` array of
    0=S, 1=E, 2=I, 3=R) for every replica instead of random seeding.
    """
    if params.model not in _MODEL_CODE:
        raise DataError(f"simulate_graph supports SEIR, SIR and SIS, not {params.model}")
    n = g.node_count
    R = params.replicas
    reps = np.arange(R, dtype=np.int64)
    if initial is None:
        states = initial_states(n, params, reps)
    else:
        init = np.asarray(initial, dtype=np.int8)
        if init.shape != (n,) or init.min(initial=0) < 0 or init.max(initial=0) > 3:
            raise DataError("initial states must be n values in 0..3")
        states = np.tile(init, (R, 1))
    args = (g.indptr, g.indices, g.weights, float(params.beta), _MODEL_CODE[params.model])
    tail = (1.0 / params.delta_e, 1.0 / params.delta_i, int(params.epochs), int(params.seed))

    def run(lo, hi):
        st = np.ascontiguousarray(states[lo:hi])
        c, e = kernels.run_graph_epidemic(*args, st, reps[lo:hi], *tail)
        return c, e

    threads = max(1, int(threads))
    if threads == 1 or R == 1:
        counts, ever = run(0, R)
    else:
        bounds = np.linspace(0, R, min(threads, R) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda b: run(*b), zip(bounds[:-1], bounds[1:])))
        counts = np.concatenate([p[0] for p in parts])
        ever = np.concatenate([p[1] for p in parts])
    return SimulationTrace(counts, ever, params.seed, params)


def _bipartite_steps(b):
    steps = [b] if isinstance(b, BipartiteGraph) else list(b)
    if not steps:
        raise DataError("metapopulation model needs at least one visit matrix")
    shape = (steps[0].left_count, steps[0].right_count)
    for s in steps:
        if (s.left_count, s.right_count) != shape:
            raise DataError("visit matrices must share their dimensions")
    return steps


def _block_rng(seed, block, epoch):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block, epoch])))


def _metapop_block(mats, params: MetapopParams, block, size, init):
    """Replicas ``block * METAPOP_BLOCK`` onward, vectorized as ``(size, groups)`` arrays."""
    ep = params.epidemic
    pops = params.populations
    N = pops.astype(np.float64)
    C = len(N)
    d2a = params.poi_dwell**2 / params.poi_areas
    out = np.zeros((size, ep.epochs + 1, C, 4), dtype=np.int64)
    if init is None:
        e0 = _block_rng(ep.seed, block, SEED_EPOCH).binomial(pops, ep.p0, size=(size, C))
        S, E = pops - e0, e0
        I = np.zeros((size, C), np.int64)
        Rc = np.zeros((size, C), np.int64)
    else:
        S, E, I, Rc = (np.tile(init[:, k], (size, 1)) for k in range(4))
    out[:, 0] = np.stack([S, E, I, Rc], axis=-1)
    for t in range(ep.epochs):
        W, V = mats[t % len(mats)]
        rng = _block_rng(ep.seed, block, t)
        frac_i = I / N
        ip = np.asarray(W.T @ frac_i.T).T
        beta_p = params.psi * d2a * V
        with np.errstate(divide="ignore", invalid="ignore"):
            lam_p = np.where(V > 0, beta_p * ip / V, 0.0)
        lam = np.asarray(W @ lam_p.T).T
        lam_c = np.clip(ep.beta * frac_i, 0.0, 1.0)
        n_se = rng.poisson(S / N * lam) + rng.binomial(S, lam_c)
        n_se = np.minimum(n_se, S)
        n_ei = rng.binomial(E, 1.0 / ep.delta_e)
        n_ir = rng.binomial(I, 1.0 / ep.delta_i)
        S, E, I, Rc = S - n_se, E + n_se - n_ei, I + n_ei - n_ir, Rc + n_ir
        out[:, t + 1] = np.stack([S, E, I, Rc], axis=-1)
    return out


def simulate_metapop(b, params: MetapopParams, threads: int = 1, initial=None) -> SimulationTrace:
    """Metapopulation SEIR driven by one visit matrix or a cyclic sequence of them.

    Epoch ``t`` uses visit matrix ``t mod s``. ``initial`` is an optional
    ``(groups, 4)`` array of starting S/E/I/R counts; by default each group
    seeds ``Binomial(N_c, p0)`` exposed individuals. Transitions that would
    overdraw a compartment are capped at its size. Replicas are drawn in
    fixed blocks of :data:`METAPOP_BLOCK`, so a run with more replicas
    extends, and never changes, a run with fewer.
    """
    steps = _bipartite_steps(b)
    C, P = steps[0].left_count, steps[0].right_count
    if len(params.populations) != C or len(params.poi_areas) != P:
        raise DataError("populations/POI arrays do not match the visit matrix dimensions")
    mats = []
    for s in steps:
        W = sp.csr_matrix(s.to_csr())
        mats.append((W, np.asarray(W.sum(axis=0)).ravel()))
    init = None
    if initial is not None:
        init = np.asarray(initial, dtype=np.int64)
        if init.shape != (C, 4) or np.any(init < 0) or np.any(init.sum(axis=1) != params.populations):
            raise DataError("initial counts must be (groups, 4), nonnegative, summing to populations")
    R = params.epidemic.replicas
    nblocks = -(-R // METAPOP_BLOCK)

    def work(k):
        # always draw a full block so a prefix of replicas never depends on R
        return _metapop_block(mats, params, k, METAPOP_BLOCK, init)[: R - k * METAPOP_BLOCK]

    if threads > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            per = list(ex.map(work, range(nblocks)))
    else:
        per = [work(k) for k in range(nblocks)]
    group = np.concatenate(per)
    counts = group.sum(axis=2)
    ever = params.populations.sum() - counts[:, :, 0]
    return SimulationTrace(counts, ever, params.epidemic.seed, params.epidemic, group)


def sweep_lambda_scaling(g: WeightedGraph, params: EpidemicParams, scales, threads: int = 1):
    """Mean and standard deviation of total infections on ``c * W`` for each scale ``c``."""
    base = float(truncated_svd(g, 1).singular_values[0]) if g.edge_count else 0.0
    rows = []
    for c in scales:
        c = float(c)
        if c < 0:
            raise DataError("scales must be nonnegative")
        tr = simulate_graph(g.scaled(c), params, threads=threads)
        rows.append({
            "scale": c,
            "lambda1": c * base,
            "mean_total_infected": tr.mean_total_infected(),
            "std_total_infected": tr.std_total_infected(),
            "replicas": tr.replicas,
        })
    return rows
