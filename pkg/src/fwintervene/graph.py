"""Sparse weighted graphs, graph sequences and bipartite visit networks.

A :class:`WeightedGraph` is an immutable CSR matrix of nonnegative weights.
The stored entries are exactly the edge support: zero weights are never
stored, duplicate ``(src, dst)`` pairs are rejected, and self-loops are
allowed. Every optimizer works on weight vectors aligned with this CSR
order, which is also the lexicographic ``(src, dst)`` order used for
tie-breaking.
"""

from __future__ import annotations

import csv
import math
import re
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from ._io import atomic_write_csv, atomic_write_text
from .errors import GraphFormatError, GraphValidationError, ProductOverflowError

__all__ = [
    "WeightedGraph",
    "GraphSequence",
    "BipartiteGraph",
    "parse_transform",
    "transform_weights",
    "load_edge_list",
    "save_edge_list",
    "load_sequence",
    "bipartite_to_square",
    "load_bipartite",
    "write_node_map",
    "read_node_map",
]


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


class WeightedGraph:
    """Immutable sparse nonnegative weight matrix over ``node_count`` nodes.

    Build instances with :meth:`from_edges` (validating) rather than the
    raw constructor. ``directed=False`` asserts that the stored support and
    weights are symmetric; both directions are still stored as separate
    entries, each being an independent variable for the optimizer.
    """

    __slots__ = ("_n", "_indptr", "_indices", "_data", "_directed", "_node_ids", "_src")

    def __init__(self, node_count, indptr, indices, data, directed=True, node_ids=None):
        self._n = int(node_count)
        self._indptr = _readonly(indptr, np.int64)
        self._indices = _readonly(indices, np.int64)
        self._data = _readonly(data, np.float64)
        self._directed = bool(directed)
        self._node_ids = tuple(node_ids) if node_ids is not None else None
        src = np.repeat(np.arange(self._n, dtype=np.int64), np.diff(self._indptr))
        src.setflags(write=False)
        self._src = src

    # construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, node_count, src, dst, weights, directed=True, node_ids=None):
        n = int(node_count)
        if n < 1:
            raise GraphValidationError(f"node_count must be positive, got {n}")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        w = np.asarray(weights, dtype=np.float64).ravel()
        if not (len(src) == len(dst) == len(w)):
            raise GraphValidationError("src, dst and weights must have equal length")
        if len(w):
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise GraphValidationError(f"edge endpoint out of range for node_count={n}")
            if not np.all(np.isfinite(w)):
                raise GraphValidationError("edge weights must be finite")
            if np.any(w < 0):
                k = int(np.flatnonzero(w < 0)[0])
                raise GraphValidationError(
                    f"negative weight {w[k]!r} on edge ({src[k]}, {dst[k]})"
                )
        keep = w != 0.0
        src, dst, w = src[keep], dst[keep], w[keep]
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        dup = (np.diff(src) == 0) & (np.diff(dst) == 0)
        if np.any(dup):
            k = int(np.flatnonzero(dup)[0])
            raise GraphValidationError(f"duplicate edge ({src[k]}, {dst[k]})")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        if node_ids is not None and len(node_ids) != n:
            raise GraphValidationError("node_ids must have one entry per node")
        g = cls(n, indptr, dst, w, directed=directed, node_ids=node_ids)
        if not directed and not g.is_symmetric():
            raise GraphValidationError("undirected graph must have symmetric weights")
        return g

    @classmethod
    def from_matrix(cls, matrix, directed=True, node_ids=None):
        """Build from a square dense array or scipy sparse matrix."""
        if sp.issparse(matrix):
            coo = sp.coo_matrix(matrix)
            shape = coo.shape
            rows, cols, vals = coo.row, coo.col, coo.data
        else:
            a = np.asarray(matrix, dtype=np.float64)
            if a.ndim != 2:
                raise GraphValidationError("matrix must be two-dimensional")
            shape = a.shape
            rows, cols = np.nonzero(a)
            vals = a[rows, cols]
        if shape[0] != shape[1]:
            raise GraphValidationError(f"weight matrix must be square, got {shape}")
        return cls.from_edges(shape[0], rows, cols, vals, directed=directed, node_ids=node_ids)

    # accessors --------------------------------------------------------

    @property
    def node_count(self) -> int:
        return self._n

    n = node_count

    @property
    def edge_count(self) -> int:
        return len(self._data)

    m = edge_count

    @property
    def indptr(self) -> np.ndarray:
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def weights(self) -> np.ndarray:
        return self._data

    @property
    def src(self) -> np.ndarray:
        return self._src

    @property
    def dst(self) -> np.ndarray:
        return self._indices

    @property
    def directed(self) -> bool:
        return self._directed

    @property
    def node_ids(self):
        return self._node_ids

    def total_weight(self) -> float:
        return math.fsum(self._data)

    def edges(self):
        """Yield ``(src, dst, weight)`` in CSR order."""
        for i, j, w in zip(self._src.tolist(), self._indices.tolist(), self._data.tolist()):
            yield i, j, w

    def to_csr(self, weights=None) -> sp.csr_matrix:
        """CSR matrix of this support, optionally with substitute ``weights``.

        ``weights`` must be aligned with :attr:`weights`; zeros are kept as
        explicit entries so the structure stays fixed across optimizer iterates.
        """
        data = self._data if weights is None else np.asarray(weights, dtype=np.float64)
        if data.shape != self._data.shape:
            raise GraphValidationError("weights must align with the edge support")
        return sp.csr_matrix(
            (np.array(data), self._indices.copy(), self._indptr.copy()),
            shape=(self._n, self._n),
        )

    def to_dense(self, weights=None) -> np.ndarray:
        return self.to_csr(weights).toarray()

    def with_weights(self, weights) -> "WeightedGraph":
        """Graph on a subset of this support; entries set to zero are dropped."""
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != self._data.shape:
            raise GraphValidationError("weights must align with the edge support")
        return WeightedGraph.from_edges(
            self._n, self._src, self._indices, w, directed=self._directed, node_ids=self._node_ids
        )

    def scaled(self, factor: float) -> "WeightedGraph":
        return self.with_weights(self._data * float(factor))

    def edge_positions(self, src, dst) -> np.ndarray:
        """Positions of ``(src, dst)`` pairs in CSR order, ``-1`` where absent."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        q = src * self._n + dst
        if self.m == 0:
            return np.full(q.shape, -1, dtype=np.int64)
        key = self._src * self._n + self._indices
        pos = np.minimum(np.searchsorted(key, q), self.m - 1)
        return np.where(key[pos] == q, pos, -1)

    def is_symmetric(self) -> bool:
        pos = self.edge_positions(self._indices, self._src)
        if np.any(pos < 0):
            return False
        return bool(np.array_equal(self._data[pos], self._data))

    def external_id(self, index: int) -> str:
        if self._node_ids is None:
            return str(index)
        return self._node_ids[index]

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self._n == other._n
            and self._directed == other._directed
            and self._node_ids == other._node_ids
            and np.array_equal(self._indptr, other._indptr)
            and np.array_equal(self._indices, other._indices)
            and np.array_equal(self._data, other._data)
        )

    __hash__ = None

    def __repr__(self):
        kind = "directed" if self._directed else "undirected"
        return f"WeightedGraph(n={self._n}, m={self.m}, {kind}, total_weight={self.total_weight():.6g})"


class GraphSequence:
    """Ordered, non-empty list of graphs over one node set."""

    __slots__ = ("_steps",)

    def __init__(self, steps: Iterable[WeightedGraph]):
        steps = tuple(steps)
        if not steps:
            raise GraphValidationError("a graph sequence needs at least one step")
        n = steps[0].node_count
        for t, g in enumerate(steps):
            if not isinstance(g, WeightedGraph):
                raise TypeError(f"step {t} is not a WeightedGraph")
            if g.node_count != n:
                raise GraphValidationError(
                    f"node count mismatch: step 0 has {n} nodes, step {t} has {g.node_count}"
                )
        self._steps = steps

    @property
    def steps(self) -> tuple:
        return self._steps

    @property
    def node_count(self) -> int:
        return self._steps[0].node_count

    n = node_count

    def __len__(self):
        return len(self._steps)

    def __getitem__(self, t):
        return self._steps[t]

    def __iter__(self):
        return iter(self._steps)

    def total_weight(self) -> float:
        return math.fsum(np.concatenate([g.weights for g in self._steps]))

    def __eq__(self, other):
        if not isinstance(other, GraphSequence):
            return NotImplemented
        return self._steps == other._steps

    __hash__ = None

    def __repr__(self):
        return f"GraphSequence(s={len(self)}, n={self.node_count}, m={[g.m for g in self._steps]})"


class BipartiteGraph:
    """Nonnegative ``left_count x right_count`` visit matrix (groups x locations)."""

    __slots__ = ("left_count", "right_count", "_csr")

    def __init__(self, left_count, right_count, src, dst, weights):
        self.left_count = int(left_count)
        self.right_count = int(right_count)
        if self.left_count < 1 or self.right_count < 1:
            raise GraphValidationError("bipartite graph needs at least one node on each side")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        w = np.asarray(weights, dtype=np.float64).ravel()
        if not (len(src) == len(dst) == len(w)):
            raise GraphValidationError("src, dst and weights must have equal length")
        if len(w):
            if src.min() < 0 or src.max() >= self.left_count:
                raise GraphValidationError("left index out of range")
            if dst.min() < 0 or dst.max() >= self.right_count:
                raise GraphValidationError("right index out of range")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise GraphValidationError("bipartite weights must be finite and nonnegative")
        csr = sp.csr_matrix((w, (src, dst)), shape=(self.left_count, self.right_count))
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        self._csr = csr

    @classmethod
    def from_matrix(cls, matrix):
        coo = sp.coo_matrix(np.asarray(matrix, dtype=np.float64) if not sp.issparse(matrix) else matrix)
        return cls(coo.shape[0], coo.shape[1], coo.row, coo.col, coo.data)

    def to_csr(self) -> sp.csr_matrix:
        return self._csr.copy()

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    @property
    def edge_count(self) -> int:
        return self._csr.nnz

    def __repr__(self):
        return f"BipartiteGraph({self.left_count}x{self.right_count}, m={self.edge_count})"


# weight transforms ------------------------------------------------------

_TRANSFORM_RE = re.compile(r"^\s*exp_div\(\s*([-+0-9.eE]+)\s*\)\s*$")


def parse_transform(spec) -> Callable[[np.ndarray], np.ndarray]:
    """Named scalar transform: ``"identity"`` or ``"exp_div(c)"`` (``w -> exp(w / c)``)."""
    if spec is None or callable(spec):
        return spec or (lambda w: w)
    if spec.strip() == "identity":
        return lambda w: w
    match = _TRANSFORM_RE.match(spec)
    if match:
        c = float(match.group(1))
        if c == 0 or not math.isfinite(c):
            raise ValueError(f"exp_div divisor must be finite and nonzero, got {c}")
        return lambda w: np.exp(np.asarray(w, dtype=np.float64) / c)
    raise ValueError(f"unknown weight transform {spec!r}; expected identity or exp_div(c)")


def _apply_transform(weights, fn):
    out = np.asarray(fn(np.asarray(weights, dtype=np.float64)), dtype=np.float64)
    if out.shape != np.shape(weights):
        raise ValueError("weight transform must be elementwise")
    if not np.all(np.isfinite(out)):
        raise GraphValidationError("weight transform produced a non-finite value")
    if np.any(out < 0):
        raise GraphValidationError("weight transform produced a negative value")
    return out


def transform_weights(g: WeightedGraph, transform) -> WeightedGraph:
    """Map every stored weight through ``transform``; the support must not change."""
    out = _apply_transform(g.weights, parse_transform(transform))
    if np.any(out == 0):
        raise GraphValidationError("weight transform mapped a stored edge to zero")
    return WeightedGraph(g.node_count, g.indptr, g.indices, out, g.directed, g.node_ids)


# edge-list files --------------------------------------------------------

_HEADER_RE = re.compile(r"^#\s*(nodes|n)\s*=\s*(\d+)\s*$")
_DIRECTED_RE = re.compile(r"^#\s*directed\s*=\s*(true|false)\s*$", re.IGNORECASE)
_INT_RE = re.compile(r"^\d+$")


def _parse_edge_file(path, fmt):
    path = Path(path)
    if fmt not in ("whitespace", "csv"):
        raise ValueError(f"unknown edge-list format {fmt!r}")
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise GraphFormatError("file not found", path) from None
    header_n = None
    directed = None
    src, dst, w, lines = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER_RE.match(line)
            if m:
                header_n = int(m.group(2))
            m = _DIRECTED_RE.match(line)
            if m:
                directed = m.group(1).lower() == "true"
            continue
        if fmt == "csv":
            parts = [p.strip() for p in line.split(",")]
            ok = len(parts) >= 3
        else:
            parts = line.split()
            ok = len(parts) == 3
        if not ok or not parts[0] or not parts[1]:
            raise GraphFormatError(f"expected 'src dst weight', got {raw!r}", path, lineno)
        try:
            weight = float(parts[2])
        except ValueError:
            raise GraphFormatError(f"weight {parts[2]!r} is not a number", path, lineno) from None
        src.append(parts[0])
        dst.append(parts[1])
        w.append(weight)
        lines.append(lineno)
    return header_n, directed, src, dst, w, lines


def _index_tokens(src, dst, id_map):
    if id_map is None and all(_INT_RE.match(t) for t in src) and all(_INT_RE.match(t) for t in dst):
        return [int(t) for t in src], [int(t) for t in dst], None
    if id_map is None:
        id_map = {}
    for a, b in zip(src, dst):
        id_map.setdefault(a, len(id_map))
        id_map.setdefault(b, len(id_map))
    return [id_map[t] for t in src], [id_map[t] for t in dst], id_map


def load_edge_list(path, format="whitespace", transform=None, directed=None, id_map=None):
    """Read an edge-list file into a :class:`WeightedGraph`.

    Lines hold ``src dst weight`` (whitespace) or ``src,dst,weight[,...]``
    (``format="csv"``, extra columns ignored). ``#`` starts a comment line;
    ``# nodes=<n>`` fixes the node count and ``# directed=false`` marks a
    symmetric graph. Node ids that are all nonnegative integers are used as
    indices directly; otherwise a dense index is assigned in order of first
    appearance and recorded in :attr:`WeightedGraph.node_ids`. Pass a shared
    ``id_map`` dict to index several files consistently.

    ``transform`` (see :func:`parse_transform`) is applied to raw weights
    before validation, so signed ratings can be mapped to positive weights.
    Raw zero weights are skipped.
    """
    header_n, file_directed, src_tok, dst_tok, w, lines = _parse_edge_file(path, format)
    fn = parse_transform(transform)
    w = np.asarray(w, dtype=np.float64)
    if len(w):
        bad = ~np.isfinite(w)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise GraphFormatError(f"non-finite weight {w[k]!r}", path, lines[k])
        w = np.asarray(fn(w), dtype=np.float64)
        bad = ~np.isfinite(w) | (w < 0)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise GraphFormatError(f"negative or non-finite weight {w[k]!r}", path, lines[k])
    src, dst, id_map = _index_tokens(src_tok, dst_tok, id_map)
    if id_map is None:
        needed = 1 + max(max(src, default=-1), max(dst, default=-1))
    else:
        needed = len(id_map)
    n = needed if header_n is None else header_n
    if header_n is not None and header_n < needed:
        raise GraphFormatError(f"header declares {header_n} nodes but edges need {needed}", path)
    if n < 1:
        raise GraphFormatError("no edges and no '# nodes=<n>' header", path)
    node_ids = None
    if id_map is not None:
        inverse = [None] * n
        for ext, idx in id_map.items():
            if idx < n:
                inverse[idx] = ext
        node_ids = [x if x is not None else f"#{k}" for k, x in enumerate(inverse)]
    if directed is None:
        directed = True if file_directed is None else file_directed
    src_a = np.asarray(src, dtype=np.int64)
    dst_a = np.asarray(dst, dtype=np.int64)
    if len(src_a):
        key = src_a * n + dst_a
        order = np.argsort(key, kind="stable")
        dup = np.flatnonzero(np.diff(key[order]) == 0)
        if len(dup):
            k = int(order[dup[0] + 1])
            raise GraphFormatError(
                f"duplicate edge ({src_tok[k]}, {dst_tok[k]})", path, lines[k]
            )
    try:
        return WeightedGraph.from_edges(n, src_a, dst_a, w, directed=directed, node_ids=node_ids)
    except GraphValidationError as exc:
        raise GraphFormatError(str(exc), path) from None


def save_edge_list(g: WeightedGraph, path) -> None:
    """Write ``g`` so that :func:`load_edge_list` reproduces it exactly."""
    out = [f"# nodes={g.node_count}"]
    if not g.directed:
        out.append("# directed=false")
    ids = g.node_ids
    for i, j, w in g.edges():
        a = ids[i] if ids else str(i)
        b = ids[j] if ids else str(j)
        out.append(f"{a} {b} {w!r}")
    atomic_write_text(path, "\n".join(out) + "\n")


def write_node_map(g: WeightedGraph, path) -> None:
    atomic_write_csv(
        path,
        ["external_id", "internal_index"],
        ((g.external_id(k), k) for k in range(g.node_count)),
    )


def read_node_map(path) -> dict:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return {row["external_id"]: int(row["internal_index"]) for row in reader}


def load_sequence(manifest, format="whitespace", transform=None, directed=None) -> GraphSequence:
    """Load the edge lists named in ``manifest`` (one path per line, in time order).

    Relative paths resolve against the manifest's directory. Non-integer
    node ids share one index across all steps.
    """
    manifest = Path(manifest)
    try:
        text = manifest.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise GraphFormatError("manifest not found", manifest) from None
    paths = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            p = Path(line)
            paths.append(p if p.is_absolute() else manifest.parent / p)
    if not paths:
        raise GraphFormatError("manifest lists no files", manifest)
    for p in paths:
        if not p.exists():
            raise GraphFormatError("file not found", p)
    # integer ids are detected per file; string ids share one map
    tokens_are_ints = True
    for p in paths:
        _, _, s, d, _, _ = _parse_edge_file(p, format)
        if not (all(_INT_RE.match(t) for t in s) and all(_INT_RE.match(t) for t in d)):
            tokens_are_ints = False
            break
    if tokens_are_ints:
        steps = [load_edge_list(p, format, transform, directed) for p in paths]
    else:
        id_map = {}
        for p in paths:
            load_edge_list(p, format, transform, directed, id_map=id_map)
        n = len(id_map)
        steps = []
        for p in paths:
            g = load_edge_list(p, format, transform, directed, id_map=dict(id_map))
            if g.node_count < n:
                ids = list(g.node_ids) + [None] * (n - g.node_count)
                for ext, idx in id_map.items():
                    ids[idx] = ext
                g = WeightedGraph.from_edges(n, g.src, g.dst, g.weights, g.directed, ids)
            steps.append(g)
    return GraphSequence(steps)


_SIDE_RE = re.compile(r"^#\s*(left|right)\s*=\s*(\d+)\s*$")


def load_bipartite(path, format="whitespace", transform=None):
    """Read a ``group location weight`` edge list into a :class:`BipartiteGraph`.

    Optional ``# left=<n>`` and ``# right=<m>`` headers fix the side sizes.
    Returns ``(graph, left_ids, right_ids)``; the id lists are ``None`` when
    the file uses integer indices on that side.
    """
    _, _, src_tok, dst_tok, w, lines = _parse_edge_file(path, format)
    sizes = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        m = _SIDE_RE.match(raw.strip())
        if m:
            sizes[m.group(1)] = int(m.group(2))
    w = _apply_transform(np.asarray(w, dtype=np.float64), parse_transform(transform)) if w else np.zeros(0)

    def side(tokens, name):
        if all(_INT_RE.match(t) for t in tokens):
            idx = np.asarray([int(t) for t in tokens], dtype=np.int64)
            need = int(idx.max()) + 1 if len(idx) else 0
            ids = None
        else:
            table = {}
            idx = np.asarray([table.setdefault(t, len(table)) for t in tokens], dtype=np.int64)
            need = len(table)
            ids = list(table)
        n = sizes.get(name, need)
        if n < need:
            raise GraphFormatError(f"header declares {name}={n} but edges need {need}", path)
        if ids is not None:
            ids += [f"#{k}" for k in range(len(ids), n)]
        return idx, n, ids

    src, left, left_ids = side(src_tok, "left")
    dst, right, right_ids = side(dst_tok, "right")
    if len(src):
        key = src * max(right, 1) + dst
        order = np.argsort(key, kind="stable")
        dup = np.flatnonzero(np.diff(key[order]) == 0)
        if len(dup):
            k = int(order[dup[0] + 1])
            raise GraphFormatError(f"duplicate edge ({src_tok[k]}, {dst_tok[k]})", path, lines[k])
    try:
        b = BipartiteGraph(left, right, src, dst, w)
    except GraphValidationError as exc:
        raise GraphFormatError(str(exc), path) from None
    return b, left_ids, right_ids


def bipartite_to_square(b: BipartiteGraph) -> WeightedGraph:
    """Group-to-group traffic ``W = B @ B.T`` (diagonal kept), as an undirected graph."""
    csr = b.to_csr()
    w = (csr @ csr.T).tocsr()
    if w.nnz and not np.all(np.isfinite(w.data)):
        raise ProductOverflowError("bipartite product overflowed float64")
    upper = sp.triu(w, k=0, format="csr")
    w = (upper + sp.triu(w, k=1, format="csr").T).tocoo()
    return WeightedGraph.from_edges(b.left_count, w.row, w.col, w.data, directed=False)


def ensure_sequence(x) -> GraphSequence:
    if isinstance(x, GraphSequence):
        return x
    if isinstance(x, WeightedGraph):
        return GraphSequence([x])
    if isinstance(x, Sequence):
        return GraphSequence(x)
    raise TypeError(f"expected WeightedGraph or GraphSequence, got {type(x).__name__}")
