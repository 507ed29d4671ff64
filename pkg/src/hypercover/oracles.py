"""Graphs, input files, edge-weight models and hyperedge sampling oracles.

Every oracle draws hyperedge ``i`` from a seed derived by hashing
``(master_seed, i)``, so sample ``i`` is the same no matter how many
workers prefetch it.
"""

from __future__ import annotations

import bisect
import hashlib
import os
import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

TRI_PROBABILITIES = (0.1, 0.01, 0.001)


class InputFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Graph model and loading


@dataclass
class Graph:
    n: int
    directed: bool
    adjacency: List[List[int]]
    reverse_adjacency: List[List[int]]
    # probabilities aligned with reverse_adjacency: rev_prob[v][j] is p(w, v)
    # for w = reverse_adjacency[v][j]
    rev_prob: Optional[List[List[float]]] = None
    labels: List[int] = field(default_factory=list)

    @property
    def arc_count(self) -> int:
        return sum(len(a) for a in self.adjacency)

    def in_degree(self, v: int) -> int:
        return len(self.reverse_adjacency[v])

    def label(self, v: int) -> int:
        return self.labels[v] if self.labels else v

    def index_of(self) -> Dict[int, int]:
        return {lab: i for i, lab in enumerate(self.labels or range(self.n))}

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence],
        directed: bool = True,
        labels: Optional[List[int]] = None,
    ) -> "Graph":
        """Build from ``(u, v)`` or ``(u, v, p)`` tuples over dense ids.

        Undirected input adds both arcs. Repeated arcs keep the first
        probability seen.
        """
        adjacency: List[List[int]] = [[] for _ in range(n)]
        reverse: List[List[int]] = [[] for _ in range(n)]
        probs: List[List[float]] = [[] for _ in range(n)]
        seen = set()
        has_prob = None

        def add(u, v, p):
            if (u, v) in seen:
                return
            seen.add((u, v))
            adjacency[u].append(v)
            reverse[v].append(u)
            probs[v].append(p)

        for e in edges:
            u, v = int(e[0]), int(e[1])
            p = float(e[2]) if len(e) > 2 else None
            if has_prob is None:
                has_prob = p is not None
            elif has_prob != (p is not None):
                raise InputFormatError("either every edge carries a probability or none does")
            if not (0 <= u < n and 0 <= v < n):
                raise InputFormatError(f"edge ({u}, {v}) outside [0, {n})")
            add(u, v, p)
            if not directed:
                add(v, u, p)
        return cls(
            n=n,
            directed=directed,
            adjacency=adjacency,
            reverse_adjacency=reverse,
            rev_prob=probs if has_prob else None,
            labels=list(labels) if labels is not None else [],
        )


def load_graph(path, directed: bool = True) -> Graph:
    """Parse a whitespace edge list: ``u v`` or ``u v p`` per line, ``#`` comments.

    Node ids are remapped to ``0..n-1`` in increasing order of the original
    id; ``Graph.labels`` keeps the original ids.
    """
    raw = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) not in (2, 3):
                raise InputFormatError(f"{path}:{lineno}: expected 'u v' or 'u v p', got {s!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                p = float(parts[2]) if len(parts) == 3 else None
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: malformed line {s!r}") from None
            if u < 0 or v < 0:
                raise InputFormatError(f"{path}:{lineno}: node ids must be nonnegative")
            if p is not None and not (0.0 < p <= 1.0):
                raise InputFormatError(f"{path}:{lineno}: probability {p} outside (0, 1]")
            raw.append((u, v) if p is None else (u, v, p))
    labels = sorted({x for e in raw for x in e[:2]})
    index = {lab: i for i, lab in enumerate(labels)}
    edges = [(index[e[0]], index[e[1]]) + tuple(e[2:]) for e in raw]
    return Graph.from_edges(len(labels), edges, directed=directed, labels=labels)


def assign_weights(graph: Graph, model: str, seed: int = 0) -> Graph:
    """Return a copy of ``graph`` with IC edge probabilities.

    ``wc``: p(u, v) = 1 / in-degree(v). ``tri``: uniform over
    {0.1, 0.01, 0.001}, drawn per arc in (target, in-neighbor) order.
    """
    if model == "wc":
        probs = [[1.0 / len(r)] * len(r) if r else [] for r in graph.reverse_adjacency]
    elif model == "tri":
        rng = np.random.default_rng(seed)
        total = sum(len(r) for r in graph.reverse_adjacency)
        draws = rng.choice(np.array(TRI_PROBABILITIES), size=total).tolist()
        probs, pos = [], 0
        for r in graph.reverse_adjacency:
            probs.append(draws[pos:pos + len(r)])
            pos += len(r)
    else:
        raise ValueError(f"unknown weight model {model!r}")
    return Graph(
        n=graph.n,
        directed=graph.directed,
        adjacency=graph.adjacency,
        reverse_adjacency=graph.reverse_adjacency,
        rev_prob=probs,
        labels=graph.labels,
    )


def load_hypergraph(path):
    """One hyperedge per line, space-separated node ids; ``-`` is an empty hyperedge.

    Returns ``(hyperedges, labels)`` with hyperedges over dense ids.
    """
    raw = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            if s == "-":
                raw.append([])
                continue
            try:
                ids = [int(x) for x in s.split()]
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: malformed hyperedge {s!r}") from None
            if any(x < 0 for x in ids):
                raise InputFormatError(f"{path}:{lineno}: node ids must be nonnegative")
            raw.append(ids)
    labels = sorted({x for e in raw for x in e})
    index = {lab: i for i, lab in enumerate(labels)}
    return [[index[x] for x in e] for e in raw], labels


# ---------------------------------------------------------------------------
# Sampling oracles


def sample_seed(master_seed: int, index: int) -> int:
    """128-bit seed for sample ``index``."""
    h = hashlib.blake2b(digest_size=16)
    h.update(int(master_seed).to_bytes(16, "little", signed=True))
    h.update(int(index).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def default_workers() -> int:
    env = os.environ.get("HYPERCOVER_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


class SampleOracle:
    """Base class: subclasses implement :meth:`sample` as a pure function of the index."""

    kind = "abstract"

    def __init__(self, n: int, seed: int = 42, workers: int = 1, chunk: int = 1024):
        self.n = n
        self.seed = seed
        self.workers = max(1, workers)
        self.chunk = chunk
        self.samples_drawn = 0
        self._buffer: deque = deque()
        self._next_index = 0
        self._pool: Optional[ThreadPoolExecutor] = None

    def sample(self, index: int) -> List[int]:
        raise NotImplementedError

    def next_hyperedge(self) -> List[int]:
        if self.workers == 1:
            e = self.sample(self.samples_drawn)
        else:
            if not self._buffer:
                self._prefetch()
            e = self._buffer.popleft()
        self.samples_drawn += 1
        return e

    def _prefetch(self) -> None:
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.workers)
        start = max(self._next_index, self.samples_drawn)
        indices = range(start, start + self.chunk)
        # map preserves index order regardless of completion order
        self._buffer.extend(self._pool.map(self.sample, indices, chunksize=max(1, self.chunk // self.workers)))
        self._next_index = start + self.chunk

    def reset(self) -> None:
        self.samples_drawn = 0
        self._buffer.clear()
        self._next_index = 0

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


class ExplicitOracle(SampleOracle):
    """Stored hyperedge list; entry ``j`` is drawn with probability ``weights[j] / sum``."""

    kind = "explicit"

    def __init__(self, hyperedges, n: Optional[int] = None, weights=None, **kw):
        edges = [sorted(set(e)) for e in hyperedges]
        if not edges:
            raise ValueError("explicit oracle needs at least one hyperedge")
        if n is None:
            n = 1 + max((max(e) for e in edges if e), default=0)
        super().__init__(n, **kw)
        self.hyperedges = edges
        if weights is None:
            self.weights = None
            self._cum = None
        else:
            if len(weights) != len(edges) or any(w < 0 for w in weights):
                raise ValueError("weights must be nonnegative, one per hyperedge")
            total = float(sum(weights))
            self.weights = [w / total for w in weights]
            self._cum = list(accumulate(self.weights))

    def sample(self, index: int) -> List[int]:
        s = sample_seed(self.seed, index)
        if self._cum is None:
            return self.hyperedges[s % len(self.hyperedges)]
        u = (s >> 64) / 2.0 ** 64
        j = min(bisect.bisect_right(self._cum, u), len(self.hyperedges) - 1)
        return self.hyperedges[j]

    def coverage(self, S: Iterable[int]) -> float:
        """Exact weighted coverage of ``S``."""
        S = set(S)
        if self.weights is None:
            return sum(1 for e in self.hyperedges if S.intersection(e)) / len(self.hyperedges)
        return sum(w for e, w in zip(self.hyperedges, self.weights) if S.intersection(e))


class ReplayOracle(SampleOracle):
    """Replays a fixed hyperedge sequence in order; useful for traces and same-stream comparisons."""

    kind = "replay"

    def __init__(self, hyperedges, n: int, **kw):
        super().__init__(n, **kw)
        self.hyperedges = [sorted(set(e)) for e in hyperedges]

    def sample(self, index: int) -> List[int]:
        if index >= len(self.hyperedges):
            raise IndexError("replay stream exhausted")
        return self.hyperedges[index]


def _bounded_reverse_ball(graph: Graph, v: int, hops: int) -> List[int]:
    dist = {v: 0}
    frontier = [v]
    for d in range(1, hops + 1):
        nxt = []
        for x in frontier:
            for w in graph.reverse_adjacency[x]:
                if w not in dist:
                    dist[w] = d
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return sorted(dist)


def sample_domset(graph: Graph, hops: int, target: int) -> List[int]:
    """Nodes within ``hops`` reverse hops of ``target`` (i.e. that can cover it)."""
    if hops < 1:
        raise ValueError("hops must be at least 1")
    return _bounded_reverse_ball(graph, target, hops)


def sample_ris_ic(graph: Graph, target: int, rng: random.Random) -> List[int]:
    """Reverse reachable set of ``target`` in one live-edge sample of the IC model."""
    if graph.rev_prob is None:
        raise ValueError("graph has no edge probabilities")
    reached = {target}
    queue = deque([target])
    rev, prob = graph.reverse_adjacency, graph.rev_prob
    rand = rng.random
    while queue:
        x = queue.popleft()
        # x is dequeued once, so each in-arc's coin is flipped at most once
        for w, p in zip(rev[x], prob[x]):
            if w not in reached and rand() < p:
                reached.add(w)
                queue.append(w)
    return sorted(reached)


def _bfs_distances(adj: List[List[int]], src: int, stop: Optional[int] = None, limit: Optional[int] = None):
    dist = {src: 0}
    frontier = [src]
    d = 0
    while frontier:
        if stop is not None and stop in dist:
            break
        if limit is not None and d >= limit:
            break
        d += 1
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return dist


def sample_landmark(graph: Graph, s: int, t: int) -> List[int]:
    """Nodes on at least one shortest ``s``-``t`` path (endpoints included); empty if disconnected."""
    ds = _bfs_distances(graph.adjacency, s, stop=t)
    if t not in ds:
        return []
    d = ds[t]
    dt = _bfs_distances(graph.adjacency, t, limit=d)
    return sorted(u for u, x in ds.items() if x + dt.get(u, d + 1) == d)


def _symmetrized(graph: Graph) -> Graph:
    if not graph.directed:
        return graph
    edges = [(u, v) for u in range(graph.n) for v in graph.adjacency[u]]
    return Graph.from_edges(graph.n, edges, directed=False, labels=graph.labels)


class DomSetOracle(SampleOracle):
    kind = "domset"

    def __init__(self, graph: Graph, hops: int = 2, **kw):
        if hops < 1:
            raise ValueError("hops must be at least 1")
        super().__init__(graph.n, **kw)
        self.graph = graph
        self.hops = hops

    def sample(self, index: int) -> List[int]:
        target = sample_seed(self.seed, index) % self.n
        return sample_domset(self.graph, self.hops, target)


class RISOracle(SampleOracle):
    kind = "ris-ic"

    def __init__(self, graph: Graph, **kw):
        if graph.rev_prob is None:
            raise ValueError("influence oracle needs edge probabilities")
        super().__init__(graph.n, **kw)
        self.graph = graph

    def sample(self, index: int) -> List[int]:
        s = sample_seed(self.seed, index)
        target = s % self.n
        if not self.graph.reverse_adjacency[target]:
            return [target]
        return sample_ris_ic(self.graph, target, random.Random(s))


class LandmarkOracle(SampleOracle):
    """Uniform ordered pair ``s != t``; the graph is treated as undirected."""

    kind = "landmark"

    def __init__(self, graph: Graph, **kw):
        if graph.n < 2:
            raise ValueError("landmark sampling needs at least two nodes")
        super().__init__(graph.n, **kw)
        self.graph = _symmetrized(graph)

    def sample(self, index: int) -> List[int]:
        s_seed = sample_seed(self.seed, index)
        n = self.n
        pair = s_seed % (n * (n - 1))
        s, r = divmod(pair, n - 1)
        t = r if r < s else r + 1
        return sample_landmark(self.graph, s, t)
