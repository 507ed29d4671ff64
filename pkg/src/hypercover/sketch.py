"""Reduced sketch: incidence graph over uncovered hyperedges with lazy removal.

Node degrees are kept in a :class:`StepwiseHeap`, a bucketed array ordering
that supports +1/-1 degree updates in O(1) and tracks the sum of the ``k``
largest degrees on the fly.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

# Fraction of dead incidence entries that triggers a rebuild.
TRASH_THRESHOLD = 1.0 / 3.0


class BudgetExceeded(ValueError):
    """Raised when every node is already selected."""


class StepwiseHeap:
    """Nodes ``0..n-1`` kept in nondecreasing degree order.

    ``order[bucket_start[d]:bucket_start[d + 1]]`` holds exactly the nodes of
    degree ``d``. Moving a node between adjacent buckets is a single swap plus
    one boundary shift.
    """

    def __init__(self, n: int, k: int = 1):
        if n < 0:
            raise ValueError("node count must be nonnegative")
        self.n = n
        self.k = max(0, min(k, n))
        self.order: List[int] = list(range(n))
        self.position: List[int] = list(range(n))
        self.degree: List[int] = [0] * n
        # bucket_start[d] for d = 0..max_degree+1; the last entry is always n.
        self.bucket_start: List[int] = [0, n]
        self.topk_sum = 0
        self.touches = 0  # array cells written, for complexity checks

    def _swap(self, i: int, j: int) -> None:
        if i == j:
            return
        a, b = self.order[i], self.order[j]
        self.order[i], self.order[j] = b, a
        self.position[a], self.position[b] = j, i
        self.touches += 4

    def increment(self, u: int) -> None:
        d = self.degree[u]
        bs = self.bucket_start
        if d + 2 == len(bs):
            bs.append(self.n)
            self.touches += 1
        last = bs[d + 1] - 1
        self._swap(self.position[u], last)
        bs[d + 1] = last
        self.degree[u] = d + 1
        self.touches += 2
        if last >= self.n - self.k:
            self.topk_sum += 1

    def decrement(self, u: int) -> None:
        d = self.degree[u]
        if d == 0:
            raise ValueError(f"degree of node {u} is already zero")
        bs = self.bucket_start
        first = bs[d]
        self._swap(self.position[u], first)
        bs[d] = first + 1
        self.degree[u] = d - 1
        self.touches += 2
        if first >= self.n - self.k:
            self.topk_sum -= 1
        # drop empty top buckets so len(bs) tracks the max degree
        while len(bs) > 2 and bs[-2] == self.n:
            bs.pop()

    def max_degree(self) -> int:
        return self.degree[self.order[-1]] if self.n else 0

    def bucket(self, d: int) -> Sequence[int]:
        """Nodes currently holding degree ``d`` (unordered)."""
        if d + 1 >= len(self.bucket_start):
            return []
        return self.order[self.bucket_start[d]:self.bucket_start[d + 1]]


class ReducedSketch:
    """Hyperedges not yet covered by the partial solution.

    Removal only tombstones a slot; the per-node incidence lists are rebuilt
    when dead entries exceed :data:`TRASH_THRESHOLD` of all entries.
    """

    def __init__(self, n: int, k: int = 1, trash_threshold: float = TRASH_THRESHOLD):
        self.n = n
        self.heap = StepwiseHeap(n, k)
        self.trash_threshold = trash_threshold
        self.node_incidence: List[List[int]] = [[] for _ in range(n)]
        self.edge_nodes: List[Optional[List[int]]] = []
        self.edge_alive: List[bool] = []
        self.trash_count = 0
        self.incidence_entries = 0  # live + trash
        self.live_edges = 0
        self.live_elements = 0
        self.peak_elements = 0
        self.peak_max_degree = 0
        self.compactions = 0
        self.touches = 0  # incidence entries read or written

    # -- queries -------------------------------------------------------------
    def degree(self, v: int) -> int:
        return self.heap.degree[v]

    def degrees(self) -> List[int]:
        return self.heap.degree

    def top_k_sum(self) -> int:
        return self.heap.topk_sum

    def max_degree(self) -> int:
        return self.heap.max_degree()

    def live_hyperedges(self) -> List[List[int]]:
        return [e for e, alive in zip(self.edge_nodes, self.edge_alive) if alive]

    def max_degree_node(self, selected: Iterable[int] = ()) -> Tuple[int, int]:
        """Unselected node of maximum degree, smallest id on ties."""
        d = self.heap.max_degree()
        if d > 0:
            # selected nodes never carry positive degree
            return min(self.heap.bucket(d)), d
        chosen = set(selected)
        for v in range(self.n):
            if v not in chosen:
                return v, 0
        raise BudgetExceeded("budget exceeds node count")

    # -- updates -------------------------------------------------------------
    def add_hyperedge(self, nodes: Sequence[int]) -> int:
        """Store an uncovered hyperedge; returns its slot id (-1 if empty)."""
        if not nodes:
            return -1
        slot = len(self.edge_nodes)
        members = list(nodes)
        self.edge_nodes.append(members)
        self.edge_alive.append(True)
        heap = self.heap
        for v in members:
            self.node_incidence[v].append(slot)
            heap.increment(v)
        size = len(members)
        self.touches += size
        self.incidence_entries += size
        self.live_edges += 1
        self.live_elements += size
        if self.live_elements > self.peak_elements:
            self.peak_elements = self.live_elements
        d = heap.max_degree()
        if d > self.peak_max_degree:
            self.peak_max_degree = d
        return slot

    def remove_covered_by(self, u: int, covered: Optional[List[int]] = None) -> int:
        """Tombstone every live hyperedge containing ``u``.

        When ``covered`` is given, ``covered[v]`` is incremented for each node
        ``v`` of each removed hyperedge. Returns the number removed.
        """
        removed = 0
        heap = self.heap
        incident = self.node_incidence[u]
        self.touches += len(incident)
        for slot in incident:
            if not self.edge_alive[slot]:
                continue
            members = self.edge_nodes[slot]
            self.edge_alive[slot] = False
            self.edge_nodes[slot] = None
            for v in members:
                heap.decrement(v)
                if covered is not None:
                    covered[v] += 1
            size = len(members)
            self.touches += size
            self.trash_count += size
            self.live_elements -= size
            self.live_edges -= 1
            removed += 1
        # every entry in u's own list is dead now
        self.trash_count -= len(incident)
        self.incidence_entries -= len(incident)
        self.node_incidence[u] = []
        if self.incidence_entries and self.trash_count > self.trash_threshold * self.incidence_entries:
            self.compact()
        return removed

    def compact(self) -> None:
        """Rebuild incidence lists and slot store from live hyperedges only."""
        live = self.live_hyperedges()
        self.edge_nodes = list(live)
        self.edge_alive = [True] * len(live)
        incidence: List[List[int]] = [[] for _ in range(self.n)]
        for slot, members in enumerate(live):
            for v in members:
                incidence[v].append(slot)
            self.touches += len(members)
        self.node_incidence = incidence
        self.trash_count = 0
        self.incidence_entries = self.live_elements
        self.compactions += 1

    def trash_fraction(self) -> float:
        if not self.incidence_entries:
            return 0.0
        return self.trash_count / self.incidence_entries
