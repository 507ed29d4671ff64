"""Threshold-driven max-k-cover over sampled hyperedges.

``bca`` keeps sampling while an upper bound on the running optimum stays
below the threshold ``z`` and, whenever it does not, commits the node of
largest residual coverage. ``dta`` searches a doubling grid of thresholds
and stops as soon as anytime confidence bounds certify the previous
candidate.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .bounds import (
    ONE_MINUS_INV_E,
    GuaranteeParams,
    QualityBound,
    checkpoint_schedule,
    derive_params,
    f_df2d,
    f_lower,
    f_upper,
    threshold_grid,
)
from .sketch import BudgetExceeded, ReducedSketch

BOUNDS = ("req", "topk", "df2d")
DEFAULT_MAX_SAMPLES = 10 ** 9
BUDGETED_RATIO = 1.0 - math.exp(-0.5)
BRUTE_FORCE_LIMIT = 10 ** 7

Observer = Callable[[Sequence[int]], bool]


class SampleCapReached(RuntimeError):
    """The sample cap was hit before the run finished; ``partial`` holds the state so far."""

    def __init__(self, message: str, partial: "RunResult"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class BudgetSpec:
    cost: Tuple[float, ...]
    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("budget L must be positive")
        if any(c <= 0 for c in self.cost):
            raise ValueError("node costs must be positive")
        if self.k_m < 1:
            raise ValueError("no node fits in the budget")

    def eligible(self, v: int) -> bool:
        return self.cost[v] <= self.L

    @property
    def k_m(self) -> int:
        """Size of the largest feasible set: cheapest nodes first."""
        total, count = 0.0, 0
        for c in sorted(self.cost):
            if total + c > self.L:
                break
            total += c
            count += 1
        return count


@dataclass
class RunResult:
    solution: List[int]
    d_S: int
    T: int
    z_used: int
    peak_sketch_elements: int
    wall_time: float
    certificate: Optional[QualityBound] = None
    samples_total: int = 0
    selection_order: List[int] = field(default_factory=list)
    covered_count: Optional[List[int]] = None
    peak_max_degree: int = 0
    full_sketch: Optional[List[List[int]]] = None
    full_peak_elements: Optional[int] = None
    params: Optional[GuaranteeParams] = None
    aborted: bool = False


def _validate_z(z) -> int:
    if int(z) != z or z < 1:
        raise ValueError(f"threshold z={z} must be a positive integer")
    return int(z)


def bca(
    oracle,
    k: int,
    z: int,
    bound: str = "req",
    max_samples: int = DEFAULT_MAX_SAMPLES,
    *,
    observer: Optional[Observer] = None,
    trace: Optional[list] = None,
    retain_full_sketch: bool = False,
) -> RunResult:
    """Select ``k`` nodes with threshold ``z`` using the reduced sketch.

    ``observer(E)`` is called after every generated hyperedge; returning a
    truthy value stops the run early (``aborted`` is then set). ``trace``
    receives one row per event (sample or selection) with the bound value.
    """
    if bound not in BOUNDS:
        raise ValueError(f"unknown bound {bound!r}; choose from {BOUNDS}")
    n = oracle.n
    if k < 1:
        raise ValueError("budget k must be at least 1")
    if k > n:
        raise BudgetExceeded("budget exceeds node count")
    z = _validate_z(z)
    start = time.perf_counter()

    sketch = ReducedSketch(n, k)
    covered = [0] * n
    in_S = [False] * n
    selected: List[int] = []
    d_S = 0
    T = 0
    full: Optional[List[List[int]]] = [] if retain_full_sketch else None
    full_elements = 0
    aborted = False

    def bound_value() -> float:
        if bound == "req":
            return d_S + k * sketch.max_degree()
        if bound == "topk":
            return d_S + sketch.top_k_sum()
        return f_df2d(d_S, k, sketch.degrees(), covered)

    def below(value_needed: bool) -> bool:
        # every bound is <= the requirement function, so that cheap value
        # settles most checks without computing the tighter bound
        base = d_S + k * sketch.max_degree()
        if base < z and not value_needed:
            return True
        return bound_value() < z

    def result() -> RunResult:
        return RunResult(
            solution=list(selected),
            d_S=d_S,
            T=T,
            z_used=z,
            peak_sketch_elements=sketch.peak_elements,
            wall_time=time.perf_counter() - start,
            samples_total=T,
            selection_order=list(selected),
            covered_count=covered,
            peak_max_degree=sketch.peak_max_degree,
            full_sketch=full,
            full_peak_elements=full_elements if retain_full_sketch else None,
            aborted=aborted,
        )

    if trace is not None:
        trace.append(_trace_row("init", None, sketch, selected, d_S, bound_value()))

    for _ in range(k):
        while below(False):
            if T >= max_samples:
                raise SampleCapReached("sample cap reached", result())
            E = oracle.next_hyperedge()
            T += 1
            if full is not None:
                full.append(E)
                full_elements += len(E)
            hit = False
            for v in E:
                if in_S[v]:
                    hit = True
                    break
            if hit:
                d_S += 1
                for v in E:
                    covered[v] += 1
            else:
                sketch.add_hyperedge(E)
            if trace is not None:
                trace.append(_trace_row("sample", E, sketch, selected, d_S, bound_value()))
            if observer is not None and observer(E):
                aborted = True
                break
        if aborted:
            break
        u, _ = sketch.max_degree_node(selected)
        d_S += sketch.remove_covered_by(u, covered)
        selected.append(u)
        in_S[u] = True
        if trace is not None:
            trace.append(_trace_row("select", u, sketch, selected, d_S, bound_value()))

    return result()


def _trace_row(event, payload, sketch, selected, d_S, f):
    return {
        "event": event,
        "item": payload,
        "reduced": sketch.live_hyperedges(),
        "S": list(selected),
        "d_S": d_S,
        "f": f,
    }


def bca_fixed_guarantee(
    oracle,
    k: int,
    eps: float,
    delta: float,
    bound: str = "req",
    max_samples: int = DEFAULT_MAX_SAMPLES,
    **kwargs,
) -> RunResult:
    """Run ``bca`` at ``z*``, which is (1 - 1/e - eps)-optimal w.p. 1 - delta."""
    params = derive_params(oracle.n, k, eps, delta)
    res = bca(oracle, k, params.z_star, bound, max_samples, **kwargs)
    res.params = params
    return res


# ---------------------------------------------------------------------------
# Adaptive threshold search


def _dta_search(oracle, params: GuaranteeParams, target: float, run, max_samples: int) -> RunResult:
    beta = params.beta
    dprime = params.delta_prime
    start = time.perf_counter()
    total = 0
    peak = 0
    peak_deg = 0
    full_peak = None
    prev: Optional[RunResult] = None
    ub: Optional[float] = None

    for z in threshold_grid(params.z_star, params.i0):
        cand = set(prev.solution) if prev is not None else set()
        state = {"N": 0, "hits": 0, "cert": None}
        schedule = checkpoint_schedule(beta)
        state["next"] = next(schedule)

        def observe(E, cand=cand, state=state, schedule=schedule, ub=ub):
            state["N"] += 1
            N = state["N"]
            if cand and not cand.isdisjoint(E):
                state["hits"] += 1
            if N == state["next"]:
                state["next"] = next(schedule)
                if cand and ub:
                    lb = f_lower(N, state["hits"] / N, dprime, N)
                    if lb / ub >= target:
                        state["cert"] = QualityBound(lb, ub)
                        return True
            return False

        try:
            res = run(z, max_samples - total, observe)
        except SampleCapReached as exc:
            exc.partial.samples_total = total + exc.partial.T
            raise
        total += res.T
        peak = max(peak, res.peak_sketch_elements)
        peak_deg = max(peak_deg, res.peak_max_degree)
        if res.full_peak_elements is not None:
            full_peak = max(full_peak or 0, res.full_peak_elements)
        if state["cert"] is not None:
            return replace(
                prev,
                certificate=state["cert"],
                samples_total=total,
                peak_sketch_elements=peak,
                peak_max_degree=peak_deg,
                full_peak_elements=full_peak,
                wall_time=time.perf_counter() - start,
                params=params,
            )
        T_z = res.T
        t_u = math.ceil(math.log(T_z) / math.log(1.0 + beta) - 1e-12) if T_z > 1 else 0
        horizon = max(T_z, math.ceil((1.0 + beta) ** t_u - 1e-9))
        ub = f_upper(T_z, min(z / T_z, 1.0), dprime, horizon)
        prev = res

    return replace(
        prev,
        samples_total=total,
        peak_sketch_elements=peak,
        peak_max_degree=peak_deg,
        full_peak_elements=full_peak,
        wall_time=time.perf_counter() - start,
        params=params,
    )


def dta(
    oracle,
    k: int,
    eps: float,
    delta: float,
    bound: str = "req",
    max_samples: int = DEFAULT_MAX_SAMPLES,
    alpha: float = 0.1,
    beta: float = 0.1,
    retain_full_sketch: bool = False,
) -> RunResult:
    """Adaptive threshold search; (1 - 1/e - eps)-optimal with probability 1 - delta.

    The internal failure budget is ``3 * delta / 7``. A certified early
    return carries the candidate that was assessed, plus its certificate.
    """
    params = derive_params(oracle.n, k, eps, 3.0 * delta / 7.0, alpha=alpha, beta=beta)

    def run(z, cap, observer):
        return bca(oracle, k, z, bound, cap, observer=observer, retain_full_sketch=retain_full_sketch)

    return _dta_search(oracle, params, ONE_MINUS_INV_E - eps, run, max_samples)


# ---------------------------------------------------------------------------
# Budgeted variant


def budgeted_bca(
    oracle,
    budget: BudgetSpec,
    z: int,
    max_samples: int = DEFAULT_MAX_SAMPLES,
    *,
    observer: Optional[Observer] = None,
    retain_full_sketch: bool = False,
) -> RunResult:
    """Cost-effectiveness threshold selection under a total cost budget ``L``.

    Bound: ``d_S + L * max ratio`` over candidates outside ``S`` and the
    skipped set ``Q``. Returns ``S`` or the single best node, whichever
    covers more generated hyperedges.
    """
    n = oracle.n
    cost = budget.cost
    if len(cost) != n:
        raise ValueError(f"expected {n} node costs, got {len(cost)}")
    L = budget.L
    z = _validate_z(z)
    start = time.perf_counter()

    sketch = ReducedSketch(n, 1)
    deg = sketch.heap.degree
    covered = [0] * n
    full_deg = [0] * n
    candidate = [cost[v] <= L for v in range(n)]  # not in S, not in Q, fits in L
    in_S = [False] * n
    selected: List[int] = []
    c_S = 0.0
    d_S = 0
    T = 0
    v_max, d_max = -1, -1
    full: Optional[List[List[int]]] = [] if retain_full_sketch else None
    full_elements = 0
    aborted = False

    for v in range(n):
        if candidate[v] and v_max < 0:
            v_max, d_max = v, 0

    def best_ratio() -> float:
        return max((deg[v] / cost[v] for v in range(n) if candidate[v]), default=0.0)

    def snapshot(solution, value) -> RunResult:
        return RunResult(
            solution=solution,
            d_S=value,
            T=T,
            z_used=z,
            peak_sketch_elements=sketch.peak_elements,
            wall_time=time.perf_counter() - start,
            samples_total=T,
            selection_order=list(selected),
            covered_count=covered,
            peak_max_degree=sketch.peak_max_degree,
            full_sketch=full,
            full_peak_elements=full_elements if retain_full_sketch else None,
            aborted=aborted,
        )

    ratio = best_ratio()
    while any(candidate[v] and cost[v] <= L - c_S for v in range(n)):
        while d_S + L * ratio < z:
            if T >= max_samples:
                raise SampleCapReached("sample cap reached", snapshot(list(selected), d_S))
            E = oracle.next_hyperedge()
            T += 1
            if full is not None:
                full.append(E)
                full_elements += len(E)
            for v in E:
                full_deg[v] += 1
                if cost[v] <= L and (full_deg[v] > d_max or (full_deg[v] == d_max and v < v_max)):
                    v_max, d_max = v, full_deg[v]
            if any(in_S[v] for v in E):
                d_S += 1
                for v in E:
                    covered[v] += 1
            else:
                sketch.add_hyperedge(E)
                for v in E:
                    if candidate[v]:
                        r = deg[v] / cost[v]
                        if r > ratio:
                            ratio = r
            if observer is not None and observer(E):
                aborted = True
                break
        if aborted:
            break
        best, best_r = -1, -1.0
        for v in range(n):
            if candidate[v]:
                r = deg[v] / cost[v]
                if r > best_r:
                    best, best_r = v, r
        candidate[best] = False
        if cost[best] <= L - c_S:
            d_S += sketch.remove_covered_by(best, covered)
            selected.append(best)
            in_S[best] = True
            c_S += cost[best]
        ratio = best_ratio()

    if d_S >= d_max or v_max < 0:
        return snapshot(list(selected), d_S)
    return snapshot([v_max], d_max)


def budgeted_dta(
    oracle,
    budget: BudgetSpec,
    eps: float,
    delta: float,
    max_samples: int = DEFAULT_MAX_SAMPLES,
    alpha: float = 0.1,
    beta: float = 0.1,
) -> RunResult:
    """Adaptive threshold search for the budgeted variant, target ratio 1 - e^-0.5 - eps."""
    k_m = min(budget.k_m, oracle.n - 1)
    params = derive_params(
        oracle.n, k_m, eps, 3.0 * delta / 7.0, alpha=alpha, beta=beta, max_eps=BUDGETED_RATIO
    )

    def run(z, cap, observer):
        return budgeted_bca(oracle, budget, z, cap, observer=observer)

    return _dta_search(oracle, params, BUDGETED_RATIO - eps, run, max_samples)


# ---------------------------------------------------------------------------
# Full-sketch baselines and exact oracle


def coverage(hyperedges: Sequence[Sequence[int]], S) -> int:
    S = set(S)
    return sum(1 for e in hyperedges if not S.isdisjoint(e))


def full_sketch_greedy(hyperedges: Sequence[Sequence[int]], k: int) -> Tuple[List[int], int]:
    """Lazy (CELF) greedy max-k-cover over materialized hyperedges; ties to smallest id."""
    incident: dict = {}
    for j, e in enumerate(hyperedges):
        for v in e:
            incident.setdefault(v, []).append(j)
    covered = [False] * len(hyperedges)
    heap = [(-len(js), v, 0) for v, js in incident.items()]
    heapq.heapify(heap)
    solution: List[int] = []
    total = 0
    while heap and len(solution) < k:
        neg, v, stamp = heapq.heappop(heap)
        if stamp == len(solution):
            solution.append(v)
            for j in incident[v]:
                if not covered[j]:
                    covered[j] = True
                    total += 1
            continue
        gain = sum(1 for j in incident[v] if not covered[j])
        heapq.heappush(heap, (-gain, v, len(solution)))
    return solution, total


def _masks(hyperedges):
    masks: dict = {}
    for j, e in enumerate(hyperedges):
        for v in e:
            masks[v] = masks.get(v, 0) | (1 << j)
    return masks


def brute_force_opt(
    hyperedges: Sequence[Sequence[int]],
    k: Union[int, BudgetSpec],
    weights: Optional[Sequence[float]] = None,
    limit: int = BRUTE_FORCE_LIMIT,
):
    """Exact max coverage by enumeration. Returns ``(value, best_set)``.

    ``k`` may be a size budget or a :class:`BudgetSpec`. With ``weights``
    the value is the weighted coverage.
    """
    masks = _masks(hyperedges)
    nodes = sorted(masks)

    if weights is None:
        def value(mask: int) -> float:
            return bin(mask).count("1")
    else:
        def value(mask: int) -> float:
            total, j = 0.0, 0
            while mask:
                if mask & 1:
                    total += weights[j]
                mask >>= 1
                j += 1
            return total

    if isinstance(k, BudgetSpec):
        return _brute_force_budgeted(masks, [v for v in nodes if k.eligible(v)], k, value, limit)

    if k <= 0 or not nodes:
        return 0, []
    size = min(k, len(nodes))
    if math.comb(len(nodes), size) > limit:
        raise ValueError("brute force guard exceeded: too many candidate sets")
    best_val, best_set = -1.0, ()
    for combo in combinations(nodes, size):
        m = 0
        for v in combo:
            m |= masks[v]
        val = value(m)
        if val > best_val:
            best_val, best_set = val, combo
    return best_val, list(best_set)


def _brute_force_budgeted(masks, nodes, budget: BudgetSpec, value, limit):
    best = [0, []]
    visited = [0]

    def rec(i, chosen, spent, mask):
        visited[0] += 1
        if visited[0] > limit:
            raise ValueError("brute force guard exceeded: too many candidate sets")
        val = value(mask)
        if val > best[0]:
            best[0], best[1] = val, list(chosen)
        for j in range(i, len(nodes)):
            v = nodes[j]
            c = budget.cost[v]
            if spent + c <= budget.L:
                chosen.append(v)
                rec(j + 1, chosen, spent + c, mask | masks[v])
                chosen.pop()

    rec(0, [], 0.0, 0)
    return best[0], best[1]
