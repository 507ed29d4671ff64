import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercover.sketch import BudgetExceeded, ReducedSketch, StepwiseHeap, TRASH_THRESHOLD


def naive_degrees(sketch, n):
    deg = [0] * n
    for e in sketch.live_hyperedges():
        for v in e:
            deg[v] += 1
    return deg


def naive_topk(deg, k):
    return sum(sorted(deg, reverse=True)[:k])


def naive_argmax(deg, selected):
    cands = [v for v in range(len(deg)) if v not in selected]
    best = max(deg[v] for v in cands)
    return min(v for v in cands if deg[v] == best), best


def check_heap_consistent(heap):
    order = heap.order
    assert [heap.position[v] for v in order] == list(range(heap.n))
    degs = [heap.degree[v] for v in order]
    assert degs == sorted(degs)
    for d in range(len(heap.bucket_start) - 1):
        for v in heap.bucket(d):
            assert heap.degree[v] == d
    assert heap.topk_sum == naive_topk(heap.degree, heap.k)


# -- add_hyperedge -----------------------------------------------------------


def test_add_single_hyperedge():
    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    assert sk.degrees() == [0, 1, 1, 0]
    assert sk.live_elements == 2
    assert sk.peak_elements == 2


def test_add_empty_hyperedge_is_ignored():
    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    assert sk.add_hyperedge([]) == -1
    assert sk.degrees() == [0, 1, 1, 0]
    assert sk.live_edges == 1


def test_add_two_hyperedges_degrees_and_topk():
    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    sk.add_hyperedge([1, 3])
    assert sk.degree(1) == 2 and sk.degree(2) == 1 and sk.degree(3) == 1
    assert sk.top_k_sum() == 3
    assert sk.top_k_sum() == naive_topk(naive_degrees(sk, 4), 2)


# -- remove_covered_by -------------------------------------------------------


def test_remove_covered_by_clears_all():
    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    sk.add_hyperedge([1, 3])
    assert sk.remove_covered_by(1) == 2
    assert sk.degrees() == [0, 0, 0, 0]
    assert sk.live_elements == 0
    assert sk.peak_elements == 4


def test_remove_zero_degree_node_is_noop():
    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    before = (list(sk.degrees()), sk.live_elements, sk.top_k_sum())
    assert sk.remove_covered_by(3) == 0
    assert (list(sk.degrees()), sk.live_elements, sk.top_k_sum()) == before


def test_remove_partial_overlap():
    sk = ReducedSketch(4, k=2)
    for e in ([1, 2], [2, 3], [3]):
        sk.add_hyperedge(e)
    assert sk.remove_covered_by(3) == 2
    assert sk.degree(2) == 1 and sk.degree(1) == 1 and sk.degree(3) == 0
    assert sk.degrees() == naive_degrees(sk, 4)


def test_remove_updates_covered_counts():
    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    sk.add_hyperedge([1, 3])
    covered = [0] * 4
    sk.remove_covered_by(1, covered)
    assert covered == [0, 2, 1, 1]


# -- max_degree_node / top_k_sum ----------------------------------------------


def test_max_degree_node_examples():
    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    sk.add_hyperedge([1, 3])
    assert sk.max_degree_node() == (1, 2)

    empty = ReducedSketch(4, k=2)
    assert empty.max_degree_node() == (0, 0)
    assert empty.max_degree_node([0, 1]) == (2, 0)

    sk = ReducedSketch(4, k=2)
    sk.add_hyperedge([1, 2])
    sk.add_hyperedge([1, 3])
    sk.remove_covered_by(1)
    sk.add_hyperedge([2])
    sk.add_hyperedge([3])
    assert sk.max_degree_node([1]) == (2, 1)


def test_max_degree_node_all_selected():
    sk = ReducedSketch(2, k=1)
    with pytest.raises(BudgetExceeded, match="budget exceeds node count"):
        sk.max_degree_node([0, 1])


def test_top_k_sum_examples():
    sk = ReducedSketch(4, k=2)
    assert sk.top_k_sum() == 0
    sk = ReducedSketch(6, k=3)
    for _ in range(5):
        sk.add_hyperedge([1])
    assert sk.top_k_sum() == 5


def test_peak_elements_monotone():
    sk = ReducedSketch(5, k=2)
    peaks = []
    rng = random.Random(3)
    for _ in range(200):
        if rng.random() < 0.7:
            sk.add_hyperedge(rng.sample(range(5), rng.randint(1, 3)))
        else:
            sk.remove_covered_by(rng.randrange(5))
        peaks.append(sk.peak_elements)
        assert sk.peak_elements >= sk.live_elements
    assert peaks == sorted(peaks)


# -- differential / property tests --------------------------------------------

ops = st.lists(
    st.one_of(
        st.tuples(st.just("add"), st.lists(st.integers(0, 7), max_size=5, unique=True)),
        st.tuples(st.just("remove"), st.integers(0, 7)),
    ),
    max_size=80,
)


@settings(max_examples=300, deadline=None)
@given(ops=ops, k=st.integers(1, 8))
def test_sketch_matches_naive_recount(ops, k):
    n = 8
    sk = ReducedSketch(n, k)
    removed = set()
    for op, arg in ops:
        if op == "add":
            # callers never insert hyperedges that hit an already removed node
            sk.add_hyperedge([v for v in arg if v not in removed])
        else:
            sk.remove_covered_by(arg)
            removed.add(arg)
        deg = naive_degrees(sk, n)
        assert sk.degrees() == deg
        assert sk.top_k_sum() == naive_topk(deg, k)
        assert sk.max_degree() == max(deg)
        if max(deg) > 0:
            assert sk.max_degree_node() == naive_argmax(deg, set())
        assert sk.live_elements == sum(deg)
        assert sk.trash_fraction() <= TRASH_THRESHOLD + 1e-12
        check_heap_consistent(sk.heap)


@settings(max_examples=100, deadline=None)
@given(ops=ops)
def test_compaction_is_transparent(ops):
    n = 8
    sk = ReducedSketch(n, k=3, trash_threshold=1e9)  # never compact on its own
    removed = set()
    for op, arg in ops:
        if op == "add":
            sk.add_hyperedge([v for v in arg if v not in removed])
        else:
            sk.remove_covered_by(arg)
            removed.add(arg)
    before = (list(sk.degrees()), sk.top_k_sum(), sk.max_degree(), sorted(map(sorted, sk.live_hyperedges())))
    sk.compact()
    after = (list(sk.degrees()), sk.top_k_sum(), sk.max_degree(), sorted(map(sorted, sk.live_hyperedges())))
    assert before == after
    assert sk.trash_count == 0
    # incidence lists point only at live slots holding the node
    for v in range(n):
        for slot in sk.node_incidence[v]:
            assert sk.edge_alive[slot] and v in sk.edge_nodes[slot]


def test_compaction_triggers_at_threshold():
    sk = ReducedSketch(10, k=2)
    for v in range(1, 10):
        sk.add_hyperedge([0, v])
    sk.remove_covered_by(1)
    assert sk.compactions == 0
    for v in range(2, 10):
        sk.remove_covered_by(v)
        assert sk.trash_fraction() <= TRASH_THRESHOLD + 1e-12
    assert sk.compactions >= 1


def test_touches_linear_in_inserted_size():
    rng = random.Random(11)
    n = 50
    sk = ReducedSketch(n, k=5)
    total = 0
    alive = set(range(n))
    for step in range(5000):
        if rng.random() < 0.9 or not alive:
            e = [v for v in rng.sample(range(n), rng.randint(1, 6)) if v in alive]
            sk.add_hyperedge(e)
            total += len(e)
        else:
            v = rng.choice(sorted(alive))
            sk.remove_covered_by(v)
            alive.discard(v)
    assert sk.touches <= 6 * max(total, 1)


# -- stepwise heap ------------------------------------------------------------


def test_heap_unit_operations():
    h = StepwiseHeap(4, k=2)
    h.increment(1)
    h.increment(1)
    h.increment(2)
    assert h.max_degree() == 2 and h.topk_sum == 3
    h.decrement(1)
    assert h.topk_sum == 2
    check_heap_consistent(h)
    with pytest.raises(ValueError):
        h.decrement(0)


def test_heap_random_walk_constant_touches():
    rng = random.Random(5)
    n, k = 40, 7
    h = StepwiseHeap(n, k)
    for _ in range(20000):
        v = rng.randrange(n)
        before = h.touches
        if h.degree[v] > 0 and rng.random() < 0.5:
            h.decrement(v)
        else:
            h.increment(v)
        assert h.touches - before <= 7
    check_heap_consistent(h)
