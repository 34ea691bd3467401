import random
from collections import Counter

import pytest

from cartesian_topk import (ContractViolation, LayerOrderedHeap, LeafGenerator,
                            ParameterError, children_of, layer_schedule, lohify,
                            verify_loh)

ALPHA_GRID = (1.05, 1.1, 1.3, 1.5, 1.9)


def sizes_of(schedule):
    return [schedule.size(i) for i in range(1, schedule.num_layers + 1)]


def test_schedule_alpha_19_n8():
    # hand recurrence: totals 1, 2, 4, 8 -> sizes 1, 1, 2, 4
    assert sizes_of(layer_schedule(1.9, 8)) == [1, 1, 2, 4]


def test_schedule_alpha_11_n5():
    # ceil(1.1 * T) == T + 1 while T <= 9, so five singleton layers
    assert sizes_of(layer_schedule(1.1, 5)) == [1, 1, 1, 1, 1]


def test_schedule_n1():
    for alpha in ALPHA_GRID:
        assert sizes_of(layer_schedule(alpha, 1)) == [1]


def test_schedule_first_two_totals():
    for alpha in ALPHA_GRID:
        sched = layer_schedule(alpha, 100)
        assert sched.total(1) == 1
        assert sched.total(2) == 2


def test_schedule_alpha_validation():
    for alpha in (1.0, 2.0, 0.5, 2.5):
        with pytest.raises(ParameterError):
            layer_schedule(alpha, 10)


def test_schedule_growth_bounds():
    # full layers: c_i <= c_{i+1} <= 2 c_i, for every alpha up to n = 10^6
    for alpha in ALPHA_GRID:
        sched = layer_schedule(alpha, 10**6)
        full = [sched.full_size(i) for i in range(1, sched.num_layers + 1)]
        for a, b in zip(full, full[1:]):
            assert a <= b <= 2 * a, (alpha, a, b)


def test_schedule_ratio_convergence():
    for alpha in ALPHA_GRID:
        sched = layer_schedule(alpha, 10**6)
        for i in range(1, sched.num_layers - 1):
            if sched.total(i) >= 1000:
                ratio = sched.full_size(i + 1) / sched.full_size(i)
                assert abs(ratio - alpha) <= 0.05, (alpha, i, ratio)


def test_layer_of_roundtrip():
    sched = layer_schedule(1.3, 500)
    pos = 1
    for i in range(1, sched.num_layers + 1):
        for off in range(1, sched.size(i) + 1):
            assert sched.layer_of(pos) == (i, off)
            pos += 1


def test_lohify_example():
    # partition oracle at pivot ranks 1, 2, 4 over seven values
    h = lohify([5, 3, 7, 1, 6, 2, 4], 1.9)
    assert h.layer(1) == [1]
    assert h.layer(2) == [2]
    assert sorted(h.layer(3)) == [3, 4]
    assert sorted(h.layer(4)) == [5, 6, 7]


def test_lohify_constant_values():
    h = lohify([3.0, 3.0, 3.0], 1.5)
    assert verify_loh(h)


def test_lohify_empty_rejected():
    with pytest.raises(ContractViolation):
        lohify([], 1.5)


def test_lohify_sorted_input_verifies():
    h = lohify(list(range(10_000)), 1.2)
    assert verify_loh(h)


def test_lohify_is_permutation_and_verifies():
    rng = random.Random(21)
    for _ in range(200):
        n = rng.randint(1, 2000)
        vals = [rng.choice([rng.random(), 0.5]) for _ in range(n)]
        alpha = rng.choice(ALPHA_GRID)
        h = lohify(vals, alpha)
        assert verify_loh(h)
        assert Counter(h.values) == Counter(vals)


def test_verify_loh_rejects_bad_order():
    sched = layer_schedule(1.9, 3)  # sizes [1, 1, 1]
    assert not verify_loh(LayerOrderedHeap([2.0, 1.0, 3.0], sched))


def test_verify_loh_equal_boundary_allowed():
    sched = layer_schedule(1.9, 3)
    assert verify_loh(LayerOrderedHeap([1.0, 1.0, 1.0], sched))


def test_children_of_two_then_three():
    # alpha=1.5 gives full sizes 1,1,1,2,3,...; layers 4 and 5 are (2, 3)
    sched = layer_schedule(1.5, 27)
    assert sched.full_size(4) == 2 and sched.full_size(5) == 3
    assert children_of(sched, 4, 1) == (1, 2)
    assert children_of(sched, 4, 2) == (3,)


def test_children_of_singleton_chain():
    sched = layer_schedule(1.1, 5)  # all singleton layers
    assert children_of(sched, 1, 1) == (1,)


def test_children_of_full_doubling():
    # alpha=1.9 gives sizes 1,1,2,4,8: layer 4 -> 5 doubles every offset
    sched = layer_schedule(1.9, 16)
    seen = []
    for j in range(1, 5):
        kids = children_of(sched, 4, j)
        assert len(kids) == 2
        seen.extend(kids)
    assert sorted(seen) == list(range(1, 9))


def test_children_partition_next_layer():
    rng = random.Random(22)
    for _ in range(50):
        alpha = rng.choice(ALPHA_GRID)
        n = rng.randint(2, 5000)
        sched = layer_schedule(alpha, n)
        for i in range(1, sched.num_layers):
            seen = []
            for j in range(1, sched.full_size(i) + 1):
                seen.extend(children_of(sched, i, j))
            assert sorted(seen) == list(range(1, sched.full_size(i + 1) + 1)), (alpha, n, i)


def test_children_of_range_checks():
    sched = layer_schedule(1.5, 27)
    with pytest.raises(ContractViolation):
        children_of(sched, sched.num_layers, 1)  # no next layer
    with pytest.raises(ContractViolation):
        children_of(sched, 1, 2)  # offset beyond layer size


def test_prefix_layers_match_selection():
    # whole-layer prefixes are exactly the T_i smallest values
    rng = random.Random(23)
    vals = [rng.random() for _ in range(500)]
    h = lohify(vals, 1.3)
    expected = sorted(vals)
    for i in range(1, h.num_layers + 1):
        t = h.schedule.total(i)
        assert sorted(h.values[:t]) == expected[:t]


def test_leaf_generator_streams_layers():
    rng = random.Random(24)
    vals = [rng.random() for _ in range(300)]
    gen = LeafGenerator(vals, 1.5)
    assert gen.layer_count == 1
    assert gen.generated_count == 1
    assert gen.min_value() == min(vals)
    running = []
    while True:
        running.extend(gen.layer(gen.layer_count))
        assert gen.max_generated() == max(running)
        assert gen.size_of_last_layer() == len(gen.layer(gen.layer_count))
        if not gen.has_more_layers():
            break
        prev_max = gen.max_generated()
        gen.generate_next_layer()
        assert gen.max_generated() >= prev_max
    assert Counter(running) == Counter(vals)
    gen.generate_next_layer()  # exhausted: no-op
    assert gen.generated_count == len(vals)
