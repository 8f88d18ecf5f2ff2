import pytest
from hypothesis import given, strategies as st

from arcstack.errors import HorizonExhausted
from arcstack.oracle import FilterOracle, is_constant, is_strictly_monotone

A = tuple(range(20))


def test_parity_partition_prefers_smaller_tag():
    o = FilterOracle(min_size=5)
    assert o.refine_partition(A, lambda n: n % 2) == tuple(range(0, 20, 2))


def test_monotone_window_unchanged():
    o = FilterOracle(min_size=5)
    assert o.refine_order(A, lambda n: n * n) == A


def test_alternating_sign_gives_one_parity_class():
    o = FilterOracle(min_size=5)
    out = o.refine_order(A, lambda n: (-1) ** n * n)
    assert out == tuple(range(1, 20, 2))
    assert o.log[-1]["op"] == "order"


def test_injective_refinement():
    o = FilterOracle(min_size=3)
    out = o.refine_injective(A, lambda n: n // 2)
    assert len({n // 2 for n in out}) == len(out)


def test_too_small_raises_with_witness():
    o = FilterOracle(min_size=15)
    with pytest.raises(HorizonExhausted) as exc:
        o.refine_partition(A, lambda n: n % 3)
    assert exc.value.witness is not None


def test_random_strategy_is_seeded():
    outs = {FilterOracle(min_size=2, strategy="random", seed=7).refine_partition(A, lambda n: n % 4)
            for _ in range(3)}
    assert len(outs) == 1


values = st.lists(st.integers(-5, 5), min_size=40, max_size=40)


@given(values, st.sampled_from(["largest", "random"]))
def test_order_refinement_is_homogeneous_subset(vals, strategy):
    o = FilterOracle(min_size=1, strategy=strategy)
    pts = tuple(range(40))
    out = o.refine_order(pts, lambda n: vals[n])
    assert set(out) <= set(pts) and list(out) == sorted(out)
    seq = [vals[n] for n in out]
    assert is_constant(seq) or is_strictly_monotone(seq)


@given(values)
def test_partition_refinement_is_largest_class(vals):
    o = FilterOracle(min_size=1)
    out = o.refine_partition(range(40), lambda n: vals[n])
    assert len({vals[n] for n in out}) == 1
    assert len(out) == max(vals.count(v) for v in set(vals))
