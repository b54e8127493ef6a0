import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairmatroid.errors import CapabilityError, InputError
from fairmatroid.instances import (
    Allocation,
    Instance,
    allocation_count,
    enumerate_allocations,
    is_non_wasteful,
    leximin_compare,
    lorenz_dominates,
    nash_key,
    nsw,
    pareto_dominates,
    sorted_vector,
    values,
)
from fairmatroid.matroid import Uniform
from fairmatroid.presets import preset
from tests.strategies import instances

vectors = st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 20), min_size=n, max_size=n),
    st.lists(st.integers(0, 20), min_size=n, max_size=n),
    st.lists(st.integers(0, 20), min_size=n, max_size=n),
))


def alloc(*bundles):
    return Allocation(tuple(frozenset(b) for b in bundles))


def test_values_examples():
    inst = preset("thm4")
    assert values(inst, alloc({0}, {1, 2, 3})) == (1, 3)
    assert values(inst, Allocation.empty(2)) == (0, 0)


def test_non_wasteful_examples():
    inst = preset("thm4")
    assert is_non_wasteful(inst, alloc({0}, {1, 2, 3}))
    assert not is_non_wasteful(inst, alloc((), {0, 1}))
    assert is_non_wasteful(inst, Allocation.empty(2))


def test_nsw_examples():
    assert nsw((1, 3)) == pytest.approx(math.sqrt(3))
    assert nsw((0, 5)) == 0
    assert nsw((4, 4, 4)) == pytest.approx(4)


def test_sorted_and_orders():
    assert sorted_vector((2, 2, 0)) == (0, 2, 2)
    assert lorenz_dominates((2, 2), (1, 3))
    assert not lorenz_dominates((1, 3), (2, 2))
    assert leximin_compare((1, 3), (2, 2)) == -1
    assert leximin_compare((1, 3), (3, 1)) == 0
    assert leximin_compare((2, 2), (1, 4)) == 1
    with pytest.raises(InputError):
        lorenz_dominates((1,), (1, 2))


def test_pareto_dominance():
    inst = preset("thm4")
    assert pareto_dominates(inst, alloc({0}, {1}), alloc((), {1}))
    a = alloc({0}, {1})
    assert not pareto_dominates(inst, a, a)
    u = Instance(2, (Uniform(2, {0, 1}, 2), Uniform(2, {0, 1}, 2)))
    b, c = alloc({0}, ()), alloc((), {0})
    assert not pareto_dominates(u, b, c) and not pareto_dominates(u, c, b)


def test_allocation_validation():
    with pytest.raises(InputError):
        alloc({0, 1}, {1})
    inst = preset("thm4")
    with pytest.raises(InputError):
        values(inst, alloc({7}, ()))
    with pytest.raises(InputError):
        values(inst, alloc({0}))


@pytest.mark.parametrize("m,n,complete,count", [(2, 2, True, 4), (0, 3, True, 1), (3, 2, False, 27)])
def test_enumeration_counts(m, n, complete, count):
    inst = Instance(m, tuple(Uniform(m, range(m), m) for _ in range(n)))
    allocs = list(enumerate_allocations(inst, complete_only=complete))
    assert len(allocs) == count == allocation_count(m, n, complete)
    assert len(set(allocs)) == count


def test_enumeration_budget():
    inst = Instance(10, (Uniform(10, range(10), 3),) * 3)
    with pytest.raises(CapabilityError):
        next(enumerate_allocations(inst, budget=1000))


def test_instance_json_round_trip():
    inst = preset("thm4")
    back = Instance.from_json(json.loads(json.dumps(inst.to_json())))
    assert back.to_json() == inst.to_json()
    with pytest.raises(InputError):
        Instance.from_json({"m": 2, "n": 3, "valuations": [{"kind": "zero"}]})
    with pytest.raises(InputError):
        Instance.from_json({"m": 2})
    a = alloc({0}, {1, 2, 3})
    assert Allocation.from_json(a.to_json()) == a


@given(vectors)
def test_lorenz_reflexive_transitive(vs):
    u, w, x = vs
    assert lorenz_dominates(u, u)
    if lorenz_dominates(u, w) and lorenz_dominates(w, x):
        assert lorenz_dominates(u, x)


@given(vectors)
def test_strict_lorenz_implies_leximin_better(vs):
    u, w, _ = vs
    if lorenz_dominates(u, w) and not lorenz_dominates(w, u):
        assert leximin_compare(u, w) == 1


@given(vectors)
def test_nsw_agrees_with_exact_products(vs):
    u, w, _ = vs
    if 0 in u or 0 in w:
        return
    pu, pw = math.prod(u), math.prod(w)
    if pu != pw:
        assert (nsw(u) > nsw(w)) == (pu > pw)
    assert (nash_key(u) > nash_key(w)) == (pu > pw)


@given(instances(max_m=4, max_n=3))
def test_enumeration_is_exhaustive_and_distinct(inst):
    allocs = list(enumerate_allocations(inst))
    assert len(allocs) == (inst.n + 1) ** inst.m == len(set(allocs))
