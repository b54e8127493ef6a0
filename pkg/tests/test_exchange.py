import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairmatroid.errors import ParetoViolation, PreconditionError, UnsupportedKindError
from fairmatroid.exchange import (
    AugPath,
    augment_forward,
    build_exchange_graph,
    extend_exchange_matching,
    find_reverse_path,
    graph_from_masks,
    growth_path,
    reverse_path_bundles,
    shortest_path,
    strong_basis_exchange,
    transfer_path,
)
from fairmatroid.instances import Allocation, Instance, is_non_wasteful, pareto_dominates
from fairmatroid.matroid import BinaryXOS, Uniform, max_independent_mask, popcount
from fairmatroid.mechanisms import pe_mechanism, serial_dictatorship
from fairmatroid.presets import preset, random_instance
from tests.conftest import random_non_wasteful
from tests.strategies import instances, valuations


def alloc(*bundles):
    return Allocation(tuple(frozenset(b) for b in bundles))


def brute_edges(inst, a):
    out = set()
    for v, b in zip(inst.valuations, a.bundles):
        for g in b:
            for h in range(inst.m):
                if h not in b and v(b - {g} | {h}) == len(b):
                    out.add((g, h))
    return out


def test_thm4_graph_matches_brute_force():
    inst = preset("thm4")
    a = alloc({0}, {1, 2, 3})
    assert build_exchange_graph(inst, a).edges == brute_edges(inst, a)


def test_empty_allocation_has_no_edges():
    inst = preset("thm4")
    g = build_exchange_graph(inst, Allocation.empty(2))
    assert not g.edges
    assert "->" not in g.to_dot()


def test_graph_rejects_wasteful_and_xos():
    inst = preset("thm4")
    with pytest.raises(PreconditionError):
        build_exchange_graph(inst, alloc((), {0, 1}))
    xos = Instance(2, (BinaryXOS(2, [{0}]), Uniform(2, {0, 1}, 1)))
    with pytest.raises(UnsupportedKindError):
        build_exchange_graph(xos, Allocation.empty(2))


def test_bfs_prefers_low_ids():
    inst = Instance(3, (Uniform(3, {0, 1, 2}, 1), Uniform(3, {0, 1, 2}, 1)))
    a = alloc({0}, ())
    g = build_exchange_graph(inst, a)
    assert shortest_path(g, {0}, {1, 2}).vertices == (0, 1)


def test_augment_growth_and_transfer():
    inst = Instance(3, (Uniform(3, {0, 1}, 1), Uniform(3, {0, 1, 2}, 2)))
    a = alloc((), {0, 1})
    # agent 0 takes good 0 from agent 1, who swaps in good 2: path 0 -> 2 ends unallocated
    b = augment_forward(inst, a, AugPath((0, 2)), 0)
    assert b.sizes() == (1, 2) and is_non_wasteful(inst, b)
    c = augment_forward(inst, a, AugPath((0,)), 0)  # plain transfer of good 0
    assert c.sizes() == (1, 1)


def test_augment_rejects_non_shortest():
    inst = Instance(3, (Uniform(3, {0, 1, 2}, 3), Uniform(3, {0, 1, 2}, 1)))
    a = alloc((), {0})
    g = build_exchange_graph(inst, a)
    assert (0, 1) in g.edges
    with pytest.raises(PreconditionError):
        augment_forward(inst, a, AugPath((0, 1)), 0)  # good 1 is itself free and unallocated
    with pytest.raises(PreconditionError):
        augment_forward(inst, a, AugPath((0,)), 1)  # sink in the gainer's own bundle


@given(instances(max_m=7, max_n=4, min_n=2), st.integers(0, 2**32 - 1))
def test_forward_augmentation_properties(inst, seed):
    rng = random.Random(seed)
    a = random_non_wasteful(rng, inst)
    masks = a.masks()
    g = graph_from_masks(inst, masks)
    total = sum(a.sizes())
    for i in range(inst.n):
        p = growth_path(inst, masks, g, i)
        if p:
            b = augment_forward(inst, a, AugPath(tuple(p)), i)
            assert sum(b.sizes()) == total + 1 and b.sizes()[i] == a.sizes()[i] + 1
            assert is_non_wasteful(inst, b)
        for j in range(inst.n):
            if j == i:
                continue
            p = transfer_path(inst, masks, g, i, j)
            if p:
                b = augment_forward(inst, a, AugPath(tuple(p)), i)
                d = [y - x for x, y in zip(a.sizes(), b.sizes())]
                assert d[i] == 1 and d[j] == -1 and sum(map(abs, d)) == 2
                assert is_non_wasteful(inst, b)


@given(valuations(max_m=7), st.integers(0, 2**32 - 1))
def test_strong_basis_exchange(v, seed):
    rng = random.Random(seed)
    full = (1 << v.m) - 1
    order = list(range(v.m))
    rng.shuffle(order)
    am = 0
    for g in order:
        if v.rank_mask(am | 1 << g) > v.rank_mask(am):
            am |= 1 << g
    bm = max_independent_mask(v, full)
    diff = am & ~bm
    if not diff:
        return
    a = (diff & -diff).bit_length() - 1
    A = [g for g in range(v.m) if am >> g & 1]
    B = [g for g in range(v.m) if bm >> g & 1]
    b = strong_basis_exchange(v, A, B, a)
    assert b in B and b not in A
    assert v.rank_mask(am & ~(1 << a) | 1 << b) == popcount(am)
    assert v.rank_mask(bm & ~(1 << b) | 1 << a) == popcount(bm)


def test_extend_exchange_matching_simple():
    v = Uniform(4, range(4), 2)
    # A = {0, 1}, X = {2, 3}; match 0 -> 2 first, then 1 must go to 3
    assert extend_exchange_matching(v, {0, 1}, {2, 3}, set(), {}, 0) == 2
    assert extend_exchange_matching(v, {0, 1}, {2, 3}, {0}, {0: 2}, 1) == 3
    with pytest.raises(PreconditionError):
        extend_exchange_matching(v, {0, 1}, {2, 3}, set(), {}, 2)


def _reverse_case(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(2, 7), rng.randint(2, 4))
    a = pe_mechanism(inst)
    order = list(range(inst.n))
    rng.shuffle(order)
    x = serial_dictatorship(inst, order)
    hs = [h for h in range(inst.n) if len(x.bundles[h]) > len(a.bundles[h])]
    return inst, x, a, hs


def test_reverse_path_properties():
    done = 0
    for seed in range(400):
        inst, x, a, hs = _reverse_case(seed)
        for h in hs:
            rp = find_reverse_path(inst, x, a, h)
            assert rp.steps <= inst.m
            b = reverse_path_bundles(inst, a, rp.path, rp.h, rp.ell)
            assert is_non_wasteful(inst, b)
            assert len(x.bundles[rp.ell]) < len(a.bundles[rp.ell])
            done += 1
    assert done > 50


def test_reverse_path_reports_pareto_improvement():
    inst = preset("thm4")
    x = alloc({0, 1}, {2, 3})
    a = Allocation.empty(2)
    with pytest.raises(ParetoViolation) as info:
        find_reverse_path(inst, x, a, 0)
    assert pareto_dominates(inst, info.value.improved, a)


def test_reverse_path_precondition():
    inst = preset("thm4")
    with pytest.raises(PreconditionError):
        find_reverse_path(inst, alloc({0}, ()), alloc({0}, ()), 0)
