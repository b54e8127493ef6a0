"""
Fairness and efficiency auditors: EF1, maximin shares, Pareto optimality (brute
force and via maximum utilitarian welfare), local efficiency and the Nash /
leximin / Lorenz classification.

Every failing verdict carries a witness that can be re-checked by hand.

>>> from fairmatroid.presets import preset
>>> inst = preset("thm4")
>>> mms_profile(inst)
(1, 3)
>>> a = Allocation((frozenset({0}), frozenset({1, 2, 3})))
>>> is_ef1(inst, a).holds, is_mms(inst, a).holds
(True, True)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from fairmatroid.errors import PreconditionError
from fairmatroid.exchange import apply_forward, graph_from_masks, growth_path
from fairmatroid.instances import (
    DEFAULT_BUDGET,
    Allocation,
    Instance,
    check_budget,
    leximin_compare,
    lorenz_dominates,
    nash_key,
    value_vectors,
    values,
)
from fairmatroid.matroid import is_matroid_kind, max_independent_mask, popcount

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FairnessVerdict:
    property: str
    holds: bool
    witness: dict | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError(f"failing {self.property} verdict needs a witness")

    def to_json(self) -> dict:
        out = {"property": self.property, "holds": self.holds, "witness": self.witness}
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def is_ef1(inst: Instance, a: Allocation) -> FairnessVerdict:
    """Envy-free up to one good; pairs with an empty envied bundle pass."""
    a.check(inst)
    masks = a.masks()
    for i, vi in enumerate(inst.valuations):
        own = vi.rank_mask(masks[i])
        for j, pj in enumerate(masks):
            if i == j or pj == 0:
                continue
            if all(own < vi.rank_mask(pj & ~(1 << g)) for g in a.bundles[j]):
                return FairnessVerdict("EF1", False, {"envier": i, "envied": j})
    return FairnessVerdict("EF1", True)


def mms_share(inst: Instance, i: int, budget: int = DEFAULT_BUDGET) -> int:
    """Maximin share of agent ``i`` over complete partitions into ``n`` bundles.

    Partitions are generated as restricted growth strings (good 0 always opens
    bundle 0), which skips relabelings of the bundles. The search stops early
    once it reaches ``min(v([m]), m // n)``, which no partition can beat.
    """
    v = inst.valuations[i]
    n, m = inst.n, inst.m
    full = (1 << m) - 1
    if n == 1:
        return v.rank_mask(full)
    check_budget(n**m, budget, "maximin share enumeration")
    cap = min(v.rank_mask(full), m // n)
    best = 0
    blocks = [0] * n

    def rec(g: int, used: int) -> bool:
        nonlocal best
        if g == m:
            # unused bundles are empty and worth 0
            val = min(v.rank_mask(b) for b in blocks) if used == n else 0
            if val > best:
                best = val
            return best >= cap
        if n - used > m - g:
            return False  # not enough goods left to open every bundle
        for k in range(min(used + 1, n)):
            blocks[k] |= 1 << g
            done = rec(g + 1, max(used, k + 1))
            blocks[k] &= ~(1 << g)
            if done:
                return True
        return False

    if cap > 0:
        rec(0, 0)
    return best


def mms_profile(inst: Instance, budget: int = DEFAULT_BUDGET) -> tuple[int, ...]:
    return tuple(mms_share(inst, i, budget) for i in range(inst.n))


def is_mms(inst: Instance, a: Allocation, shares=None, budget: int = DEFAULT_BUDGET) -> FairnessVerdict:
    shares = mms_profile(inst, budget) if shares is None else tuple(shares)
    vec = values(inst, a)
    for i, (x, mu) in enumerate(zip(vec, shares)):
        if x < mu:
            return FairnessVerdict("MMS", False, {"agent": i, "value": x, "share": mu})
    return FairnessVerdict("MMS", True)


def is_pareto_optimal_oracle(inst: Instance, a: Allocation, budget: int = DEFAULT_BUDGET) -> FairnessVerdict:
    """Scan every partial allocation for one that Pareto dominates ``a``."""
    va = values(inst, a)
    for masks, vb in value_vectors(inst, complete_only=False, budget=budget):
        if vb != va and all(y >= x for x, y in zip(va, vb)):
            dom = Allocation.from_masks(masks)
            return FairnessVerdict("PO", False, {"dominating": dom.to_json(), "values": list(vb)})
    return FairnessVerdict("PO", True)


def max_utilitarian_welfare(inst: Instance) -> int:
    """Size of a largest non-wasteful allocation, by growth augmentation from empty."""
    masks = tuple(0 for _ in range(inst.n))
    while True:
        graph = graph_from_masks(inst, masks)
        for i in range(inst.n):
            path = growth_path(inst, masks, graph, i)
            if path is not None:
                masks = tuple(apply_forward(masks, graph.owner, tuple(path), i))
                break
        else:
            return sum(popcount(x) for x in masks)


def is_pareto_optimal_fast(inst: Instance, a: Allocation) -> FairnessVerdict:
    """PO test for matroid profiles.

    With binary marginals a Pareto improvement of a non-wasteful allocation
    raises the value sum, so ``a`` is PO iff its cleanup reaches maximum
    utilitarian welfare. On failure some agent has a growth path in the
    exchange graph of the cleanup, and augmenting along it gives the witness.
    """
    a.check(inst)
    if not all(is_matroid_kind(v) for v in inst.valuations):
        raise PreconditionError("fast Pareto test needs matroid-rank valuations")
    masks = tuple(max_independent_mask(v, x) for v, x in zip(inst.valuations, a.masks()))
    total = sum(popcount(x) for x in masks)
    best = max_utilitarian_welfare(inst)
    if total == best:
        return FairnessVerdict("PO", True)
    graph = graph_from_masks(inst, masks)
    for i in range(inst.n):
        path = growth_path(inst, masks, graph, i)
        if path is not None:
            dom = Allocation.from_masks(apply_forward(masks, graph.owner, tuple(path), i))
            return FairnessVerdict(
                "PO",
                False,
                {"dominating": dom.to_json(), "values": list(values(inst, dom)), "max_welfare": best},
            )
    raise PreconditionError("welfare below the maximum but no growth path; not a matroid profile?")


def is_locally_efficient(inst: Instance, a: Allocation) -> FairnessVerdict:
    """No unallocated good raises any agent's value."""
    a.check(inst)
    masks = a.masks()
    for g in sorted(a.unallocated(inst.m)):
        for i, v in enumerate(inst.valuations):
            if v.rank_mask(masks[i] | 1 << g) > v.rank_mask(masks[i]):
                return FairnessVerdict("local-efficiency", False, {"good": g, "agent": i})
    return FairnessVerdict("local-efficiency", True)


@dataclass(frozen=True)
class WelfareClass:
    is_nash_optimal: bool
    is_leximin: bool
    is_lorenz_dominating: bool

    def to_json(self) -> dict:
        return {
            "nash_optimal": self.is_nash_optimal,
            "leximin": self.is_leximin,
            "lorenz_dominating": self.is_lorenz_dominating,
        }


def achievable_sorted_vectors(inst: Instance, budget: int = DEFAULT_BUDGET) -> set[tuple[int, ...]]:
    return {tuple(sorted(vec)) for _, vec in value_vectors(inst, complete_only=False, budget=budget)}


def classify_vector(vec, universe) -> WelfareClass:
    """Flags for value vector ``vec`` against the set of achievable sorted vectors."""
    key = nash_key(vec)
    return WelfareClass(
        all(key >= nash_key(u) for u in universe),
        all(leximin_compare(vec, u) >= 0 for u in universe),
        all(lorenz_dominates(vec, u) for u in universe),
    )


def classify_welfare(inst: Instance, a: Allocation, budget: int = DEFAULT_BUDGET) -> WelfareClass:
    return classify_vector(values(inst, a), achievable_sorted_vectors(inst, budget))


__all__ = [
    "FairnessVerdict",
    "WelfareClass",
    "achievable_sorted_vectors",
    "classify_vector",
    "classify_welfare",
    "is_ef1",
    "is_locally_efficient",
    "is_mms",
    "is_pareto_optimal_fast",
    "is_pareto_optimal_oracle",
    "max_utilitarian_welfare",
    "mms_profile",
    "mms_share",
]
