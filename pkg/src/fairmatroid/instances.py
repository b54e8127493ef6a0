"""
Instances, allocations, value vectors and the welfare orders used to compare them.

Agents and goods are both 0-indexed. An allocation may be partial: goods that no
bundle contains are unallocated.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from fairmatroid.errors import CapabilityError, InputError
from fairmatroid.matroid import Valuation, from_mask, popcount, valuation_from_json

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Instance:
    m: int
    valuations: tuple[Valuation, ...]

    def __post_init__(self):
        vals = tuple(self.valuations)
        if not vals:
            raise InputError("an instance needs at least one agent")
        for i, v in enumerate(vals):
            if not isinstance(v, Valuation):
                raise InputError(f"agent {i}: not a Valuation")
            if v.m != self.m:
                raise InputError(f"agent {i}: valuation over {v.m} goods, instance has {self.m}")
        object.__setattr__(self, "valuations", vals)

    @property
    def n(self) -> int:
        return len(self.valuations)

    def replace(self, i: int, v: Valuation) -> "Instance":
        """Profile ``(v, v_{-i})``."""
        vals = list(self.valuations)
        vals[i] = v
        return Instance(self.m, tuple(vals))

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "valuations": [v.to_json() for v in self.valuations]}

    @classmethod
    def from_json(cls, data: dict) -> "Instance":
        if not isinstance(data, dict):
            raise InputError("instance must be a JSON object")
        try:
            m = data["m"]
            raw = data["valuations"]
        except KeyError as exc:
            raise InputError(f"instance is missing field {exc}") from exc
        if not isinstance(m, int) or m < 0:
            raise InputError("instance 'm' must be a nonnegative integer")
        if not isinstance(raw, list):
            raise InputError("'valuations' must be a list")
        vals = tuple(valuation_from_json(v, m) for v in raw)
        if "n" in data and data["n"] != len(vals):
            raise InputError(f"'n'={data['n']} but {len(vals)} valuations given")
        return cls(m, vals)


@dataclass(frozen=True)
class Allocation:
    """Pairwise-disjoint bundles, one per agent. Equality is set-wise per bundle."""

    bundles: tuple[frozenset[int], ...]

    def __post_init__(self):
        bundles = tuple(frozenset(int(g) for g in b) for b in self.bundles)
        seen: set[int] = set()
        for b in bundles:
            if seen & b:
                raise InputError(f"bundles overlap on goods {sorted(seen & b)}")
            if any(g < 0 for g in b):
                raise InputError("good ids must be nonnegative")
            seen |= b
        object.__setattr__(self, "bundles", bundles)

    @classmethod
    def empty(cls, n: int) -> "Allocation":
        return cls(tuple(frozenset() for _ in range(n)))

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Allocation":
        return cls(tuple(from_mask(x) for x in masks))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << g for g in b) for b in self.bundles)

    def allocated(self) -> frozenset[int]:
        return frozenset().union(*self.bundles)

    def unallocated(self, m: int) -> frozenset[int]:
        return frozenset(range(m)) - self.allocated()

    def owner(self, m: int) -> tuple[int | None, ...]:
        own: list[int | None] = [None] * m
        for i, b in enumerate(self.bundles):
            for g in b:
                own[g] = i
        return tuple(own)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.bundles)

    def check(self, inst: Instance) -> None:
        if self.n != inst.n:
            raise InputError(f"allocation has {self.n} bundles, instance has {inst.n} agents")
        for b in self.bundles:
            if any(g >= inst.m for g in b):
                raise InputError(f"bundle {sorted(b)} uses goods outside [0, {inst.m})")

    def to_json(self) -> dict:
        return {"bundles": [sorted(b) for b in self.bundles]}

    @classmethod
    def from_json(cls, data: dict) -> "Allocation":
        if not isinstance(data, dict) or not isinstance(data.get("bundles"), list):
            raise InputError("allocation must be an object with a 'bundles' list")
        return cls(tuple(frozenset(b) for b in data["bundles"]))


def values(inst: Instance, a: Allocation) -> tuple[int, ...]:
    a.check(inst)
    return tuple(v.rank_mask(x) for v, x in zip(inst.valuations, a.masks()))


def is_non_wasteful(inst: Instance, a: Allocation) -> bool:
    a.check(inst)
    return all(v.rank_mask(x) == popcount(x) for v, x in zip(inst.valuations, a.masks()))


def nsw(vec: Sequence[int]) -> float:
    """Geometric mean of the values; 0 as soon as any value is 0."""
    if not vec:
        return 0.0
    if any(x <= 0 for x in vec):
        return 0.0
    return math.exp(sum(math.log(x) for x in vec) / len(vec))


def nash_key(vec: Sequence[int]) -> tuple[int, int]:
    """Exact sort key for Nash welfare.

    Compares the number of agents with positive value first and then the exact
    integer product over those agents. Without the first component every vector
    containing a zero would tie at welfare 0.
    """
    pos = [x for x in vec if x > 0]
    return (len(pos), math.prod(pos))


def sorted_vector(vec: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(vec))


def _same_length(u, w):
    if len(u) != len(w):
        raise InputError(f"value vectors differ in length ({len(u)} vs {len(w)})")


def lorenz_dominates(u: Sequence[int], w: Sequence[int]) -> bool:
    """Every prefix sum of sorted ``u`` is at least that of sorted ``w``."""
    _same_length(u, w)
    su = itertools.accumulate(sorted(u))
    sw = itertools.accumulate(sorted(w))
    return all(x >= y for x, y in zip(su, sw))


def leximin_compare(u: Sequence[int], w: Sequence[int]) -> int:
    """-1, 0 or 1 as sorted ``u`` is lexicographically below, equal to, or above sorted ``w``."""
    _same_length(u, w)
    su, sw = sorted(u), sorted(w)
    return (su > sw) - (su < sw)


def pareto_dominates(inst: Instance, a: Allocation, b: Allocation) -> bool:
    """True iff ``a`` is weakly better for everyone and strictly better for someone."""
    va, vb = values(inst, a), values(inst, b)
    return all(x >= y for x, y in zip(va, vb)) and va != vb


def allocation_count(m: int, n: int, complete_only: bool) -> int:
    return (n if complete_only else n + 1) ** m


def check_budget(count: int, budget: int, what: str) -> None:
    if count > budget:
        raise CapabilityError(f"{what} needs {count} assignments, budget is {budget}")


def enumerate_assignments(
    m: int, n: int, complete_only: bool = False, budget: int = DEFAULT_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Bundle bitmasks for every assignment of goods to agents.

    Mixed-radix counter over goods (good ``m-1`` varies fastest); slot ``n`` means
    unallocated when ``complete_only`` is false.
    """
    slots = n if complete_only else n + 1
    check_budget(slots**m, budget, "allocation enumeration")
    for assign in itertools.product(range(slots), repeat=m):
        masks = [0] * n
        for g, s in enumerate(assign):
            if s < n:
                masks[s] |= 1 << g
        yield tuple(masks)


def enumerate_allocations(
    inst: Instance, complete_only: bool = False, budget: int = DEFAULT_BUDGET
) -> Iterator[Allocation]:
    for masks in enumerate_assignments(inst.m, inst.n, complete_only, budget):
        yield Allocation.from_masks(masks)


def value_vectors(
    inst: Instance, complete_only: bool = False, budget: int = DEFAULT_BUDGET
) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """``(masks, values)`` for every enumerated allocation."""
    vals = inst.valuations
    for masks in enumerate_assignments(inst.m, inst.n, complete_only, budget):
        yield masks, tuple(v.rank_mask(x) for v, x in zip(vals, masks))
