"""
Allocation mechanisms: prioritized egalitarian (PE), its brute-force oracle, the
non-wasteful cleanup wrapper and serial dictatorship.

PE returns a non-wasteful allocation whose value vector is Lorenz dominating and,
among those, lexicographically largest in agent order. It is computed in two phases
on the exchange graph:

1. growth: repeatedly let the poorest agent (lowest index on ties) that has a
   shortest path from its free goods to an unallocated good augment along it;
2. polish: while some agent ``i`` can take a unit from an agent ``j`` with
   ``x_j >= x_i + 2`` (or ``x_j == x_i + 1`` and ``i`` has priority over ``j``)
   through a transfer path, augment.

The second phase only fires when the greedy order of phase 1 settled a tie the
wrong way; both phases preserve non-wastefulness.

>>> from fairmatroid.presets import preset
>>> from fairmatroid.instances import values
>>> values(preset("thm4"), pe_mechanism(preset("thm4")))
(2, 2)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

from fairmatroid.errors import CapabilityError, InputError, InvariantViolation
from fairmatroid.exchange import apply_forward, graph_from_masks, growth_path, transfer_path
from fairmatroid.instances import Allocation, Instance, enumerate_assignments, lorenz_dominates
from fairmatroid.matroid import Zero, max_independent_mask, popcount, validate_matroid_rank

logger = logging.getLogger(__name__)

ORACLE_BUDGET = 5**8


@dataclass(frozen=True)
class Mechanism:
    """A named deterministic map from a reported profile to a (partial) allocation."""

    name: str
    func: Callable[[Instance], Allocation]

    def __call__(self, inst: Instance) -> Allocation:
        return self.func(inst)


@dataclass(frozen=True)
class PEStats:
    allocation: Allocation
    growth_rounds: int
    transfers: int
    sanitized: tuple[int, ...]


def sanitize_reports(inst: Instance) -> tuple[Instance, tuple[int, ...]]:
    """Replace every report that is not a certified matroid rank function by zero."""
    vals = []
    rejected = []
    for i, v in enumerate(inst.valuations):
        try:
            ok = validate_matroid_rank(v)
        except CapabilityError:
            ok = False
        if ok:
            vals.append(v)
        else:
            rejected.append(i)
            vals.append(Zero(inst.m))
    if not rejected:
        return inst, ()
    return Instance(inst.m, tuple(vals)), tuple(rejected)


def _improves(xi: int, xj: int, pi: int, pj: int) -> bool:
    # moving one unit from j to i raises sum(C*x - x^2), or ties it and favours priority
    return xj >= xi + 2 or (xj == xi + 1 and pi < pj)


def pe_run(inst: Instance, priority: Sequence[int] | None = None) -> PEStats:
    """PE with statistics. ``priority[i]`` is agent ``i``'s tie-break rank (lower wins);
    the default is the agent index."""
    inst, rejected = sanitize_reports(inst)
    n = inst.n
    prio = list(range(n)) if priority is None else list(priority)
    if sorted(prio) != list(range(n)):
        raise InputError("priority must be a permutation of the agents")
    masks = tuple(0 for _ in range(n))
    rounds = 0
    while True:
        graph = graph_from_masks(inst, masks)
        order = sorted(range(n), key=lambda i: (popcount(masks[i]), prio[i]))
        for i in order:
            path = growth_path(inst, masks, graph, i)
            if path is not None:
                masks = tuple(apply_forward(masks, graph.owner, tuple(path), i))
                rounds += 1
                break
        else:
            break
        if rounds > inst.m:
            raise InvariantViolation("growth phase exceeded m rounds")
    transfers = 0
    while True:
        graph = graph_from_masks(inst, masks)
        sizes = [popcount(x) for x in masks]
        gainers = sorted(range(n), key=lambda i: (sizes[i], prio[i]))
        losers = sorted(range(n), key=lambda j: (-sizes[j], -prio[j]))
        moved = False
        for i in gainers:
            for j in losers:
                if i == j or not _improves(sizes[i], sizes[j], prio[i], prio[j]):
                    continue
                path = transfer_path(inst, masks, graph, i, j)
                if path is not None:
                    masks = tuple(apply_forward(masks, graph.owner, tuple(path), i))
                    transfers += 1
                    moved = True
                    break
            if moved:
                break
        if not moved:
            break
    for v, x in zip(inst.valuations, masks):
        if v.rank_mask(x) != popcount(x):
            raise InvariantViolation("PE produced a wasteful bundle")
    logger.debug("PE: %d growth rounds, %d transfers", rounds, transfers)
    return PEStats(Allocation.from_masks(masks), rounds, transfers, rejected)


def pe_mechanism(inst: Instance) -> Allocation:
    return pe_run(inst).allocation


def pe_needy_priority(inst: Instance) -> Allocation:
    """PE variant whose tie-break favours agents reporting a smaller total value.

    Deliberately manipulable: shrinking one's report can buy priority.
    """
    full = (1 << inst.m) - 1
    order = sorted(range(inst.n), key=lambda i: (inst.valuations[i].rank_mask(full), i))
    prio = [0] * inst.n
    for rank_pos, i in enumerate(order):
        prio[i] = rank_pos
    return pe_run(inst, prio).allocation


def lorenz_dominating_oracle(inst: Instance, budget: int = ORACLE_BUDGET) -> Allocation:
    """Brute force: among non-wasteful Lorenz-dominating allocations, the first one
    (in enumeration order) with the lexicographically largest value vector."""
    inst, _ = sanitize_reports(inst)
    vals = inst.valuations
    sorted_seen: set[tuple[int, ...]] = set()
    candidates: dict[tuple[int, ...], tuple[int, ...]] = {}
    for masks in enumerate_assignments(inst.m, inst.n, complete_only=False, budget=budget):
        vec = tuple(v.rank_mask(x) for v, x in zip(vals, masks))
        sorted_seen.add(tuple(sorted(vec)))
        if all(r == popcount(x) for r, x in zip(vec, masks)) and vec not in candidates:
            candidates[vec] = masks
    dominating = [s for s in sorted_seen if all(lorenz_dominates(s, t) for t in sorted_seen)]
    if not dominating:
        raise InvariantViolation("no Lorenz-dominating allocation exists for this profile")
    target = dominating[0]
    best = max(vec for vec in candidates if tuple(sorted(vec)) == target)
    return Allocation.from_masks(candidates[best])


def cleanup_non_wasteful(f: Mechanism | Callable[[Instance], Allocation]) -> Mechanism:
    """Wrap ``f`` so every bundle is cut down to a greedy basis of itself."""
    name = getattr(f, "name", getattr(f, "__name__", "f"))

    def wrapped(inst: Instance) -> Allocation:
        a = f(inst)
        a.check(inst)
        return Allocation.from_masks(
            [max_independent_mask(v, x) for v, x in zip(inst.valuations, a.masks())]
        )

    return Mechanism(f"cleanup({name})", wrapped)


def serial_dictatorship(inst: Instance, order: Sequence[int] | None = None) -> Allocation:
    """Agents in ``order`` each take a greedy basis of what is left."""
    order = list(range(inst.n)) if order is None else list(order)
    if sorted(order) != list(range(inst.n)):
        raise InputError(f"dictatorship order {order} is not a permutation of the agents")
    remaining = (1 << inst.m) - 1
    masks = [0] * inst.n
    for i in order:
        masks[i] = max_independent_mask(inst.valuations[i], remaining)
        remaining &= ~masks[i]
    return Allocation.from_masks(masks)


def empty_mechanism(inst: Instance) -> Allocation:
    return Allocation.empty(inst.n)


def highest_report_takes_all(inst: Instance) -> Allocation:
    """Every good goes to the agent reporting the largest total value (lowest index on ties)."""
    full = (1 << inst.m) - 1
    winner = max(range(inst.n), key=lambda i: (inst.valuations[i].rank_mask(full), -i))
    masks = [0] * inst.n
    masks[winner] = full
    return Allocation.from_masks(masks)


def first_agent_takes_good_zero(inst: Instance) -> Allocation:
    """Agent 0 receives good 0 when it is independent for her, nobody gets anything else."""
    masks = [0] * inst.n
    if inst.m and inst.valuations[0].rank_mask(1) == 1:
        masks[0] = 1
    return Allocation.from_masks(masks)


def reversed_priority_pe(inst: Instance) -> Allocation:
    """PE with ties broken towards higher agent indices."""
    return pe_run(inst, list(range(inst.n))[::-1]).allocation


def get_mechanism(name: str) -> Mechanism:
    """Resolve a CLI mechanism name.

    ``pe``, ``pe-reversed``, ``oracle``, ``empty``, ``pe-needy``, ``highest-report``, ``first-good``,
    ``dictator:<i,j,...>`` (0-based agent order) and ``cleanup:<name>``.
    """
    if name == "pe":
        return Mechanism("pe", pe_mechanism)
    if name == "oracle":
        return Mechanism("oracle", lorenz_dominating_oracle)
    if name == "empty":
        return Mechanism("empty", empty_mechanism)
    if name == "pe-needy":
        return Mechanism("pe-needy", pe_needy_priority)
    if name == "pe-reversed":
        return Mechanism("pe-reversed", reversed_priority_pe)
    if name == "first-good":
        return Mechanism("first-good", first_agent_takes_good_zero)
    if name == "highest-report":
        return Mechanism("highest-report", highest_report_takes_all)
    if name.startswith("cleanup:"):
        return cleanup_non_wasteful(get_mechanism(name[len("cleanup:"):]))
    if name == "dictator" or name.startswith("dictator:"):
        spec = name.partition(":")[2]
        if not spec:
            return Mechanism(name, serial_dictatorship)
        try:
            order = [int(tok) for tok in spec.split(",")]
        except ValueError as exc:
            raise InputError(f"bad dictator order {spec!r}") from exc
        return Mechanism(name, lambda inst: serial_dictatorship(inst, order))
    raise InputError(f"unknown mechanism {name!r}")
