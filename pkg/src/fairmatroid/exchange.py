"""
Exchange graphs over a non-wasteful allocation and the path constructions built on them.

For an allocation ``A`` the exchange graph has an edge ``g -> h`` iff some agent ``i``
holds ``g``, does not hold ``h``, and ``A_i - g + h`` stays independent for ``i``.
Augmenting along a *shortest* path from the free goods of one agent to a sink keeps
every bundle independent, which is what the mechanisms here are built on.

All witness searches scan goods in ascending id order so outputs are reproducible.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from fairmatroid.errors import (
    InvariantViolation,
    ParetoViolation,
    PreconditionError,
    UnsupportedKindError,
)
from fairmatroid.instances import Allocation, Instance
from fairmatroid.matroid import Valuation, free_mask, from_mask, popcount, to_mask

logger = logging.getLogger(__name__)

FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True)
class AugPath:
    """A simple path in an exchange graph, listed from source to sink."""

    vertices: tuple[int, ...]
    direction: str = FORWARD

    def __post_init__(self):
        verts = tuple(int(g) for g in self.vertices)
        if not verts:
            raise PreconditionError("a path needs at least one vertex")
        if len(set(verts)) != len(verts):
            raise PreconditionError(f"path {verts} repeats a vertex")
        if self.direction not in (FORWARD, REVERSE):
            raise PreconditionError(f"unknown path direction {self.direction!r}")
        object.__setattr__(self, "vertices", verts)

    def __len__(self):
        return len(self.vertices)

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def sink(self) -> int:
        return self.vertices[-1]

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.vertices, self.vertices[1:]))


@dataclass(frozen=True)
class ExchangeGraph:
    m: int
    edges: frozenset
    owner: tuple

    def successors(self, g: int) -> list[int]:
        return self._adj[g]

    def __post_init__(self):
        adj: list[list[int]] = [[] for _ in range(self.m)]
        for g, h in self.edges:
            adj[g].append(h)
        for lst in adj:
            lst.sort()
        object.__setattr__(self, "_adj", adj)

    def has_path(self, path: AugPath) -> bool:
        return all((g, h) in self.edges for g, h in path.edges())

    def to_dot(self) -> str:
        lines = ["digraph exchange {"]
        for g in range(self.m):
            own = self.owner[g]
            label = f"g{g}/free" if own is None else f"g{g}/agent{own}"
            lines.append(f'  g{g} [label="{label}"];')
        for g, h in sorted(self.edges):
            lines.append(f"  g{g} -> g{h};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _require_matroids(inst: Instance) -> None:
    for i, v in enumerate(inst.valuations):
        if not v.matroid:
            raise UnsupportedKindError(f"agent {i} has kind {v.kind!r}; exchange graphs need matroids")


def _owner_of(masks: tuple[int, ...], m: int) -> tuple:
    own: list = [None] * m
    for i, x in enumerate(masks):
        for g in range(m):
            if x >> g & 1:
                own[g] = i
    return tuple(own)


def _check_non_wasteful(inst: Instance, masks: tuple[int, ...]) -> None:
    for i, (v, x) in enumerate(zip(inst.valuations, masks)):
        if v.rank_mask(x) != popcount(x):
            raise PreconditionError(f"bundle of agent {i} is not independent (allocation is wasteful)")


def graph_from_masks(inst: Instance, masks: tuple[int, ...]) -> ExchangeGraph:
    m = inst.m
    edges = set()
    for v, x in zip(inst.valuations, masks):
        size = popcount(x)
        for g in range(m):
            if not x >> g & 1:
                continue
            base = x & ~(1 << g)
            for h in range(m):
                if x >> h & 1:
                    continue
                if v.rank_mask(base | 1 << h) == size:
                    edges.add((g, h))
    return ExchangeGraph(m, frozenset(edges), _owner_of(masks, m))


def build_exchange_graph(inst: Instance, a: Allocation) -> ExchangeGraph:
    a.check(inst)
    _require_matroids(inst)
    masks = a.masks()
    _check_non_wasteful(inst, masks)
    return graph_from_masks(inst, masks)


def _bfs(graph: ExchangeGraph, sources: int, sinks: int) -> list[int] | None:
    """Shortest source->sink path as a vertex list; sets given as bitmasks.

    Sources are seeded in ascending id order and neighbours expanded in ascending
    order, so among equal-length paths the result is fixed.
    """
    for g in range(graph.m):
        if sources >> g & 1 and sinks >> g & 1:
            return [g]
    parent: dict[int, int | None] = {}
    queue: deque[int] = deque()
    for g in range(graph.m):
        if sources >> g & 1:
            parent[g] = None
            queue.append(g)
    while queue:
        g = queue.popleft()
        for h in graph.successors(g):
            if h in parent:
                continue
            parent[h] = g
            if sinks >> h & 1:
                path = [h]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(h)
    return None


def shortest_path(graph: ExchangeGraph, sources: Iterable[int], sinks: Iterable[int]) -> AugPath | None:
    path = _bfs(graph, to_mask(sources, graph.m), to_mask(sinks, graph.m))
    return None if path is None else AugPath(tuple(path), FORWARD)


def apply_forward(masks: tuple[int, ...], owner: tuple, path: tuple[int, ...], gainer: int) -> list[int]:
    """Swap along every path edge leaving a bundle, give the source to ``gainer``
    and take the sink away from its owner (no-op when the sink is unallocated)."""
    new = list(masks)
    for g, h in zip(path, path[1:]):
        k = owner[g]
        new[k] = (new[k] & ~(1 << g)) | (1 << h)
    new[gainer] |= 1 << path[0]
    if len(path) == 1 and owner[path[0]] is not None:
        new[owner[path[0]]] &= ~(1 << path[0])
    loser = owner[path[-1]]
    if loser is not None and len(path) > 1:
        new[loser] &= ~(1 << path[-1])
    return new


def growth_path(inst: Instance, masks: tuple[int, ...], graph: ExchangeGraph, agent: int) -> list[int] | None:
    """Shortest path from the agent's free goods to the unallocated goods."""
    v = inst.valuations[agent]
    allocated = 0
    for x in masks:
        allocated |= x
    unalloc = ((1 << inst.m) - 1) & ~allocated
    if not unalloc:
        return None
    src = free_mask(v, masks[agent])
    if not src:
        return None
    return _bfs(graph, src, unalloc)


def transfer_path(
    inst: Instance, masks: tuple[int, ...], graph: ExchangeGraph, gainer: int, loser: int
) -> list[int] | None:
    """Shortest path from the gainer's free goods into the loser's bundle."""
    src = free_mask(inst.valuations[gainer], masks[gainer])
    if not src or not masks[loser]:
        return None
    return _bfs(graph, src, masks[loser])


def _verify_bundles(inst: Instance, new: list[int], expected_sizes: list[int], what: str) -> None:
    seen = 0
    for i, (v, x) in enumerate(zip(inst.valuations, new)):
        if x & seen:
            raise InvariantViolation(f"{what}: bundles overlap after augmentation")
        seen |= x
        if popcount(x) != expected_sizes[i]:
            raise InvariantViolation(f"{what}: agent {i} has {popcount(x)} goods, expected {expected_sizes[i]}")
        if v.rank_mask(x) != popcount(x):
            raise InvariantViolation(f"{what}: bundle of agent {i} lost independence")


def augment_forward(inst: Instance, a: Allocation, q: AugPath, gainer: int, verify: bool = True) -> Allocation:
    """Augment ``a`` along ``q`` in favour of ``gainer``.

    ``q`` must be a shortest path from the gainer's free goods either to another
    agent's bundle (that agent loses one good) or to the unallocated goods (growth
    mode: the allocated total rises by one). Shortestness is re-checked because
    independence is only guaranteed along shortest paths.
    """
    graph = build_exchange_graph(inst, a)
    masks = a.masks()
    if not 0 <= gainer < inst.n:
        raise PreconditionError(f"no agent {gainer}")
    path = q.vertices
    if any(not 0 <= g < inst.m for g in path):
        raise PreconditionError("path leaves the ground set")
    src = free_mask(inst.valuations[gainer], masks[gainer])
    loser = graph.owner[path[-1]]
    if loser is None:
        sinks = ((1 << inst.m) - 1) & ~(sum(masks))
    else:
        if loser == gainer:
            raise PreconditionError("path ends in the gainer's own bundle")
        sinks = masks[loser]
    if not src >> path[0] & 1:
        raise PreconditionError(f"path source g{path[0]} is not free for agent {gainer}")
    if not graph.has_path(q):
        raise PreconditionError(f"{path} is not a path in the exchange graph")
    best = _bfs(graph, src, sinks)
    if best is None or len(best) != len(path):
        raise PreconditionError(f"path {path} is not a shortest path (shortest has {len(best or [])} vertices)")
    new = apply_forward(masks, graph.owner, path, gainer)
    if verify:
        sizes = [popcount(x) for x in masks]
        sizes[gainer] += 1
        if loser is not None:
            sizes[loser] -= 1
        _verify_bundles(inst, new, sizes, "forward augmentation")
    return Allocation.from_masks(new)


def strong_basis_exchange(v: Valuation, A: Iterable[int], B: Iterable[int], a: int) -> int:
    """Some ``b`` in ``B \\ A`` with ``A - a + b`` and ``B - b + a`` both independent."""
    if not v.matroid:
        raise UnsupportedKindError("strong basis exchange needs a matroid")
    am, bm = to_mask(A, v.m), to_mask(B, v.m)
    if popcount(am) != popcount(bm):
        raise PreconditionError("sets must have equal size")
    if v.rank_mask(am) != popcount(am) or v.rank_mask(bm) != popcount(bm):
        raise PreconditionError("both sets must be independent")
    abit = 1 << a
    if not am & abit or bm & abit:
        raise PreconditionError(f"good {a} must lie in A \\ B")
    size = popcount(am)
    for b in range(v.m):
        bbit = 1 << b
        if not bm & bbit or am & bbit:
            continue
        if v.rank_mask((am & ~abit) | bbit) == size and v.rank_mask((bm & ~bbit) | abit) == size:
            return b
    raise InvariantViolation("no strong basis exchange witness; the oracle is not a matroid")


def _greedy_extend(v: Valuation, base: int, pool: int, target: int) -> int:
    """Add goods from ``pool`` (ascending) to independent ``base`` until it has ``target`` goods."""
    out = base
    size = popcount(base)
    for g in range(v.m):
        if size >= target:
            break
        bit = 1 << g
        if pool & bit and not out & bit and v.rank_mask(out | bit) == size + 1:
            out |= bit
            size += 1
    return out


def extend_exchange_matching(
    v: Valuation,
    A: Iterable[int] | int,
    X: Iterable[int] | int,
    S: Iterable[int] | int,
    mu: Mapping[int, int],
    g_prime: int,
    y_mode: bool = False,
) -> int:
    """Extend an exchange matching ``mu: S -> X \\ A`` by one more pair ``(g_prime, mu')``.

    Returns ``mu'`` in ``X \\ (mu(S) + A)`` with ``X - mu' + g_prime`` and
    ``A - (S + g_prime) + (mu(S) + mu')`` both independent. ``y_mode`` covers
    the case ``|X| < |A|``, which additionally needs an extension ``Y`` of ``X``
    inside ``A`` that avoids ``S + g_prime``. Sets may be given as bitmasks.
    """
    if not v.matroid:
        raise UnsupportedKindError("exchange matching needs a matroid")
    am = A if isinstance(A, int) else to_mask(A, v.m)
    xm = X if isinstance(X, int) else to_mask(X, v.m)
    sm = S if isinstance(S, int) else to_mask(S, v.m)
    na, nx = popcount(am), popcount(xm)
    if v.rank_mask(am) != na or v.rank_mask(xm) != nx:
        raise PreconditionError("A and X must be independent")
    if sm & ~(am & ~xm):
        raise PreconditionError("S must lie in A \\ X")
    if set(mu) != set(from_mask(sm)):
        raise PreconditionError("mu must be defined exactly on S")
    image = 0
    for g, x in mu.items():
        bit = 1 << x
        if image & bit:
            raise PreconditionError("mu must be one-to-one")
        if not xm & bit or am & bit:
            raise PreconditionError(f"mu({g}) = {x} must lie in X \\ A")
        if v.rank_mask((xm & ~bit) | 1 << g) != nx:
            raise PreconditionError(f"X - mu({g}) + {g} is not independent")
        image |= bit
    if v.rank_mask((am & ~sm) | image) != na:
        raise PreconditionError("A - S + mu(S) is not independent")
    gbit = 1 << g_prime
    if not am & gbit or (sm | xm) & gbit:
        raise PreconditionError(f"g' = {g_prime} must lie in A \\ (S + X)")
    if y_mode:
        if nx >= na:
            raise PreconditionError("y_mode needs |X| < |A|")
        ext = _greedy_extend(v, xm, am & ~(xm | sm | gbit), na)
        if popcount(ext) != na:
            raise PreconditionError("no extension Y of X inside A avoids S + g'")
    elif nx < na:
        raise PreconditionError("|X| >= |A| required (use y_mode otherwise)")
    a_rest = (am & ~(sm | gbit)) | image
    for c in range(v.m):
        cbit = 1 << c
        if not xm & cbit or (image | am) & cbit:
            continue
        if v.rank_mask((xm & ~cbit) | gbit) == nx and v.rank_mask(a_rest | cbit) == na:
            return c
    raise InvariantViolation("no exchange-matching extension exists; the oracle is not a matroid")


@dataclass(frozen=True)
class ReversePath:
    path: AugPath
    ell: int
    h: int
    steps: int


def reverse_path_bundles(inst: Instance, a: Allocation, path: AugPath, h: int, ell: int) -> Allocation:
    """Bundles obtained from ``a`` by swapping along the edges of ``path`` that end in
    a bundle: ``h`` gains the sink, ``ell`` gives up the source."""
    verts = path.vertices  # source g_k ... sink g_1
    own = a.owner(inst.m)
    new = list(a.masks())
    for src, dst in zip(verts, verts[1:]):
        k = own[dst]
        if k is not None:
            new[k] = (new[k] & ~(1 << dst)) | (1 << src)
    new[h] |= 1 << verts[-1]
    new[ell] &= ~(1 << verts[0])
    return Allocation.from_masks(new)


def find_reverse_path(inst: Instance, x: Allocation, a: Allocation, h: int, verify: bool = True) -> ReversePath:
    """Build a simple path ``g_k -> ... -> g_1`` in the exchange graph of ``x``.

    The sink ``g_1`` lies in ``x[h]`` and is free for ``a[h]``; the source lies in
    ``a[ell]`` and is free for ``x[ell]`` for some agent ``ell`` with
    ``|x[ell]| < |a[ell]|``. Swapping along the path inside ``a`` (``h`` gains,
    ``ell`` loses) keeps every bundle independent. ``a`` is assumed Pareto-efficient;
    if the construction hits a good that ``a`` leaves unallocated, a ParetoViolation
    carrying the improving allocation is raised instead.
    """
    x.check(inst)
    a.check(inst)
    _require_matroids(inst)
    xm, am = x.masks(), a.masks()
    _check_non_wasteful(inst, xm)
    _check_non_wasteful(inst, am)
    if popcount(xm[h]) <= popcount(am[h]):
        raise PreconditionError(f"agent {h} must hold more goods in x than in a")
    vals = inst.valuations
    low = {i for i in range(inst.n) if popcount(xm[i]) < popcount(am[i])}
    a_owner = a.owner(inst.m)

    seed_mask = xm[h] & free_mask(vals[h], am[h])
    if not seed_mask:
        raise InvariantViolation("augmentation property failed: x[h] has no good free for a[h]")
    g1 = (seed_mask & -seed_mask).bit_length() - 1
    path = [g1]  # sink-first
    matched: dict[int, dict[int, int]] = {}  # agent -> {good in a-bundle: next vertex in x-bundle}
    on_path = 1 << g1

    for step in range(inst.m + 1):
        gt = path[-1]
        owner = a_owner[gt]
        if owner is None:
            improved = _partial_reverse(inst, am, a_owner, path, h)
            raise ParetoViolation(
                f"good {gt} is unallocated in a, yet the partial path improves agent {h}",
                good=gt,
                improved=improved,
            )
        if owner in low and free_mask(vals[owner], xm[owner]) >> gt & 1:
            result = ReversePath(AugPath(tuple(reversed(path)), REVERSE), owner, h, step)
            if verify:
                _verify_reverse(inst, x, a, result)
            return result
        mu = matched.setdefault(owner, {})
        s_mask = sum(1 << g for g in mu)
        a_set = am[owner] | (1 << g1 if owner == h else 0)
        nxt = extend_exchange_matching(
            vals[owner], a_set, xm[owner], s_mask, mu, gt, y_mode=owner in low
        )
        if on_path >> nxt & 1:
            raise InvariantViolation(f"reverse path revisits good {nxt}")
        mu[gt] = nxt
        path.append(nxt)
        on_path |= 1 << nxt
        logger.debug("reverse path step %d: g%d (agent %d) -> g%d", step, gt, owner, nxt)
    raise InvariantViolation("reverse path did not terminate within m steps")


def _partial_reverse(inst, am, a_owner, path, h) -> Allocation:
    new = list(am)
    for j in range(len(path) - 1):
        k = a_owner[path[j]]
        new[k] = (new[k] & ~(1 << path[j])) | (1 << path[j + 1])
    new[h] |= 1 << path[0]
    return Allocation.from_masks(new)


def _verify_reverse(inst: Instance, x: Allocation, a: Allocation, rp: ReversePath) -> None:
    verts = rp.path.vertices
    graph = build_exchange_graph(inst, x)
    if not graph.has_path(rp.path):
        raise InvariantViolation(f"reverse path {verts} is not a path in G(x)")
    xm, am = x.masks(), a.masks()
    v_ell = inst.valuations[rp.ell]
    if not am[rp.ell] >> verts[0] & 1 or not free_mask(v_ell, xm[rp.ell]) >> verts[0] & 1:
        raise InvariantViolation("reverse path source is not in a[ell] and free for x[ell]")
    if not xm[rp.h] >> verts[-1] & 1:
        raise InvariantViolation("reverse path sink is not in x[h]")
    new = reverse_path_bundles(inst, a, rp.path, rp.h, rp.ell).masks()
    sizes = [popcount(m) for m in am]
    sizes[rp.h] += 1
    sizes[rp.ell] -= 1
    _verify_bundles(inst, list(new), sizes, "reverse path")
