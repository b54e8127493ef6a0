"""
Named instances and seeded random generators of matroid-rank profiles.

>>> inst = preset("thm4")
>>> (inst.m, inst.n)
(6, 2)
>>> [len(all_matroid_tables(m)) for m in range(5)]
[1, 2, 5, 16, 68]
"""
from __future__ import annotations

import functools
import itertools
import random
from typing import Iterator

from fairmatroid.errors import InputError
from fairmatroid.instances import Instance
from fairmatroid.matroid import (
    Explicit,
    Graphic,
    Partition,
    Uniform,
    Valuation,
    Zero,
    rank_table,
)

STRUCTURED_KINDS = ("uniform", "partition", "graphic", "explicit")


def _random_subset(rng: random.Random, m: int, p: float = 0.6) -> frozenset[int]:
    return frozenset(g for g in range(m) if rng.random() < p)


def random_valuation(rng: random.Random, m: int, kind: str | None = None) -> Valuation:
    """One random matroid-rank valuation over ``m`` goods.

    ``explicit`` draws a structured matroid, truncates its rank at a random level
    and stores the resulting table, so it can produce matroids none of the
    structured kinds express directly.
    """
    kind = kind or rng.choice(STRUCTURED_KINDS)
    if kind == "uniform":
        ground = _random_subset(rng, m, 0.7)
        return Uniform(m, ground, rng.randint(0, len(ground)))
    if kind == "partition":
        k = rng.randint(1, max(1, m // 2 + 1))
        blocks: list[set[int]] = [set() for _ in range(k)]
        for g in range(m):
            slot = rng.randrange(k + 1)  # slot k leaves the good worthless
            if slot < k:
                blocks[slot].add(g)
        return Partition(m, tuple((b, rng.randint(0, len(b))) for b in blocks if b))
    if kind == "graphic":
        nv = rng.randint(2, max(2, min(5, m + 1)))
        edges = [(g, (rng.randrange(nv), rng.randrange(nv))) for g in range(m) if rng.random() < 0.85]
        return Graphic(m, nv, tuple(edges))
    if kind == "explicit":
        if m > 10:
            raise InputError("random explicit valuations are limited to m <= 10")
        base = random_valuation(rng, m, rng.choice(STRUCTURED_KINDS[:3]))
        table = rank_table(base)
        cut = rng.randint(0, table[-1]) if table else 0
        return Explicit(m, tuple(min(r, cut) for r in table))
    if kind == "zero":
        return Zero(m)
    raise InputError(f"unknown random kind {kind!r}")


def random_instance(rng: random.Random, m: int, n: int, kinds=STRUCTURED_KINDS) -> Instance:
    return Instance(m, tuple(random_valuation(rng, m, rng.choice(kinds)) for _ in range(n)))


def fixture_instances(count: int = 500, seed: int = 0, m_max: int = 6, n_max: int = 3) -> list[Instance]:
    """Deterministic mixed-kind fixture set with ``1 <= m <= m_max`` and ``1 <= n <= n_max``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        m = rng.randint(1, m_max)
        n = rng.randint(1, n_max)
        out.append(random_instance(rng, m, n))
    return out


@functools.lru_cache(maxsize=None)
def all_matroid_tables(m: int) -> tuple[tuple[int, ...], ...]:
    """Every matroid rank table on ``m`` labelled elements (1, 2, 5, 16, 68 for m = 0..4).

    Subsets are filled in increasing bitmask order, so every proper subset of
    ``S`` is known when ``S`` is decided; binary marginals and local
    submodularity are checked against those.
    """
    if m > 5:
        raise InputError("exhaustive matroid enumeration is limited to m <= 5")
    size = 1 << m
    table = [0] * size
    out = []

    def fill(s: int) -> None:
        if s == size:
            out.append(tuple(table))
            return
        low = s & -s
        for r in (table[s ^ low], table[s ^ low] + 1):
            ok = True
            bits = [1 << g for g in range(m) if s >> g & 1]
            for b in bits:
                if not 0 <= r - table[s ^ b] <= 1:
                    ok = False
                    break
            if ok:
                for x in range(len(bits)):
                    for y in range(x + 1, len(bits)):
                        bx, by = bits[x], bits[y]
                        if r + table[s ^ bx ^ by] > table[s ^ bx] + table[s ^ by]:
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                table[s] = r
                fill(s + 1)
        table[s] = 0

    if size > 1:
        fill(1)
    else:
        out.append((0,))
    return tuple(out)


def all_matroid_valuations(m: int) -> tuple[Explicit, ...]:
    return tuple(Explicit(m, t) for t in all_matroid_tables(m))


def _thm4() -> Instance:
    v1 = Uniform(6, frozenset({0, 1}), 2)
    v2 = Partition(6, ((frozenset({0, 1}), 1), (frozenset({2, 3, 4, 5}), 2)))
    return Instance(6, (v1, v2))


def _thm4_star() -> Instance:
    # misreport profile with a=0, {b, c, d} = {1, 2, 3}
    return Instance(6, (Uniform(6, frozenset({0, 1, 2, 3}), 4), Uniform(6, frozenset({1, 2, 3}), 3)))


def _triangle() -> Instance:
    tri = Graphic(3, 3, ((0, (0, 1)), (1, (1, 2)), (2, (0, 2))))
    return Instance(3, (tri, tri))


def _twin_uniform() -> Instance:
    u = Uniform(2, frozenset({0, 1}), 2)
    return Instance(2, (u, u))


PRESETS = {
    "thm4": _thm4,
    "thm4-star": _thm4_star,
    "triangle": _triangle,
    "twin-uniform": _twin_uniform,
    "zero": lambda: Instance(3, (Zero(3), Zero(3))),
    "empty": lambda: Instance(0, (Zero(0),)),
}


def preset(name: str) -> Instance:
    """Embedded instance by name; ``fixture:<k>`` gives the k-th default fixture."""
    if name.startswith("fixture:"):
        try:
            k = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad fixture index in {name!r}") from exc
        fixtures = fixture_instances(max(500, k + 1))
        if not 0 <= k < len(fixtures):
            raise InputError(f"fixture index {k} out of range")
        return fixtures[k]
    try:
        return PRESETS[name]()
    except KeyError:
        raise InputError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None


def iter_matroid_profiles(m: int, n: int) -> Iterator[Instance]:
    """Every profile of ``n`` explicit matroid valuations over ``m`` goods."""
    vals = all_matroid_valuations(m)
    for combo in itertools.product(vals, repeat=n):
        yield Instance(m, combo)


__all__ = [
    "PRESETS",
    "all_matroid_tables",
    "all_matroid_valuations",
    "fixture_instances",
    "iter_matroid_profiles",
    "preset",
    "random_instance",
    "random_valuation",
]
