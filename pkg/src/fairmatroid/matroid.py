"""
Valuation oracles over a ground set of goods ``{0, ..., m-1}``.

Every valuation answers rank queries on subsets of goods. Internally subsets are
bitmasks (bit ``g`` set iff good ``g`` is in the set); the public helpers accept any
iterable of ints and return frozensets.

Matroid kinds (uniform, partition, graphic, explicit table, zero) are rank functions
of matroids. ``BinaryXOS`` is the broader class ``v(S) = max_F |F & S|``: its
"independent" sets are hereditary but need not satisfy augmentation, so operations
that rely on the exchange property reject it.

>>> v = Partition(6, [({0, 1}, 1), ({2, 3, 4, 5}, 2)])
>>> rank(v, {0, 2, 3})
3
>>> sorted(free_goods(v, {0}))
[2, 3, 4, 5]
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import ClassVar, Iterable

import numpy as np

from fairmatroid.errors import (
    CapabilityError,
    InputError,
    InvariantViolation,
    PreconditionError,
    UnsupportedKindError,
)

EXPLICIT_MAX_M = 16


def to_mask(goods: Iterable[int], m: int) -> int:
    """Bitmask of ``goods``; raises InputError on ids outside ``[0, m)``."""
    if isinstance(goods, int):
        raise InputError("expected a collection of goods, got a bare int")
    mask = 0
    for g in goods:
        if not isinstance(g, (int, np.integer)) or isinstance(g, bool) or not 0 <= g < m:
            raise InputError(f"good id {g!r} out of range for m={m}")
        mask |= 1 << int(g)
    return mask


def from_mask(mask: int) -> frozenset[int]:
    out = []
    g = 0
    while mask:
        if mask & 1:
            out.append(g)
        mask >>= 1
        g += 1
    return frozenset(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Permutation:
    """A bijection on goods; ``forward[g]`` is the new label of good ``g``."""

    forward: tuple[int, ...]

    def __post_init__(self):
        fwd = tuple(int(x) for x in self.forward)
        if sorted(fwd) != list(range(len(fwd))):
            raise InputError(f"not a bijection on [0, {len(fwd)}): {fwd}")
        object.__setattr__(self, "forward", fwd)

    @property
    def m(self) -> int:
        return len(self.forward)

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(m)))

    @classmethod
    def transposition(cls, m: int, a: int, b: int) -> "Permutation":
        fwd = list(range(m))
        fwd[a], fwd[b] = fwd[b], fwd[a]
        return cls(tuple(fwd))

    @property
    def inverse(self) -> "Permutation":
        inv = [0] * self.m
        for g, h in enumerate(self.forward):
            inv[h] = g
        return Permutation(tuple(inv))

    def __call__(self, g: int) -> int:
        return self.forward[g]

    def image(self, goods: Iterable[int]) -> frozenset[int]:
        return frozenset(self.forward[g] for g in goods)

    def image_mask(self, mask: int) -> int:
        out = 0
        for g in range(self.m):
            if mask >> g & 1:
                out |= 1 << self.forward[g]
        return out

    def then(self, other: "Permutation") -> "Permutation":
        """``other ∘ self``: apply self first, then other."""
        if other.m != self.m:
            raise InputError("permutation sizes differ")
        return Permutation(tuple(other.forward[self.forward[g]] for g in range(self.m)))


@dataclass(frozen=True)
class Valuation:
    """Base class. Subclasses implement ``_rank`` on bitmasks."""

    kind: ClassVar[str] = "abstract"
    matroid: ClassVar[bool] = True

    m: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def _rank(self, mask: int) -> int:
        raise NotImplementedError

    def rank_mask(self, mask: int) -> int:
        r = self._cache.get(mask)
        if r is None:
            r = self._rank(mask)
            self._cache[mask] = r
        return r

    def __call__(self, goods: Iterable[int]) -> int:
        return self.rank_mask(to_mask(goods, self.m))

    def ground_mask(self) -> int:
        return (1 << self.m) - 1

    def _restrict(self, xmask: int) -> "Valuation":
        raise NotImplementedError

    def _permute(self, p: Permutation) -> "Valuation":
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Zero(Valuation):
    kind: ClassVar[str] = "zero"

    def _rank(self, mask):
        return 0

    def _restrict(self, xmask):
        return self

    def _permute(self, p):
        return self

    def to_json(self):
        return {"kind": "zero", "m": self.m}


@dataclass(frozen=True)
class Uniform(Valuation):
    """``v(S) = min(cap, |S & ground|)``."""

    kind: ClassVar[str] = "uniform"

    ground: frozenset = frozenset()
    cap: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        to_mask(self.ground, self.m)
        if self.cap < 0:
            raise InputError("uniform cap must be nonnegative")
        object.__setattr__(self, "_gmask", to_mask(self.ground, self.m))

    def _rank(self, mask):
        return min(self.cap, popcount(mask & self._gmask))

    def _restrict(self, xmask):
        return Uniform(self.m, self.ground & from_mask(xmask), self.cap)

    def _permute(self, p):
        return Uniform(self.m, p.image(self.ground), self.cap)

    def to_json(self):
        return {"kind": "uniform", "m": self.m, "ground": sorted(self.ground), "cap": self.cap}


@dataclass(frozen=True)
class Partition(Valuation):
    """``v(S) = sum over parts of min(cap, |S & part|)``; parts pairwise disjoint."""

    kind: ClassVar[str] = "partition"

    parts: tuple = ()

    def __post_init__(self):
        parts = tuple((frozenset(goods), int(cap)) for goods, cap in self.parts)
        seen = 0
        masks = []
        for goods, cap in parts:
            pm = to_mask(goods, self.m)
            if pm & seen:
                raise InputError("partition parts must be pairwise disjoint")
            if cap < 0:
                raise InputError("partition caps must be nonnegative")
            seen |= pm
            masks.append((pm, cap))
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_pmasks", tuple(masks))

    def _rank(self, mask):
        return sum(min(cap, popcount(mask & pm)) for pm, cap in self._pmasks)

    def _restrict(self, xmask):
        x = from_mask(xmask)
        return Partition(self.m, tuple((goods & x, cap) for goods, cap in self.parts if goods & x))

    def _permute(self, p):
        return Partition(self.m, tuple((p.image(goods), cap) for goods, cap in self.parts))

    def to_json(self):
        return {
            "kind": "partition",
            "m": self.m,
            "parts": [{"goods": sorted(goods), "cap": cap} for goods, cap in self.parts],
        }


@dataclass(frozen=True)
class Graphic(Valuation):
    """Cycle matroid: good ``g`` is the edge ``edges[g]``; goods without an edge are loops."""

    kind: ClassVar[str] = "graphic"

    vertices: int = 0
    edges: tuple = ()  # sorted tuple of (good, (u, v))

    def __post_init__(self):
        items = self.edges.items() if isinstance(self.edges, dict) else self.edges
        norm = []
        for g, (a, b) in items:
            g, a, b = int(g), int(a), int(b)
            if not 0 <= g < self.m:
                raise InputError(f"graphic edge for good {g} out of range")
            if not (0 <= a < self.vertices and 0 <= b < self.vertices):
                raise InputError(f"edge ({a}, {b}) uses a vertex outside [0, {self.vertices})")
            norm.append((g, (a, b)))
        norm.sort()
        if len({g for g, _ in norm}) != len(norm):
            raise InputError("a good has two edges")
        object.__setattr__(self, "edges", tuple(norm))

    def _rank(self, mask):
        parent = list(range(self.vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        r = 0
        for g, (a, b) in self.edges:
            if mask >> g & 1:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
                    r += 1
        return r

    def _restrict(self, xmask):
        return Graphic(self.m, self.vertices, tuple((g, e) for g, e in self.edges if xmask >> g & 1))

    def _permute(self, p):
        return Graphic(self.m, self.vertices, tuple((p(g), e) for g, e in self.edges))

    def to_json(self):
        return {
            "kind": "graphic",
            "m": self.m,
            "vertices": self.vertices,
            "edges": {str(g): list(e) for g, e in self.edges},
        }


@dataclass(frozen=True)
class Explicit(Valuation):
    """Full rank table indexed by subset bitmask. Not validated on construction."""

    kind: ClassVar[str] = "explicit"

    table: tuple = ()

    def __post_init__(self):
        if self.m > EXPLICIT_MAX_M:
            raise InputError(f"explicit tables are limited to m <= {EXPLICIT_MAX_M}")
        table = tuple(int(x) for x in self.table)
        if len(table) != 1 << self.m:
            raise InputError(f"explicit table needs {1 << self.m} entries, got {len(table)}")
        if any(x < 0 for x in table):
            raise InputError("explicit table entries must be nonnegative")
        object.__setattr__(self, "table", table)

    def _rank(self, mask):
        return self.table[mask]

    def _restrict(self, xmask):
        return Explicit(self.m, tuple(self.table[s & xmask] for s in range(1 << self.m)))

    def _permute(self, p):
        inv = p.inverse
        return Explicit(self.m, tuple(self.table[inv.image_mask(s)] for s in range(1 << self.m)))

    def to_json(self):
        return {"kind": "explicit", "m": self.m, "table": list(self.table)}


@dataclass(frozen=True)
class BinaryXOS(Valuation):
    """``v(S) = max over F in family of |F & S|``."""

    kind: ClassVar[str] = "binary_xos"
    matroid: ClassVar[bool] = False

    family: tuple = ()

    def __post_init__(self):
        fam = tuple(sorted({frozenset(f) for f in self.family}, key=lambda f: (len(f), sorted(f))))
        masks = tuple(to_mask(f, self.m) for f in fam)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "_fmasks", masks)

    def _rank(self, mask):
        return max((popcount(mask & fm) for fm in self._fmasks), default=0)

    def _restrict(self, xmask):
        x = from_mask(xmask)
        return BinaryXOS(self.m, tuple(f & x for f in self.family))

    def _permute(self, p):
        return BinaryXOS(self.m, tuple(p.image(f) for f in self.family))

    def to_json(self):
        return {"kind": "binary_xos", "m": self.m, "family": [sorted(f) for f in self.family]}


KINDS = {cls.kind: cls for cls in (Zero, Uniform, Partition, Graphic, Explicit, BinaryXOS)}


def is_matroid_kind(v: Valuation) -> bool:
    return v.matroid


def _require_matroid(v: Valuation, op: str) -> None:
    if not v.matroid:
        raise UnsupportedKindError(f"{op} needs a matroid-rank valuation, got kind {v.kind!r}")


def rank(v: Valuation, goods: Iterable[int]) -> int:
    return v.rank_mask(to_mask(goods, v.m))


def is_independent(v: Valuation, goods: Iterable[int]) -> bool:
    mask = to_mask(goods, v.m)
    return v.rank_mask(mask) == popcount(mask)


def free_mask(v: Valuation, xmask: int) -> int:
    """Bitmask of goods ``g`` outside ``xmask`` with ``xmask + g`` independent."""
    size = popcount(xmask)
    out = 0
    for g in range(v.m):
        bit = 1 << g
        if not xmask & bit and v.rank_mask(xmask | bit) == size + 1:
            out |= bit
    return out


def free_goods(v: Valuation, goods: Iterable[int]) -> frozenset[int]:
    _require_matroid(v, "free_goods")
    xmask = to_mask(goods, v.m)
    if v.rank_mask(xmask) != popcount(xmask):
        raise PreconditionError("free_goods needs an independent set")
    return from_mask(free_mask(v, xmask))


def max_independent_mask(v: Valuation, smask: int) -> int:
    """Greedy basis of ``smask``, scanning goods in ascending id order."""
    out = 0
    size = 0
    for g in range(v.m):
        bit = 1 << g
        if smask & bit and v.rank_mask(out | bit) == size + 1:
            out |= bit
            size += 1
    return out


def max_independent_subset(v: Valuation, goods: Iterable[int]) -> frozenset[int]:
    _require_matroid(v, "max_independent_subset")
    smask = to_mask(goods, v.m)
    out = max_independent_mask(v, smask)
    if popcount(out) != v.rank_mask(smask):
        raise InvariantViolation(f"greedy basis smaller than rank for {v!r}")
    return from_mask(out)


def restrict(v: Valuation, goods: Iterable[int]) -> Valuation:
    """``w(S) = v(S & X)``. Restricting to nothing gives the zero valuation."""
    xmask = to_mask(goods, v.m)
    if xmask == 0:
        return Zero(v.m)
    if xmask == v.ground_mask():
        return v
    return v._restrict(xmask)


def remove_good(v: Valuation, g: int) -> Valuation:
    """``v`` with good ``g`` dropped from consideration."""
    return restrict(v, (h for h in range(v.m) if h != g))


def permute(v: Valuation, p: Permutation) -> Valuation:
    """Relabel goods: ``w(S) = v(p^-1(S))``."""
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    if p.m != v.m:
        raise InputError(f"permutation on {p.m} goods applied to valuation over {v.m}")
    return v._permute(p)


def rank_table(v: Valuation) -> tuple[int, ...]:
    """Ranks of every subset, indexed by bitmask."""
    if v.m > EXPLICIT_MAX_M:
        raise CapabilityError(f"rank table for m={v.m} exceeds 2^{EXPLICIT_MAX_M} entries")
    if isinstance(v, Explicit):
        return v.table
    return tuple(v.rank_mask(s) for s in range(1 << v.m))


def to_explicit(v: Valuation) -> Explicit:
    return Explicit(v.m, rank_table(v))


def same_function(v: Valuation, w: Valuation) -> bool:
    return v.m == w.m and rank_table(v) == rank_table(w)


def check_rank_table(table, m: int) -> bool:
    """Exhaustive matroid-rank test: normalized, binary marginals, submodular."""
    t = np.asarray(table, dtype=np.int64)
    if t.shape != (1 << m,) or t[0] != 0:
        return False
    masks = np.arange(1 << m)
    for g in range(m):
        bit = 1 << g
        base = masks[(masks & bit) == 0]
        d = t[base | bit] - t[base]
        if ((d != 0) & (d != 1)).any():
            return False
    # local submodularity r(S+g) + r(S+h) >= r(S+g+h) + r(S) is equivalent to the global form
    for g, h in itertools.combinations(range(m), 2):
        bg, bh = 1 << g, 1 << h
        base = masks[(masks & (bg | bh)) == 0]
        if (t[base | bg] + t[base | bh] < t[base | bg | bh] + t[base]).any():
            return False
    return True


def validate_matroid_rank(v: Valuation, exhaustive_limit: int = EXPLICIT_MAX_M) -> bool:
    """True iff ``v`` is certified to be a matroid rank function.

    Structured kinds are matroids by construction. Explicit tables are checked
    exhaustively when ``m <= exhaustive_limit``; binary XOS is never certified.
    """
    if isinstance(v, BinaryXOS):
        return False
    if not isinstance(v, Explicit):
        return True
    if v.m > exhaustive_limit:
        raise CapabilityError(
            f"cannot certify explicit table with m={v.m} > exhaustive_limit={exhaustive_limit}"
        )
    key = ("valid",)
    if key not in v._cache:
        v._cache[key] = check_rank_table(v.table, v.m)
    return v._cache[key]


_JSON_FIELDS = {
    "zero": set(),
    "uniform": {"ground", "cap"},
    "partition": {"parts"},
    "graphic": {"vertices", "edges"},
    "explicit": {"table"},
    "explicit_rank": {"table"},
    "binary_xos": {"family"},
}


def valuation_from_json(data: dict, m: int | None = None) -> Valuation:
    """Parse one valuation object. ``m`` defaults to the object's own ``m`` field.

    Unknown fields are rejected so that a misspelt key cannot silently fall back
    to a default.

    >>> valuation_from_json({"kind": "uniform", "m": 3, "goods": [0], "cap": 1})
    Traceback (most recent call last):
    ...
    fairmatroid.errors.InputError: uniform valuation has unknown field(s) ['goods']; expected ['cap', 'ground']
    """
    if not isinstance(data, dict) or "kind" not in data:
        raise InputError("valuation must be an object with a 'kind' field")
    kind = data["kind"]
    if kind not in _JSON_FIELDS:
        raise InputError(f"unknown valuation kind {kind!r}")
    extra = set(data) - _JSON_FIELDS[kind] - {"kind", "m"}
    if extra:
        raise InputError(
            f"{kind} valuation has unknown field(s) {sorted(extra)}; expected {sorted(_JSON_FIELDS[kind])}"
        )
    m = data.get("m", m)
    if not isinstance(m, int) or m < 0:
        raise InputError("valuation needs a nonnegative integer 'm'")
    try:
        if kind == "zero":
            return Zero(m)
        if kind == "uniform":
            return Uniform(m, frozenset(data.get("ground", range(m))), int(data["cap"]))
        if kind == "partition":
            return Partition(m, tuple((p["goods"], p["cap"]) for p in data["parts"]))
        if kind == "graphic":
            edges = data["edges"]
            if isinstance(edges, dict):
                edges = {int(k): tuple(e) for k, e in edges.items()}
            else:
                edges = {g: tuple(e) for g, e in enumerate(edges) if e is not None}
            return Graphic(m, int(data["vertices"]), edges)
        if kind in ("explicit", "explicit_rank"):
            return Explicit(m, tuple(data["table"]))
        if kind == "binary_xos":
            return BinaryXOS(m, tuple(frozenset(f) for f in data["family"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed {kind} valuation: {exc}") from exc
    raise InputError(f"unknown valuation kind {kind!r}")
