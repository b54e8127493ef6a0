"""
Strategic audits: profitable-deviation and coalition search, gradualness
(conditions C1, C2 and C1*), index-obliviousness, and a replay of the MMS
impossibility argument against any given mechanism.

Deviation search is sound but not complete: a returned witness is a real
manipulation that re-verifies, an absent one is only evidence. For tiny
universes (every matroid on ``m <= 4`` goods, two agents) the search is
exhaustive.

>>> from fairmatroid.mechanisms import get_mechanism
>>> from fairmatroid.presets import preset
>>> report = run_impossibility_executor(get_mechanism("empty"))
>>> report.violated
'MMS'
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from fairmatroid.errors import InputError, InvariantViolation
from fairmatroid.fairness import FairnessVerdict, is_locally_efficient, is_mms
from fairmatroid.instances import Allocation, Instance, enumerate_assignments, is_non_wasteful, values
from fairmatroid.matroid import (
    Permutation,
    Uniform,
    Valuation,
    Zero,
    max_independent_mask,
    permute,
    popcount,
    rank_table,
    remove_good,
    restrict,
)
from fairmatroid.mechanisms import Mechanism, cleanup_non_wasteful, get_mechanism
from fairmatroid.presets import (
    all_matroid_tables,
    all_matroid_valuations,
    preset,
    random_instance,
    random_valuation,
)

logger = logging.getLogger(__name__)

GENERATORS = ("zero", "free", "removals", "restrictions", "permutations", "random")


# deviations


@dataclass(frozen=True)
class DeviationWitness:
    """A coalition whose joint misreport strictly helps every member (true valuations)."""

    coalition: tuple[int, ...]
    true_profile: Instance
    misreport_profile: Instance
    gains: tuple[int, ...]
    truthful_values: tuple[int, ...] = ()
    deviating_values: tuple[int, ...] = ()

    def __post_init__(self):
        for j in range(self.true_profile.n):
            if j not in self.coalition and self.true_profile.valuations[j] != self.misreport_profile.valuations[j]:
                raise InputError(f"agent {j} is outside the coalition but changed her report")

    def verify(self, f: Mechanism | Callable[[Instance], Allocation]) -> bool:
        """Re-run ``f`` on both profiles and confirm every recorded gain."""
        a = f(self.true_profile)
        b = f(self.misreport_profile)
        gains = tuple(
            self.true_profile.valuations[i].rank_mask(b.masks()[i])
            - self.true_profile.valuations[i].rank_mask(a.masks()[i])
            for i in self.coalition
        )
        return gains == self.gains and all(x > 0 for x in gains)

    def to_json(self) -> dict:
        return {
            "coalition": list(self.coalition),
            "true_profile": self.true_profile.to_json(),
            "misreport_profile": self.misreport_profile.to_json(),
            "gains": list(self.gains),
            "truthful_values": list(self.truthful_values),
            "deviating_values": list(self.deviating_values),
        }


@dataclass(frozen=True)
class MisreportSpace:
    """Seeded family of misreports for one agent.

    ``misreports`` lists candidates in a fixed order (zero, the free matroid,
    single-good removals, restrictions, transpositions, fresh random draws) and
    stops after ``trials`` candidates. ``sample`` draws one candidate.
    """

    generators: tuple[str, ...] = GENERATORS
    seed: int = 0
    trials: int = 200
    restriction_samples: int = 32
    random_samples: int = 32

    def __post_init__(self):
        unknown = set(self.generators) - set(GENERATORS)
        if unknown:
            raise InputError(f"unknown misreport generators {sorted(unknown)}")

    def _all(self, v: Valuation, salt: str) -> Iterator[Valuation]:
        m = v.m
        rng = random.Random(f"{self.seed}:{salt}")
        gens = set(self.generators)
        if "zero" in gens:
            yield Zero(m)
        if "free" in gens:
            yield Uniform(m, frozenset(range(m)), m)
        if "removals" in gens:
            for g in range(m):
                yield remove_good(v, g)
        if "restrictions" in gens:
            if m <= 5:
                xs = range(1, 1 << m)
            else:
                xs = sorted({rng.randrange(1, 1 << m) for _ in range(self.restriction_samples)})
            for x in xs:
                yield restrict(v, (g for g in range(m) if x >> g & 1))
        if "permutations" in gens:
            for a, b in itertools.combinations(range(m), 2):
                yield permute(v, Permutation.transposition(m, a, b))
        if "random" in gens:
            for _ in range(self.random_samples):
                yield random_valuation(rng, m)

    def misreports(self, v: Valuation, salt: str = "") -> Iterator[Valuation]:
        return itertools.islice(self._all(v, salt), self.trials)

    def sample(self, rng: random.Random, v: Valuation) -> Valuation:
        m = v.m
        gen = rng.choice(self.generators)
        if gen == "zero":
            return Zero(m)
        if gen == "free":
            return Uniform(m, frozenset(range(m)), m)
        if gen == "removals" and m:
            return remove_good(v, rng.randrange(m))
        if gen == "restrictions":
            return restrict(v, (g for g in range(m) if rng.random() < 0.5))
        if gen == "permutations":
            perm = list(range(m))
            rng.shuffle(perm)
            return permute(v, Permutation(tuple(perm)))
        return random_valuation(rng, m)


def _gains(inst: Instance, a: Allocation, b: Allocation, members: Sequence[int]):
    am, bm = a.masks(), b.masks()
    before = tuple(inst.valuations[i].rank_mask(am[i]) for i in members)
    after = tuple(inst.valuations[i].rank_mask(bm[i]) for i in members)
    return before, after, tuple(y - x for x, y in zip(before, after))


def find_profitable_deviation(f, inst: Instance, i: int, space: MisreportSpace) -> DeviationWitness | None:
    """First misreport of agent ``i`` (in generation order) that strictly raises her true value."""
    a = f(inst)
    for w in space.misreports(inst.valuations[i], salt=f"agent{i}"):
        dev = inst.replace(i, w)
        before, after, gains = _gains(inst, a, f(dev), (i,))
        if gains[0] > 0:
            return DeviationWitness((i,), inst, dev, gains, before, after)
    return None


def find_coalition_deviation(
    f, inst: Instance, max_coalition: int, space: MisreportSpace
) -> DeviationWitness | None:
    """Coalitions by ascending size then lexicographically; ``space.trials`` joint
    misreports each, every member drawing independently. A witness needs a strict
    gain for every member."""
    if max_coalition > inst.n:
        raise InputError(f"coalition size {max_coalition} exceeds n={inst.n}")
    a = f(inst)
    for size in range(1, max_coalition + 1):
        for coalition in itertools.combinations(range(inst.n), size):
            rng = random.Random(f"{space.seed}:coalition:{coalition}")
            for _ in range(space.trials):
                vals = list(inst.valuations)
                for j in coalition:
                    vals[j] = space.sample(rng, inst.valuations[j])
                dev = Instance(inst.m, tuple(vals))
                before, after, gains = _gains(inst, a, f(dev), coalition)
                if all(x > 0 for x in gains):
                    return DeviationWitness(coalition, inst, dev, gains, before, after)
    return None


def fuzz_coalitions(
    f,
    trials: int = 1000,
    seed: int = 0,
    max_coalition: int = 3,
    m_max: int = 6,
    n_max: int = 4,
    space: MisreportSpace | None = None,
) -> DeviationWitness | None:
    """Each trial draws an instance, a coalition and one joint misreport from ``seed``.

    The lowest failing trial index wins, so the witness does not depend on
    evaluation order.
    """
    space = space or MisreportSpace(seed=seed)
    for t in range(trials):
        rng = random.Random(f"{seed}:fuzz:{t}")
        inst = random_instance(rng, rng.randint(1, m_max), rng.randint(2, n_max))
        size = rng.randint(1, min(max_coalition, inst.n))
        coalition = tuple(sorted(rng.sample(range(inst.n), size)))
        vals = list(inst.valuations)
        for j in coalition:
            vals[j] = space.sample(rng, vals[j])
        dev = Instance(inst.m, tuple(vals))
        before, after, gains = _gains(inst, f(inst), f(dev), coalition)
        if all(x > 0 for x in gains):
            logger.info("fuzz trial %d found a deviation", t)
            return DeviationWitness(coalition, inst, dev, gains, before, after)
    return None


# exhaustive universes


@dataclass(frozen=True)
class Universe:
    """Outputs of a mechanism on every profile of explicit matroids over ``m`` goods."""

    m: int
    n: int
    vals: tuple[Valuation, ...]
    tables: np.ndarray  # (K, 2^m)
    masks: np.ndarray  # (n, K, ..., K) bundle bitmasks
    wasteful: bool

    def profile(self, idx: Sequence[int]) -> Instance:
        return Instance(self.m, tuple(self.vals[k] for k in idx))


def evaluate_universe(f, m: int, n: int = 2) -> Universe:
    vals = all_matroid_valuations(m)
    k = len(vals)
    tables = np.array(all_matroid_tables(m), dtype=np.int64)
    masks = np.zeros((n,) + (k,) * n, dtype=np.int64)
    wasteful = False
    for idx in itertools.product(range(k), repeat=n):
        inst = Instance(m, tuple(vals[j] for j in idx))
        a = f(inst)
        a.check(inst)
        for i, x in enumerate(a.masks()):
            masks[(i,) + idx] = x
            if tables[idx[i], x] != popcount(x):
                wasteful = True
    return Universe(m, n, vals, tables, masks, wasteful)


def exhaustive_deviation_search(f, m: int, n: int = 2, universe: Universe | None = None) -> DeviationWitness | None:
    """Every unilateral misreport among all matroid valuations on ``m`` goods.

    ``f`` runs once per profile; gains are then read off the rank tables.
    """
    u = universe or evaluate_universe(f, m, n)
    k = len(u.vals)
    for i in range(n):
        for others in itertools.product(range(k), repeat=n - 1):
            sl = list(others)
            sl.insert(i, slice(None))
            bundles = u.masks[(i,) + tuple(sl)]  # agent i's bundle for each of her reports
            v = u.tables[:, bundles]  # [true, report]
            gain = v - np.diag(v)[:, None]
            hits = np.argwhere(gain > 0)
            if len(hits):
                t, q = (int(x) for x in hits[0])
                true_idx = list(others)
                true_idx.insert(i, t)
                dev_idx = list(others)
                dev_idx.insert(i, q)
                before, after = int(v[t, t]), int(v[t, q])
                return DeviationWitness(
                    (i,), u.profile(true_idx), u.profile(dev_idx), (after - before,), (before,), (after,)
                )
    return None


def universe_gradual(f, m: int, n: int = 2, universe: Universe | None = None) -> FairnessVerdict:
    """C1 and C2 on every profile of the universe (it is closed under restriction)."""
    u = universe or evaluate_universe(f, m, n)
    notes = ()
    if u.wasteful:
        f = cleanup_non_wasteful(f)
        u = evaluate_universe(f, m, n)
        notes = ("mechanism is wasteful; audited its non-wasteful cleanup",)
    index = {tuple(t): j for j, t in enumerate(u.tables.tolist())}
    size = 1 << m
    subsets = np.arange(size)
    rid = np.array([[index[tuple(u.tables[j, subsets & x].tolist())] for x in range(size)] for j in range(len(u.vals))])
    sizes = np.vectorize(popcount)(u.masks)
    full = size - 1
    k = len(u.vals)
    for idx in itertools.product(range(k), repeat=n):
        for i in range(n):
            base = sizes[(i,) + idx]
            amask = int(u.masks[(i,) + idx])
            for g in range(m):
                alt = list(idx)
                alt[i] = rid[idx[i], full ^ (1 << g)]
                d = base - sizes[(i,) + tuple(alt)]
                if not 0 <= d <= 1:
                    return FairnessVerdict(
                        "gradual", False,
                        {"condition": "C1", "agent": i, "good": g, "profile": list(idx), "sizes": [int(base), int(base - d)]},
                        notes,
                    )
            for x in range(size):
                if x & amask != amask:
                    continue
                alt = list(idx)
                alt[i] = rid[idx[i], x]
                other = sizes[(i,) + tuple(alt)]
                if other != base:
                    return FairnessVerdict(
                        "gradual", False,
                        {"condition": "C2", "agent": i, "superset": x, "profile": list(idx), "sizes": [int(base), int(other)]},
                        notes,
                    )
    return FairnessVerdict("gradual", True, None, notes)


def check_gradual(f, inst: Instance, superset_budget: int = 256, samples: int = 32, seed: int = 0) -> FairnessVerdict:
    """C1 over every (agent, good); C2 over every superset of ``A_i`` when at most
    ``superset_budget`` exist, else ``samples`` random ones; C1* over sampled ``Y``."""
    notes: tuple[str, ...] = ()
    a = f(inst)
    a.check(inst)
    if not is_non_wasteful(inst, a):
        f = cleanup_non_wasteful(f)
        a = f(inst)
        notes = ("mechanism is wasteful here; audited its non-wasteful cleanup",)
    rng = random.Random(f"{seed}:gradual")
    m = inst.m
    full = (1 << m) - 1
    sizes = a.sizes()

    def fail(cond, i, **extra):
        return FairnessVerdict("gradual", False, {"condition": cond, "agent": i, **extra}, notes)

    for i, v in enumerate(inst.valuations):
        for g in range(m):
            b = f(inst.replace(i, remove_good(v, g)))
            if not 0 <= sizes[i] - b.sizes()[i] <= 1:
                return fail("C1", i, good=g, sizes=[sizes[i], b.sizes()[i]])
        amask = a.masks()[i]
        rest = [g for g in range(m) if not amask >> g & 1]
        if 1 << len(rest) <= superset_budget:
            extras = itertools.chain.from_iterable(itertools.combinations(rest, r) for r in range(len(rest) + 1))
        else:
            extras = (tuple(g for g in rest if rng.random() < 0.5) for _ in range(samples))
        for extra in extras:
            x = sorted(a.bundles[i] | set(extra))
            b = f(inst.replace(i, restrict(v, x)))
            if b.sizes()[i] != sizes[i]:
                return fail("C2", i, superset=x, sizes=[sizes[i], b.sizes()[i]])
        for _ in range(samples):
            y = [g for g in range(m) if rng.random() < 0.5]
            keep = full & ~sum(1 << g for g in y)
            b = f(inst.replace(i, restrict(v, (g for g in range(m) if keep >> g & 1))))
            if not 0 <= sizes[i] - b.sizes()[i] <= len(y):
                return fail("C1*", i, removed=y, sizes=[sizes[i], b.sizes()[i]])
    return FairnessVerdict("gradual", True, None, notes)


def check_index_oblivious(f, inst: Instance, trials: int = 100, seed: int = 0) -> FairnessVerdict:
    """Compare ``v_i(A_i)`` with ``v^pi_i(A'_i)`` for the identity, every
    transposition when ``m <= 6``, and ``trials`` seeded random permutations."""
    m = inst.m
    perms = [Permutation.identity(m)]
    if m <= 6:
        perms += [Permutation.transposition(m, a, b) for a, b in itertools.combinations(range(m), 2)]
    rng = random.Random(f"{seed}:io")
    for _ in range(trials):
        p = list(range(m))
        rng.shuffle(p)
        perms.append(Permutation(tuple(p)))
    base = values(inst, f(inst))
    for p in perms:
        pinst = Instance(m, tuple(permute(v, p) for v in inst.valuations))
        got = values(pinst, f(pinst))
        for i, (x, y) in enumerate(zip(base, got)):
            if x != y:
                return FairnessVerdict(
                    "index-oblivious", False,
                    {"permutation": list(p.forward), "agent": i, "original": x, "permuted": y},
                )
    return FairnessVerdict("index-oblivious", True)


# impossibility replay


@dataclass
class ExecutorStep:
    name: str
    profile: Instance
    allocation: Allocation
    checks: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "step": self.name,
            "profile": self.profile.to_json(),
            "allocation": self.allocation.to_json(),
            "checks": self.checks,
        }


@dataclass
class ExecutorReport:
    mechanism: str
    steps: list[ExecutorStep]
    violated: str | None
    witness: dict | None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mechanism": self.mechanism,
            "steps": [s.to_json() for s in self.steps],
            "violated": self.violated,
            "witness": self.witness,
            "notes": self.notes,
        }


def _uset(m: int, goods) -> Uniform:
    goods = frozenset(goods)
    return Uniform(m, goods, len(goods))


def impossibility_profile() -> Instance:
    return preset("thm4")


def run_impossibility_executor(f) -> ExecutorReport:
    """Replay the argument that no mechanism is truthful, index-oblivious,
    locally efficient and maximin fair on the two-agent, six-good profile.

    The chain stops at the first broken link and reports it with a witness.
    Wasteful mechanisms are analysed through their non-wasteful cleanup, which
    gives every agent the same value.
    """
    name = getattr(f, "name", "f")
    raw = f
    g = cleanup_non_wasteful(f)
    steps: list[ExecutorStep] = []
    notes: list[str] = []

    def run(inst: Instance) -> Allocation:
        a = raw(inst)
        if not isinstance(a, Allocation):
            raise InputError(f"mechanism {name} returned {type(a).__name__}, not an Allocation")
        a.check(inst)
        b = g(inst)
        if b != a and "cleanup" not in " ".join(notes):
            notes.append("mechanism is wasteful; analysing its non-wasteful cleanup (same values)")
        return b

    def report(violated, witness):
        return ExecutorReport(name, steps, violated, witness, notes)

    def mms_step(step: ExecutorStep):
        verdict = is_mms(step.profile, step.allocation)
        step.checks.append(verdict.to_json())
        if verdict.holds:
            return None
        w = dict(verdict.witness)
        w.update(profile=step.profile.to_json(), allocation=step.allocation.to_json())
        return report("MMS", w)

    # step 1: the base profile
    v = impossibility_profile()
    m = v.m
    a = run(v)
    s1 = ExecutorStep("base profile", v, a)
    steps.append(s1)
    out = mms_step(s1)
    if out:
        return out
    s1.checks.append({"property": "values", "values": list(values(v, a))})
    gset = {0, 1}
    a1, a2 = a.bundles
    if not (len(a1) == 1 and a1 <= gset and len(a2 & gset) == 1 and len(a2) == 3):
        s1.checks.append({"property": "bundle shape", "holds": False})
        return report("precondition chain broken", {"allocation": a.to_json(), "reason": "bundles are not ({a}, {b, c, d})"})
    (ga,) = a1
    (gb,) = a2 & gset
    gc, gd = sorted(a2 - gset)
    w2 = _uset(m, (gb, gc, gd))
    wx = {x: Instance(m, (_uset(m, (ga, x)), w2)) for x in (gb, gc, gd)}

    # step 2: the three w^x profiles keep the allocation
    pb = wx[gb]
    bb = run(pb)
    s2 = ExecutorStep("restriction of agent 2 to her bundle", pb, bb)
    steps.append(s2)
    if len(bb.bundles[1]) != 3:
        # C2 fails for agent 2, which turns into a direct manipulation
        if len(bb.bundles[1]) < 3:
            true_p, dev_p = pb, pb.replace(1, v.valuations[1])
        else:
            true_p, dev_p = pb.replace(1, v.valuations[1]), pb
        before, after, gains = _gains(true_p, g(true_p), g(dev_p), (1,))
        s2.checks.append({"property": "gradual", "condition": "C2", "holds": False})
        if gains[0] > 0:
            wit = DeviationWitness((1,), true_p, dev_p, gains, before, after)
            return report("truthful", wit.to_json())
        return report("gradual", {"condition": "C2", "agent": 1, "profile": pb.to_json(), "sizes": [3, len(bb.bundles[1])]})
    out = mms_step(s2)
    if out:
        return out
    base_vals = values(pb, bb)
    for x in (gc, gd):
        p = Permutation.transposition(m, gb, x)
        px = wx[x]
        bx = run(px)
        step = ExecutorStep(f"relabel goods {gb} and {x}", px, bx)
        steps.append(step)
        got = values(px, bx)
        ok = got == base_vals
        step.checks.append({"property": "index-oblivious", "holds": ok, "values": list(got)})
        if not ok:
            i = next(k for k in range(2) if got[k] != base_vals[k])
            return report(
                "index-oblivious",
                {
                    "profile": pb.to_json(),
                    "permutation": list(p.forward),
                    "agent": i,
                    "original": base_vals[i],
                    "permuted": got[i],
                },
            )

    # step 3: the misreport profile
    pstar = Instance(m, (_uset(m, (ga, gb, gc, gd)), w2))
    astar = run(pstar)
    s3 = ExecutorStep("agent 1 reports all four goods", pstar, astar)
    steps.append(s3)
    out = mms_step(s3)
    if out:
        return out
    le = is_locally_efficient(pstar, astar)
    s3.checks.append(le.to_json())
    if not le.holds:
        w = dict(le.witness)
        w.update(profile=pstar.to_json(), allocation=astar.to_json())
        return report("local-efficiency", w)
    if ga not in astar.bundles[0]:
        return report("precondition chain broken", {"allocation": astar.to_json(), "reason": "good a not with agent 1"})
    ys = sorted(astar.bundles[0] & {gb, gc, gd})
    if not ys:
        return report("precondition chain broken", {"allocation": astar.to_json(), "reason": "agent 1 got no good of b, c, d"})
    y = ys[0]

    # step 4: agent 1 with true valuation w^y gains by reporting w*_1
    true_p = wx[y]
    dev_p = true_p.replace(0, pstar.valuations[0])
    before, after, gains = _gains(true_p, raw(true_p), raw(dev_p), (0,))
    if gains[0] <= 0:
        raise InvariantViolation("impossibility chain completed without a violation")
    wit = DeviationWitness((0,), true_p, dev_p, gains, before, after)
    steps.append(ExecutorStep("truthful report of w^y", true_p, g(true_p), [{"property": "truthful", "holds": False}]))
    return report("truthful", wit.to_json())


def recheck_report(report: ExecutorReport, f) -> bool:
    """Re-run the relevant auditor on the witness and confirm the violation."""
    w = report.witness or {}
    if report.violated == "MMS":
        inst = Instance.from_json(w["profile"])
        a = cleanup_non_wasteful(f)(inst)
        return a == Allocation.from_json(w["allocation"]) and not is_mms(inst, a).holds
    if report.violated == "local-efficiency":
        inst = Instance.from_json(w["profile"])
        a = cleanup_non_wasteful(f)(inst)
        return not is_locally_efficient(inst, a).holds
    if report.violated == "truthful":
        wit = DeviationWitness(
            tuple(w["coalition"]),
            Instance.from_json(w["true_profile"]),
            Instance.from_json(w["misreport_profile"]),
            tuple(w["gains"]),
        )
        return wit.verify(f)
    if report.violated == "index-oblivious":
        inst = Instance.from_json(w["profile"])
        p = Permutation(tuple(w["permutation"]))
        pinst = Instance(inst.m, tuple(permute(v, p) for v in inst.valuations))
        return values(inst, f(inst)) != values(pinst, f(pinst))
    return False


# truthful iff gradual, on a whole universe


def hashed_mechanism(seed: int) -> Mechanism:
    """Non-wasteful but arbitrary: picks a non-wasteful allocation by hashing the profile."""

    def f(inst: Instance) -> Allocation:
        options = [
            masks
            for masks in enumerate_assignments(inst.m, inst.n)
            if all(v.rank_mask(x) == popcount(x) for v, x in zip(inst.valuations, masks))
        ]
        key = random.Random(f"{seed}:{[rank_table(v) for v in inst.valuations]}")
        return Allocation.from_masks(key.choice(options))

    return Mechanism(f"hashed:{seed}", f)


def capped_dictatorship(inst: Instance) -> Allocation:
    """Agent 0 takes at most one good (lowest valued id), then the others take greedy bases."""
    remaining = (1 << inst.m) - 1
    masks = [0] * inst.n
    first = next((g for g in range(inst.m) if inst.valuations[0].rank_mask(1 << g)), None)
    if first is not None:
        masks[0] = 1 << first
        remaining &= ~masks[0]
    for i in range(1, inst.n):
        masks[i] = max_independent_mask(inst.valuations[i], remaining)
        remaining &= ~masks[i]
    return Allocation.from_masks(masks)


def mechanism_family() -> list[Mechanism]:
    """Non-wasteful mechanisms (some truthful, some not) for the truthful/gradual cross-check."""
    fam = [get_mechanism(name) for name in ("pe", "pe-reversed", "dictator:0,1", "dictator:1,0", "empty", "pe-needy")]
    fam += [get_mechanism("cleanup:highest-report"), get_mechanism("cleanup:first-good")]
    fam.append(Mechanism("capped-dictator", capped_dictatorship))
    fam += [hashed_mechanism(s) for s in range(3)]
    return fam


@dataclass(frozen=True)
class FamilyRow:
    mechanism: str
    truthful: bool
    gradual: bool
    witness: dict | None

    @property
    def consistent(self) -> bool:
        return self.truthful == self.gradual


def truthful_gradual_row(f, m: int = 3, n: int = 2) -> FamilyRow:
    u = evaluate_universe(f, m, n)
    dev = exhaustive_deviation_search(f, m, n, universe=u)
    grad = universe_gradual(f, m, n, universe=u)
    witness = dev.to_json() if dev else grad.witness
    return FamilyRow(getattr(f, "name", "f"), dev is None, grad.holds, witness)
