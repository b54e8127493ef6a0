import json

import pytest
from hypothesis import given

from fairmatroid.audits import (
    DeviationWitness,
    MisreportSpace,
    check_gradual,
    check_index_oblivious,
    evaluate_universe,
    exhaustive_deviation_search,
    find_coalition_deviation,
    find_profitable_deviation,
    fuzz_coalitions,
    recheck_report,
    run_impossibility_executor,
    mechanism_family,
    truthful_gradual_row,
    universe_gradual,
)
from fairmatroid.errors import InputError
from fairmatroid.instances import Allocation, Instance, values
from fairmatroid.matroid import Permutation, Uniform, permute, rank_table
from fairmatroid.mechanisms import Mechanism, get_mechanism, pe_mechanism
from fairmatroid.presets import fixture_instances, preset
from tests.strategies import instances

PE = get_mechanism("pe")


def alloc(*bundles):
    return Allocation(tuple(frozenset(b) for b in bundles))


def test_pe_has_no_unilateral_deviation_on_fixtures():
    space = MisreportSpace(trials=60)
    for inst in fixture_instances(40, seed=3):
        for i in range(inst.n):
            assert find_profitable_deviation(PE, inst, i, space) is None


def test_highest_report_is_manipulable():
    f = get_mechanism("highest-report")
    # agent 0 reports the larger total, so agent 1 gains by claiming every good
    inst = Instance(3, (Uniform(3, {0, 1, 2}, 2), Uniform(3, {0, 1}, 1)))
    wit = find_profitable_deviation(f, inst, 1, MisreportSpace())
    assert wit is not None and wit.coalition == (1,)
    assert wit.gains[0] > 0 and wit.verify(f)
    json.dumps(wit.to_json())


def test_zero_budget_finds_nothing():
    f = get_mechanism("highest-report")
    inst = Instance(3, (Uniform(3, {0, 1, 2}, 3), Uniform(3, {0, 1}, 2)))
    assert find_profitable_deviation(f, inst, 1, MisreportSpace(trials=0)) is None


def test_empty_coalition_is_vacuous():
    assert find_coalition_deviation(get_mechanism("highest-report"), preset("thm4"), 0, MisreportSpace()) is None
    with pytest.raises(InputError):
        find_coalition_deviation(PE, preset("thm4"), 3, MisreportSpace())


def test_coalition_search_pe():
    space = MisreportSpace(trials=15)
    for inst in fixture_instances(25, seed=4):
        if inst.n >= 2:
            assert find_coalition_deviation(PE, inst, min(3, inst.n), space) is None


def test_witness_rejects_outsider_changes():
    inst = preset("thm4")
    other = inst.replace(0, Uniform(6, {0}, 1))
    with pytest.raises(InputError):
        DeviationWitness((1,), inst, other, (1,))


def test_fuzz_regression_baseline():
    assert fuzz_coalitions(PE, trials=300, seed=1) is None
    # ties broken the other way is still a fixed priority order, so still truthful
    assert fuzz_coalitions(get_mechanism("pe-reversed"), trials=300, seed=1) is None
    needy = get_mechanism("pe-needy")
    wit = fuzz_coalitions(needy, trials=1000, seed=0)
    assert wit is not None and wit.verify(needy)


def test_fuzz_is_seed_deterministic():
    f = get_mechanism("highest-report")
    a, b = fuzz_coalitions(f, trials=200, seed=9), fuzz_coalitions(f, trials=200, seed=9)
    assert a.to_json() == b.to_json()


def test_exhaustive_small_universes():
    for m in range(4):
        assert exhaustive_deviation_search(PE, m) is None
    wit = exhaustive_deviation_search(get_mechanism("cleanup:highest-report"), 2)
    assert wit is not None and wit.verify(get_mechanism("cleanup:highest-report"))


def test_gradual_examples():
    assert check_gradual(PE, preset("thm4")).holds

    def fragile(inst):
        # agent 0 keeps her PE bundle only while every good matters to her
        a = pe_mechanism(inst)
        if all(inst.valuations[0].rank_mask(1 << g) for g in range(inst.m)):
            return a
        return Allocation((frozenset(),) + a.bundles[1:])

    inst = Instance(4, (Uniform(4, range(4), 4),))
    v = check_gradual(fragile, inst)
    assert not v.holds and v.witness["condition"] == "C1"


def test_gradual_on_wasteful_mechanism_uses_cleanup():
    v = check_gradual(get_mechanism("highest-report"), preset("thm4"))
    assert v.notes and "cleanup" in v.notes[0]


def test_index_oblivious_examples():
    assert check_index_oblivious(PE, preset("thm4"), trials=20).holds
    inst = Instance(3, (Uniform(3, {0, 1}, 1), Uniform(3, {0, 1, 2}, 2)))
    v = check_index_oblivious(get_mechanism("first-good"), inst, trials=5)
    assert not v.holds
    assert v.witness["permutation"] != [0, 1, 2]


@given(instances(max_m=5, max_n=3))
def test_identity_permutation_never_fails(inst):
    ident = Permutation.identity(inst.m)
    same = Instance(inst.m, tuple(permute(v, ident) for v in inst.valuations))
    for name in ("first-good", "highest-report", "dictator", "empty", "pe"):
        f = get_mechanism(name)
        assert values(inst, f(inst)) == values(same, f(same))


@pytest.mark.parametrize("name", ["pe", "dictator:0,1", "dictator:1,0", "empty", "oracle"])
def test_executor_reports_mms_and_rechecks(name):
    f = get_mechanism(name)
    report = run_impossibility_executor(f)
    assert report.violated == "MMS"
    assert recheck_report(report, f)
    doc = json.loads(json.dumps(report.to_json()))
    assert doc["violated"] == "MMS" and doc["steps"]


def test_executor_pe_stops_at_first_step():
    report = run_impossibility_executor(PE)
    assert len(report.steps) == 1
    assert report.witness["agent"] == 1 and report.witness["value"] < report.witness["share"]


def _scripted():
    """Follows the proof's script: MMS everywhere it is asked, then manipulable."""
    base = alloc({0}, {1, 2, 3})
    star = rank_table(Uniform(6, {0, 1, 2, 3}, 4))

    def f(inst):
        if inst.m == 6 and inst.n == 2 and rank_table(inst.valuations[0]) == star:
            return alloc({0, 1}, {2, 3})
        return base

    return Mechanism("scripted", f)


def test_executor_reaches_truthfulness_breach():
    f = _scripted()
    report = run_impossibility_executor(f)
    assert report.violated == "truthful"
    assert report.witness["gains"] == [1]
    assert recheck_report(report, f)


def test_mechanism_family_consistent():
    rows = [truthful_gradual_row(f, m=2) for f in mechanism_family()]
    assert all(r.consistent for r in rows)
    assert any(r.truthful for r in rows) and any(not r.truthful for r in rows)


def test_universe_gradual_pe():
    u = evaluate_universe(PE, 2)
    assert not u.wasteful
    assert universe_gradual(PE, 2, universe=u).holds
