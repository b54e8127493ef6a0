import random

import pytest
from hypothesis import HealthCheck, settings

from fairmatroid.instances import Allocation
from fairmatroid.matroid import max_independent_mask
from fairmatroid.presets import fixture_instances

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def fixtures():
    """The shared 500-instance fixture set (m <= 6, n <= 3, mixed kinds)."""
    return fixture_instances(500, seed=0)


def random_non_wasteful(rng: random.Random, inst):
    masks = [0] * inst.n
    for g in range(inst.m):
        slot = rng.randrange(inst.n + 1)
        if slot < inst.n:
            masks[slot] |= 1 << g
    return Allocation.from_masks([max_independent_mask(v, x) for v, x in zip(inst.valuations, masks)])


_CRITERIA: list[tuple[int, bool, str]] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    """Remember one acceptance line; printed in the terminal summary."""
    _CRITERIA.append((criterion, ok, detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_CRITERIA, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
