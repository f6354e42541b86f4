import random

import pytest
from hypothesis import HealthCheck, settings

from thetaroute.builder import build
from thetaroute.geom import FAMILIES, is_positive_sector, sector_of
from thetaroute.instances import gen_random

settings.register_profile(
    "repo", max_examples=80, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def report_criterion(request):
    """Record one PASS/FAIL line; also printed immediately."""

    def record(name: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        request.config.stash[_ACCEPTANCE].append(line)
        print(line)

    return record


class Suite:
    """Random instances with all three graphs built once."""

    def __init__(self, specs):
        self.items = []
        for n, frac, seed in specs:
            inst = gen_random(n, frac, seed)
            self.items.append((inst, {f: build(inst, f) for f in FAMILIES}))

    def pairs(self, kind: str, per_instance: int, seed: int = 0):
        """Yield (inst, graph, s, t) with t in a positive (or negative) cone of s for the graph's family."""
        for idx, (inst, graphs) in enumerate(self.items):
            rng = random.Random(1000 * seed + idx)
            got = tries = 0
            while got < per_instance and tries < 100 * per_instance:
                tries += 1
                s, t = rng.sample(range(inst.n), 2)
                if not inst.sees(s, t):
                    continue
                k = sector_of(inst.vertices[t] - inst.vertices[s])
                plus = is_positive_sector(k, "half_plus")
                family = ("half_plus" if plus else "half_minus") if kind == "positive" else \
                         ("half_minus" if plus else "half_plus")
                got += 1
                yield inst, graphs[family], s, t


@pytest.fixture(scope="session")
def random_suite():
    """Twenty instances, n up to 200, constraint fraction up to 0.2."""
    sizes = (30, 60, 100, 200)
    fractions = ("0", "0.1", "0.2")
    return Suite([(sizes[i % 4], fractions[i % 3], i) for i in range(20)])


@pytest.fixture(scope="session")
def small_suite():
    """Instances small enough for all-pairs oracles."""
    return Suite([(n, frac, 500 + i) for i, (n, frac) in
                  enumerate([(12, "0"), (20, "0.2"), (30, "0.1"), (40, "0.3"), (60, "0.2"), (60, "0")])])
