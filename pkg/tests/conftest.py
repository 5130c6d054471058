import numpy as np
import pytest

from fastrsqrt import backend
from fastrsqrt.bits import MIN_NORMAL_BITS, MAX_NORMAL_BITS


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(params=backend.available())
def each_backend(request):
    prev = backend.name()
    backend.use(request.param)
    yield request.param
    backend.use(prev)


def random_normal_bits(rng, n, lo=MIN_NORMAL_BITS, hi=MAX_NORMAL_BITS):
    return rng.integers(lo, hi + 1, size=n, dtype=np.uint32)


# criterion -> list of (check name, passed, detail); filled by test_acceptance
ACCEPTANCE: dict[str, list[tuple[str, bool, str]]] = {}


def record(criterion: str, name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'}  [{criterion}] {name} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        checks = ACCEPTANCE[criterion]
        bad = [c for c in checks if not c[1]]
        line = f"{'FAIL' if bad else 'PASS'}  criterion {criterion}: " \
               f"{len(checks) - len(bad)}/{len(checks)} checks"
        if bad:
            line += "; failing: " + "; ".join(f"{n} {d}" for n, _, d in bad)
        tr.write_line(line)
