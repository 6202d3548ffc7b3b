import itertools
from fractions import Fraction

import pytest

from antipode_bridge.cover import random_ratio_spec

SUITE_SEEDS = range(50)
SUITE_RESOLUTIONS = (4, 6, 12)


def suite_specs():
    """The 50 seeded ratio covers of the acceptance suite, dimensions cycling 1, 2, 3."""
    return [random_ratio_spec(seed, 1 + seed % 3) for seed in SUITE_SEEDS]


def in_ratio_set(x, target, i):
    # cross-multiplied form of x_i / p_i >= x_j / p_j; no division
    return all(x[i - 1] * pj >= xj * target[i - 1] for xj, pj in zip(x, target))


def brute_top_grid(d, n):
    """All k >= 0 with sum n via itertools.product; independent of grid_enumerate."""
    return sorted(k for k in itertools.product(range(n + 1), repeat=d + 1) if sum(k) == n)


def brute_sphere_grid(d, n):
    return sorted(k for k in itertools.product(range(-n, n + 1), repeat=d + 1) if sum(map(abs, k)) == n)


def as_frac(k, n):
    return tuple(Fraction(v, n) for v in k)


@pytest.fixture
def acceptance(request):
    lines = request.config.stash.setdefault(_LINES, [])

    def record(number, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        lines.append(f"[criterion {number}] {status} {name}" + (f" -- {detail}" if detail else ""))
        assert ok, f"criterion {number} ({name}) failed: {detail}"

    return record


_LINES = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
