from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

from mopiep import BandedHessenberg, DiscreteSystem, check_normality
from mopiep.rng import XorShift64Star

FIXTURES = Path(__file__).parent / "fixtures"


def s3(kind="rational"):
    return DiscreteSystem.from_values([0, 1, 2], [1, 1, 1], [2, 1, 1], kind)


def h3():
    return BandedHessenberg(np.array([F(1), F(1)], dtype=object),
                            np.array([F(1), F(2, 3), F(4, 3)], dtype=object),
                            np.array([F(2, 3), F(2, 9)], dtype=object),
                            np.array([F(2, 9)], dtype=object), monic=True)


def step_line(N):
    """(n1, n2) for |n| = 1..N along the step-line."""
    return [((m + 1) // 2, m // 2) for m in range(1, N + 1)]


def random_rational_systems(count, seed=2024, max_n=10, node_range=10, max_weight=9):
    """Seeded random rational systems with integer nodes and small integer weights.

    Only systems whose step-line prefixes are all normal are kept.
    """
    g = XorShift64Star(seed)

    def ri(a, b):
        return a + int(g.uniform() * (b - a + 1))

    out = []
    while len(out) < count:
        N = ri(3, max_n)
        nodes = set()
        while len(nodes) < N:
            nodes.add(ri(-node_range, node_range))
        z = sorted(nodes)
        s = DiscreteSystem.from_values(z, [ri(1, max_weight) for _ in z],
                                       [ri(1, max_weight) for _ in z], "rational")
        if all(check_normality(s, *ix) for ix in step_line(N)):
            out.append(s)
    return out


@pytest.fixture
def S3():
    return s3()


@pytest.fixture
def H3():
    return h3()


# acceptance verdicts, printed once at the end of the run
VERDICTS: list[str] = []


def record(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS):
            terminalreporter.write_line(line)
