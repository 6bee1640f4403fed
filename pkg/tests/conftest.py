from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from quadsolve.canonical import Nor

# x1' = x1 x2, x2' = (3/4)(x1^2 + x2^2): the cubic-sheet worked example
EQS = Nor(Fraction(3, 4), Fraction(0))

_CRITERIA: dict[int, tuple[bool, str]] = {}


def rel_dev(a, b) -> float:
    """Max over samples of |a - b| / max|b|, per sample."""
    worst = 0.0
    for u, v in zip(a, b):
        scale = max(abs(complex(x)) for x in v)
        worst = max(worst, max(abs(complex(p) - complex(q)) for p, q in zip(u, v)) / scale)
    return worst


def random_ics(seed: int, n: int, scale: float = 1.0) -> list[tuple[complex, complex]]:
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))) * scale
    return [(complex(a), complex(b)) for a, b in z]


class Criterion:
    def __init__(self, number: int):
        self.number = number

    def record(self, ok: bool, detail: str) -> None:
        _CRITERIA[self.number] = (bool(ok), detail)
        assert ok, f"criterion {self.number}: {detail}"


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    num = marker.args[0]
    c = Criterion(num)
    yield c
    if num not in _CRITERIA:
        _CRITERIA[num] = (False, "did not complete")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        ok, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
