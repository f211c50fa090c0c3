import math

import numpy as np
import pytest

from nullity_lab.geometry import AmbientSpace, FramePoint, canonical_phi
from nullity_lab.models import Family, ModelSpec

_ACCEPTANCE_LINES: list[str] = []


class AcceptanceLog:
    def record(self, name: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_frame(rng, n=None, c=None) -> FramePoint:
    n = n or int(rng.integers(2, 5))
    if c is None:
        c = float(rng.uniform(0.5, 5.0)) * (1 if rng.random() < 0.5 else -1)
    m = 2 * n - 1
    A = rng.normal(size=(m, m))
    return FramePoint(AmbientSpace(c, n), canonical_phi(n), (A + A.T) / 2)


def type_a_specs(n: int, radii=(0.3, 0.8, 1.3)):
    """Every type (A) catalog entry available in complex dimension n."""
    cp, ch = AmbientSpace(4.0, n), AmbientSpace(-4.0, n)
    specs = [ModelSpec(ch, Family.CH_Horosphere)]
    for r in radii:
        specs += [
            ModelSpec(cp, Family.CP_GeodesicSphere, r=r),
            ModelSpec(ch, Family.CH_GeodesicSphere, r=r),
            ModelSpec(ch, Family.CH_TubeOverCHn1, r=r),
        ]
        for k in range(1, n - 1):
            specs += [
                ModelSpec(cp, Family.CP_TubeOverCPk, r=r, k=k),
                ModelSpec(ch, Family.CH_TubeOverCHk, r=r, k=k),
            ]
    return specs


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def cot(x):
    return math.cos(x) / math.sin(x)


def coth(x):
    return 1.0 / math.tanh(x)
