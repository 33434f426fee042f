from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from fedex_menus.instance import FedexInstance

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: dict = {}


@st.composite
def instances(draw, max_n=3, max_v=8):
    """Small exact instances built from integer weights."""
    n = draw(st.integers(1, max_n))
    v_max = draw(st.integers(1, max_v))
    q = [Fraction(draw(st.integers(1, 5))) for _ in range(n)]
    pmf = []
    for _ in range(n):
        w = [Fraction(draw(st.integers(0, 4))) for _ in range(v_max + 1)]
        if not any(w):
            w[-1] = Fraction(1)
        s = sum(w)
        pmf.append([x / s for x in w])
    return FedexInstance(n=n, v_max=v_max, q=[x / sum(q) for x in q], pmf=pmf)


@st.composite
def concave_points(draw, max_len=12):
    """Points of a random concave function on an integer grid starting at (0, 0)."""
    k = draw(st.integers(1, max_len))
    steps = sorted(
        (Fraction(draw(st.integers(-8, 8)), draw(st.integers(1, 4))) for _ in range(k)), reverse=True
    )
    widths = [draw(st.integers(1, 6)) for _ in range(k)]
    pts = [(Fraction(0), Fraction(0))]
    for s, w in zip(steps, widths):
        x, y = pts[-1]
        pts.append((x + w, y + s * w))
    return pts


@pytest.fixture
def record_criterion():
    def _rec(num: int, ok: bool, detail: str):
        ACCEPTANCE_LINES[num] = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"

    return _rec


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
