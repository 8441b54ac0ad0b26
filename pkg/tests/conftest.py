import numpy as np
import pytest

from kairon.expr import parse
from kairon.field import InitialData, KaironField, StraightLine, TimeAxis

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bump_field(m, expression="bump(t)*(1+0.3*w1)", worldline=None, support=(-1.0, 1.0)):
    data = InitialData.from_expression(parse(expression, m), support)
    return KaironField(worldline or TimeAxis(m), data)


def field_pair(m):
    """Two bump solutions launched from different worldlines (no shared symmetry)."""
    f1 = bump_field(m)
    v = [0.2, -0.3, 0.1][:m]
    last = f"w{m}"
    f2 = bump_field(m, f"bump(t)*exp(0.5*{last})*cos(t)", StraightLine(v))
    return f1, f2
