import math

import numpy as np
import pytest
from hypothesis import settings

from geonum.field import make_field

settings.register_profile("geonum", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("geonum")

QQ = make_field(None)
QI = make_field(-1)
Q5 = make_field(5)
ALL_FIELDS = (QQ, QI, Q5, make_field(-3), make_field(2), make_field(-5))


@pytest.fixture
def hexagonal():
    from geonum.lattice import from_basis

    B = np.array([[1.0, 0.0], [0.5, math.sqrt(3) / 2]]) * (2 / math.sqrt(3)) ** 0.5
    return from_basis(QQ, 2, B)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
