import random

import pytest

from logsteiner import GF, QQ, Mat, PointConfig, SteinerPresentation
from logsteiner.samples import conic_config, general_config

F31 = GF(31)

FRAME = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]


def frame(field=F31):
    return PointConfig.from_coords(field, FRAME)


def veronese(ts, field=QQ):
    return PointConfig.from_coords(field, [(t * t, t, 1) for t in ts])


def tangent(field=F31):
    I = Mat.identity(field, 3)
    return SteinerPresentation(field, 3, 1, 3, tuple(Mat.from_columns(field, [I.col(i)]) for i in range(3)))


@pytest.fixture(scope="session")
def generic10():
    return general_config(F31, 10, 1, random.Random(7), t=0)


@pytest.fixture(scope="session")
def generic6():
    return general_config(F31, 6, 0, random.Random(11), t=0)


@pytest.fixture(scope="session")
def conic5_fp():
    return conic_config(F31, 5, random.Random(3))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
