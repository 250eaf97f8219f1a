import os

import pytest
from hypothesis import HealthCheck, settings

from sgindex.mesh import validate

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def t4():
    # outer triangle plus one interior vertex; faces listed CCW
    pts = [(0, 0), (10, 0), (5, 9), (5, 3)]
    tris = [(0, 1, 3), (1, 2, 3), (2, 0, 3)]
    return validate(pts, tris, (0, 1, 2))


# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
