import warnings

import numpy as np
import pytest
from hypothesis import settings

from fresnel_ris import default_scenario
from fresnel_ris.config import PairGeometry
from fresnel_ris.field import Link

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


@pytest.fixture(scope="session")
def link(scenario):
    return Link(scenario)


@pytest.fixture(scope="session")
def geom(scenario):
    return PairGeometry(scenario.panels[0], scenario.tx_antennas[0], scenario.rx, scenario.lam)


@pytest.fixture(scope="session")
def frame(geom):
    return geom.frame


@pytest.fixture
def record():
    """Record an acceptance verdict; printed in the terminal summary."""
    def _record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    def order(label):
        label = str(label)
        digits = "".join(ch for ch in label if ch.isdigit())
        return int(digits), label

    for n in sorted(ACCEPTANCE, key=order):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n!s:>3}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(autouse=True)
def _quiet_far_field():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="Tx or Rx within 10x")
        yield
