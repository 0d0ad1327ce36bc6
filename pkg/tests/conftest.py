import math

import pytest

from hhslow import IntegratorConfig, PhaseState
from hhslow.model import TWO_PI


@pytest.fixture(scope="session")
def canonical_ic() -> PhaseState:
    # h = 0.1 exactly; slow data (v0, w0) = (0.01, 0.02), T0 = 0.0085.
    return PhaseState(x=math.sqrt(3.0 / 5.0) / 2.0, y=0.0, xdot=0.2, ydot=0.1)


@pytest.fixture(scope="session")
def default_cfg() -> IntegratorConfig:
    return IntegratorConfig(method="split8", step_size=TWO_PI / 64)


@pytest.fixture(scope="session")
def loose_cfg() -> IntegratorConfig:
    return IntegratorConfig(method="split8", step_size=TWO_PI / 64, drift_tolerance=1.0)
