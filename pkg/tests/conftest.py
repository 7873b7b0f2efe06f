import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lindbladium import ChainSpec, DrivingConfig

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORTHO_AMPS = dict(amp_l_plus=1.0, amp_l_minus=0.5, amp_v_plus=0.3, amp_v_minus=0.2,
                  amp_w_plus=0.7, amp_w_minus=0.4)


def matching_chain(case, n: int) -> ChainSpec:
    """Graded chain of the Hamiltonian family a driving case is built for."""
    if case in ("X_XY_THETA", "XY_ORTHO"):
        return ChainSpec.graded_xxz(n)
    return ChainSpec.graded_xxx(n)


def driving(case, theta: float = math.pi / 4, f: float = 0.5, **kw) -> DrivingConfig:
    if case.endswith("_THETA"):
        return DrivingConfig(case, gamma=1.0, f=f, theta=theta, **kw)
    return DrivingConfig(case, **{**ORTHO_AMPS, **kw})


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, (ok, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
