import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from splitquat.algebra import Biquaternion

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def biquaternions(draw, scale=1.0):
    parts = [complex(draw(finite), draw(finite)) * scale for _ in range(4)]
    return Biquaternion(*parts)


@st.composite
def hr_points(draw):
    return Biquaternion.from_coords([draw(finite) for _ in range(4)], "HR")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def close(a, b, atol=1e-12):
    a = a.coeffs if isinstance(a, Biquaternion) else np.asarray(a)
    b = b.coeffs if isinstance(b, Biquaternion) else np.asarray(b)
    return np.allclose(a, b, rtol=0, atol=atol)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
