import pytest
from hypothesis import HealthCheck, settings

from tckit.ffpoly import make_context
from tckit.groebner import CACHE

settings.register_profile(
    "tckit", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("tckit")


def cone(p):
    return make_context(p, "x,y,z", relations=["x^3+y^3+z^3"])


@pytest.fixture
def cone2():
    return cone(2)


@pytest.fixture
def cone7():
    return cone(7)


@pytest.fixture(autouse=True)
def _memory_only_cache():
    # keep tests independent of TCKIT_CACHE in the environment
    old = CACHE.directory
    CACHE.set_directory(None)
    yield
    CACHE.set_directory(old)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for res in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(res.line())
