import pytest
from hypothesis import HealthCheck, settings

from mured import synth

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def parity3():
    return synth.parity(3)


@pytest.fixture
def parity4():
    return synth.parity(4)


@pytest.fixture
def copy_pair():
    return synth.copy_chain(2)


@pytest.fixture
def copy_triple():
    return synth.copy_chain(3)


@pytest.fixture
def coins2():
    return synth.independent_uniform([2, 2])


@pytest.fixture
def coins3():
    return synth.independent_uniform([2, 2, 2])


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
