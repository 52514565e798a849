import pytest

from slspectra import Potential, integrate_fundamental


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    # pay the JIT compile cost once, before any timed test runs
    integrate_fundamental(Potential([0.0]), 1.0, steps=16)
