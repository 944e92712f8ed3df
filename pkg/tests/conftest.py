import pytest

from rssiloc import kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile (or load cached) jit kernels up front so timed tests measure
    # algorithm runtime, not compilation
    kernels.warmup()
