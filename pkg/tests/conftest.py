import os

import pytest


@pytest.fixture(scope="session", autouse=True)
def _mpl_cache(tmp_path_factory):
    # keep matplotlib's font cache out of the home directory
    os.environ.setdefault("MPLCONFIGDIR", str(tmp_path_factory.mktemp("mpl")))
    yield


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numba kernels once so timed tests measure runtime, not JIT."""
    from crisisnet import _kernels

    _kernels.warm_up()
    yield
