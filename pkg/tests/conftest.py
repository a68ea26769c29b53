import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sumset_lab import _kernels  # noqa: E402


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    """Run the test once per available kernel backend."""
    prev = _kernels.backend()
    _kernels.use_backend(request.param)
    yield request.param
    _kernels.use_backend(prev)
