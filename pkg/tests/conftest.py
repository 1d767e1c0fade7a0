import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shockstab.flux import FluxModel  # noqa: E402

MODELS = [FluxModel.burgers(), FluxModel.quartic(1.0, 3.0), FluxModel.cosh()]


@pytest.fixture(params=MODELS, ids=lambda m: m.kind)
def model(request):
    return request.param


@pytest.fixture
def burgers():
    return FluxModel.burgers()
