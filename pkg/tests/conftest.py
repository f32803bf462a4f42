import json
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from loguru import logger

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from models.field import SpectralField  # noqa: E402
from models.system import build_system  # noqa: E402
from verify import VerifyContext  # noqa: E402

# the fixtures used with @given are stateless factories, so sharing them across examples is safe
settings.register_profile("kgscope", suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("kgscope")


@pytest.fixture(autouse=True)
def quiet_logs():
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
    yield


@pytest.fixture
def single():
    return build_system({"d": 1, "b": [1.0], "c": [1.0]})


@pytest.fixture
def sphere():
    return build_system({"d": 3, "b": [2.0, 1.0, 1.0], "c": [1.0, 1.0, 1.0]})


@pytest.fixture
def equal():
    return build_system({"d": 3, "b": [1.0, 1.0, 1.0], "c": [1.0, 1.0, 1.0]})


@pytest.fixture
def mixed():
    return build_system({"d": 3, "b": [1.0, 1.0, 1.0], "c": [1.0, 1.0, 2.0]})


@pytest.fixture
def semilinear():
    return build_system({"d": 1, "b": [1.0], "c": [1.0], "Qprime": [[1, 1, 1, 0, 0, 1.0]]})


@pytest.fixture
def context(single):
    return VerifyContext(single)


@pytest.fixture
def gaussian():
    def make(n=16, box_length=16.0, width=1.0, centre=(0.0, 0.0, 0.0)):
        f = SpectralField.zeros(n, box_length)
        x, y, z = f.coords()
        r2 = (x - centre[0]) ** 2 + (y - centre[1]) ** 2 + (z - centre[2]) ** 2
        return SpectralField.from_physical(np.exp(-r2 / (2 * width ** 2)), box_length)
    return make


@pytest.fixture
def write_config(tmp_path):
    def write(document, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path
    return write
