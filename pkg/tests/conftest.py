import json

import numpy as np
import pytest

from src.series.catalog import b1_map
from src.series.laurent_series import save_series


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def b1_series_file(tmp_path):
    """z + 0.5/z, long enough for N = 32."""
    path = tmp_path / "b1.json"
    save_series(b1_map(0.5, 65), str(path))
    return str(path)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write
