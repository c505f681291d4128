import pytest

from src.config import RunConfig, load_config
from src.errors import InputError


def test_defaults(monkeypatch):
    for name in ("QC_TRUNC", "QC_TOL", "QC_GRID", "QC_RESTARTS", "QC_SEED"):
        monkeypatch.delenv(name, raising=False)
    config = load_config()
    assert config == RunConfig()
    assert config.truncation == 64
    assert config.format == "json"


def test_precedence(monkeypatch, write_json):
    path = write_json("run.json", {"truncation": 16, "seed": 4, "tol": 1e-6})
    monkeypatch.setenv("QC_SEED", "9")
    monkeypatch.delenv("QC_TRUNC", raising=False)
    config = load_config(path, {"tol": 1e-10, "restarts": None})
    assert config.truncation == 16
    assert config.seed == 9
    assert config.tol == 1e-10
    assert config.restarts == 5


@pytest.mark.parametrize("values", [{"truncation": 0}, {"tol": 2.0}, {"seed": -1}, {"format": "xml"}])
def test_invalid_values(values):
    with pytest.raises(InputError):
        load_config(overrides=values)


def test_unreadable_file(tmp_path):
    with pytest.raises(InputError):
        load_config(str(tmp_path / "missing.json"))
