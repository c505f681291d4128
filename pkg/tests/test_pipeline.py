import json
import os

import numpy as np

from src.config import RunConfig
from src.processors.experiment_pipeline import PREFIX, ExperimentPipeline, random_rational, smooth_field


def test_helpers_respect_bounds(rng):
    for _ in range(5):
        mu = smooth_field(rng, 0.4)
        assert mu.sup_norm == 0.4
        z = np.exp(2j * np.pi * rng.random(50)) * np.sqrt(rng.random(50))
        assert np.all(np.abs(mu(z)) <= 0.4 + 1e-12)
        random_rational(rng).check_integrable()


def test_save_results(tmp_path):
    pipeline = ExperimentPipeline(RunConfig(), output_dir=str(tmp_path / "reports"), quick=True)
    path = pipeline.save_results("kn", {"passed": True})
    name = os.path.basename(path)
    assert name.startswith(f"{PREFIX}kn_") and name.endswith(".json")
    data = json.loads(open(path, encoding="utf-8").read())
    assert data["experiment"] == "kn"
    assert pipeline.files["kn"] == path


def test_closed_form_experiments_pass(tmp_path):
    pipeline = ExperimentPipeline(RunConfig(restarts=2), output_dir=str(tmp_path), quick=True)
    assert pipeline.run_kn_brackets()["passed"]
    assert pipeline.run_coefficient_equality()["passed"]
    assert pipeline.run_grunsky_diagonal()["passed"]
