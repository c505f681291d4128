from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel
from typing import Any, Callable, Dict, List, Optional
import json
import logging
import os

from src.errors import NumericalError, QCError
from src.extremal.coefficient_bounds import coeff_bound, kn_bracket
from src.grunsky.grunsky_matrix import grunsky_norm_of
from src.metrics.metric_bounds import (
    geodesic_coincidence_experiment,
    radial_grid,
    sweep_family,
    sweep_summary,
    upper_is_exact,
)
from src.series.laurent_series import LaurentSeries, require_sigma

app = FastAPI(
    title="Quasiconformal Toolkit API",
    description="Grunsky norms, coefficient bounds and saved experiment reports",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

logger = logging.getLogger(__name__)

REPORT_DIR = os.getenv("QC_REPORT_DIR", "data/processed")


# --- Data Models ---
class GrunskyRequest(BaseModel):
    series: Dict[str, Any]
    N: Optional[int] = None
    restarts: int = 3
    seed: int = 0

class GrunskyResponse(BaseModel):
    norm: float
    norm_half: float
    N: int
    converged: bool
    method: str

class CoeffBoundRow(BaseModel):
    n: int
    k: float
    bound: float
    admissible: bool

class KnBracketResponse(BaseModel):
    n: int
    lower: float
    upper: float
    root: float
    crossing_ok: bool
    competitor_loses: bool

class MetricSweepResponse(BaseModel):
    summary: Dict[str, Any]
    samples: List[Dict[str, float]]


# --- Helper Functions ---
def compute(func: Callable, *args, **kwargs):
    """Library errors become 422 (bad input or precondition) or 500 (numerical failure)."""
    try:
        return func(*args, **kwargs)
    except NumericalError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
    except QCError as exc:
        raise HTTPException(status_code=422, detail=str(exc))

def load_latest_data(prefix: str, directory: Optional[str] = None):
    """Newest ``<prefix>*.json`` report by timestamped name; None if absent or unreadable."""
    directory = directory or REPORT_DIR
    if not os.path.isdir(directory):
        return None
    reports = sorted(f for f in os.listdir(directory) if f.startswith(prefix) and f.endswith(".json"))
    if not reports:
        return None
    path = os.path.join(directory, reports[-1])
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (IOError, json.JSONDecodeError) as exc:
        logger.warning("skipping unreadable report %s: %s", path, exc)
        return None

def _grunsky(request: GrunskyRequest) -> dict:
    f = require_sigma(LaurentSeries.from_dict(request.series))
    N = request.N or (1 - f.lo) // 2
    return grunsky_norm_of(f, N, restarts=request.restarts, seed=request.seed).to_dict()

def _sweep(family: str, params: Dict[str, complex], r_max: float, points: int, N: int) -> dict:
    f, known_k = sweep_family(family, params, order=2 * N + 1)
    samples = geodesic_coincidence_experiment(f, known_k, radial_grid(r_max, points), N=N)
    summary = sweep_summary(samples, upper_exact=upper_is_exact(family))
    return {"summary": summary, "samples": [s.to_dict() for s in samples]}


# API Endpoints
@app.get("/")
def root():
    return {
        "message": "Quasiconformal Toolkit API",
        "available_endpoints": [
            "/grunsky",
            "/coeff-bounds",
            "/kn-bracket/{n}",
            "/metric-sweep",
            "/reports/latest",
            "/docs"
        ]
    }

@app.post("/grunsky", response_model=GrunskyResponse)
def post_grunsky(request: GrunskyRequest):
    return compute(_grunsky, request)

@app.get("/coeff-bounds", response_model=List[CoeffBoundRow])
def get_coeff_bounds(k: float = Query(..., description="dilatation bound in [0, 1)"),
                     n_min: int = 2, n_max: int = 8):
    if n_max < n_min:
        raise HTTPException(status_code=422, detail="n_max must be at least n_min")
    return [compute(coeff_bound, n, k).to_dict() for n in range(n_min, n_max + 1)]

@app.get("/kn-bracket/{n}", response_model=KnBracketResponse)
def get_kn_bracket(n: int):
    return compute(kn_bracket, n).to_dict()

@app.get("/metric-sweep", response_model=MetricSweepResponse)
def get_metric_sweep(family: str = "b1_map", b: float = 0.6, t: float = 0.5,
                     r_max: float = 0.9, points: int = Query(10, ge=1, le=200), N: int = Query(16, ge=1, le=64)):
    params = {"b": complex(b), "t": complex(t)}
    return compute(_sweep, family, params, r_max, points, N)

@app.get("/reports/latest")
def get_latest_report(experiment: str = Query("pipeline", description="experiment name, e.g. kkt or sharp_bound")):
    data = load_latest_data(prefix=f"qc_{experiment}_")
    if not data:
        raise HTTPException(status_code=404, detail=f"No saved report for experiment: {experiment}")
    return data


#  Main execution
if __name__ == "__main__":
    import uvicorn
    print("Starting Quasiconformal Toolkit API...")
    print("Access API documentation at: http://localhost:8000/docs")
    uvicorn.run(app, host="0.0.0.0", port=8000)
