import json
import logging
import os
from datetime import datetime
from typing import Dict, Optional

import numpy as np
from tqdm import tqdm

from src.config import RunConfig, load_config
from src.extremal.coefficient_bounds import coefficient_competitors, fixed_point_coeff_bound, kn_bracket
from src.extremal.l1_span import l1_distance_to_span, rho_basis
from src.extremal.sharp_bound import sharp_bound_experiment
from src.grunsky.grunsky_matrix import grunsky_coefficients, grunsky_norm, h_x_value
from src.metrics.hyperbolic import blaschke_factor, curvature_check, hyperbolic_density, pullback
from src.metrics.metric_bounds import geodesic_coincidence_experiment, radial_grid, sweep_family, sweep_summary
from src.quaddiff.beltrami_field import BeltramiField
from src.quaddiff.quad_diff import QuadDiff, l1_norm
from src.quaddiff.quadrature import DISK
from src.series.catalog import b1_map, sample_univalent_maps
from src.series.laurent_series import koebe_qc
from src.variation.beltrami_solver import BeltramiSolver
from src.variation.first_order import first_order_accuracy, norm_derivative_check
from src.variation.functional_spec import FunctionalSpec

logger = logging.getLogger(__name__)

PREFIX = "qc_"
GRUNSKY_N = 32


def _pair(v: complex):
    v = complex(v)
    return [v.real, v.imag]


def _random_complex(rng, size=None):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def smooth_field(rng, sup_norm: float = 0.5) -> BeltramiField:
    """mu = c0 + c1 z + c2 conj(z) on the disk, scaled to the given sup norm bound."""
    c = _random_complex(rng, 3)
    c *= sup_norm / np.sum(np.abs(c))
    return BeltramiField.from_function(lambda z: c[0] + c[1] * z + c[2] * np.conj(z), sup_norm, DISK)


def random_rational(rng, degree: int = 2) -> QuadDiff:
    """Polynomial plus a simple pole outside the closed disk."""
    a = 1.5 * np.exp(2j * np.pi * rng.random())
    return QuadDiff.polynomial(_random_complex(rng, degree + 1)) + QuadDiff.pole(complex(_random_complex(rng)), a)


class ExperimentPipeline:
    """Runs the acceptance experiments and saves one timestamped report per experiment."""

    def __init__(self, config: Optional[RunConfig] = None, output_dir: str = "data/processed", quick: bool = False):
        self.config = config or load_config()
        self.output_dir = output_dir
        self.quick = quick
        self.stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.progress = logging.getLogger().isEnabledFor(logging.INFO)
        self.files: Dict[str, str] = {}

    def save_results(self, name: str, data: dict) -> str:
        os.makedirs(self.output_dir, exist_ok=True)
        output_file = os.path.join(self.output_dir, f"{PREFIX}{name}_{self.stamp}.json")
        data = {**data, "experiment": name, "generated_at": datetime.now().isoformat()}
        with open(output_file, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=True)
        self.files[name] = output_file
        print(f"Saved {name}: {output_file}")
        return output_file

    def _rng(self, offset: int = 0):
        return np.random.default_rng(self.config.seed + offset)

    # --- experiments ---
    def run_grunsky_diagonal(self) -> dict:
        print("\nGrunsky coefficients of z + b/z...")
        rows = []
        for b in (0.3, 0.5, 0.7):
            B = grunsky_coefficients(b1_map(b, 2 * GRUNSKY_N + 1), GRUNSKY_N)
            report = grunsky_norm(B, restarts=self.config.restarts, seed=self.config.seed)
            m = np.arange(1, GRUNSKY_N + 1)
            diagonal = np.array([B.alpha(k, k) for k in m])
            off = B.entries - np.diag(np.diag(B.entries))
            rows.append({
                "b": b,
                "norm": report.value,
                "norm_error": abs(report.value - b),
                "diagonal_error": float(np.max(np.abs(diagonal - b ** m / m))),
                "max_off_diagonal": float(np.max(np.abs(off))),
            })
        return {"N": GRUNSKY_N, "rows": rows, "passed": all(r["norm_error"] < 1e-8 for r in rows)}

    def run_coefficient_equality(self) -> dict:
        print("\nCoefficient equality for the rotated Koebe root transforms...")
        theta = 2 * np.pi * np.arange(8) / 8
        worst = 0.0
        for n in range(3, 9):
            for t in 0.1 * np.exp(1j * theta):
                f = koebe_qc(t, n - 1, order=n + 2)
                worst = max(worst, abs(f.coeff(n) - 2 * t / (n - 1)))
        return {"max_residual": worst, "passed": worst < 1e-12}

    def run_kn_brackets(self) -> dict:
        print("\nk_n brackets...")
        rows = [kn_bracket(n).to_dict() for n in range(3, 9)]
        return {"rows": rows, "passed": all(r["crossing_ok"] and r["competitor_loses"] for r in rows)}

    def run_beltrami_exactness(self) -> dict:
        print("\nBeltrami solver on mu = c on the disk...")
        solver = BeltramiSolver(grid_size=128 if self.quick else 512)
        z = 2.0 * np.exp(2j * np.pi * np.arange(64) / 64)
        rows = []
        for c in (0.05, 0.1):
            solution = solver.solve(BeltramiField.constant(c))
            error = float(np.max(np.abs(solution.evaluate(z) - (z + c / z))))
            rows.append({
                "c": c,
                "max_sample_error": error,
                "b1_error": abs(solution.coefficient(1) - c),
                "iterations": solution.iterations,
                "residual": solution.residual,
            })
        passed = all(r["max_sample_error"] < 5e-3 and r["b1_error"] < 1e-3 for r in rows)
        return {"grid_size": solver.grid_size, "rows": rows, "passed": passed}

    def run_first_order_accuracy(self) -> dict:
        print("\nFirst-order accuracy of the variational formula...")
        rng = self._rng(1)
        J = FunctionalSpec.coefficient(1)
        solver = BeltramiSolver(grid_size=128 if self.quick else self.config.grid_size)
        reports = []
        for _ in tqdm(range(2 if self.quick else 5), desc="first order", disable=not self.progress):
            reports.append(first_order_accuracy(J, smooth_field(rng), solver=solver).to_dict())
        slopes = [r["slope"] for r in reports]
        return {"reports": reports, "slopes": slopes, "passed": all(abs(s - 2) <= 0.3 for s in slopes)}

    def run_norm_derivative(self) -> dict:
        print("\nDirectional derivative of the L1 norm...")
        rng = self._rng(2)
        differences = []
        for _ in tqdm(range(5 if self.quick else 20), desc="norm derivative", disable=not self.progress):
            formula, fd = norm_derivative_check(random_rational(rng), random_rational(rng))
            differences.append(abs(formula - fd))
        return {"max_difference": max(differences), "passed": max(differences) < 1e-5}

    def run_kkt(self) -> dict:
        print("\nL1 distance to a rho span with KKT verification...")
        rng = self._rng(3)
        rows = []
        for _ in tqdm(range(3 if self.quick else 10), desc="kkt", disable=not self.progress):
            psi0 = random_rational(rng)
            e = 2.0 * np.exp(2j * np.pi * rng.random())
            sol = l1_distance_to_span(psi0, rho_basis([e], DISK), restarts=self.config.restarts,
                                      seed=self.config.seed, strict=False)
            objectives = np.array(sol.restart_objectives)
            rows.append({
                "e": _pair(e),
                "d": sol.d,
                "accepted": sol.accepted,
                "kkt_residuals": sol.kkt_residuals,
                "restart_spread": float(objectives.max() - objectives.min()) / l1_norm(psi0, 1e-8),
            })
        return {"rows": rows, "passed": all(r["accepted"] for r in rows)}

    def run_metric_coincidence(self) -> dict:
        print("\nGrunsky vs Teichmuller distance along the homotopy disk of z + 0.6/z...")
        N = min(self.config.truncation, GRUNSKY_N)
        f, known_k = sweep_family("b1_map", {"b": 0.6}, 2 * N + 1)
        samples = geodesic_coincidence_experiment(f, known_k, radial_grid(0.9, 10), N=N,
                                                  restarts=self.config.restarts, seed=self.config.seed)
        summary = sweep_summary(samples)
        koebe, koebe_k = sweep_family("koebe_qc", {"t": 0.5}, 2 * N + 1)
        koebe_summary = sweep_summary(geodesic_coincidence_experiment(koebe, koebe_k, radial_grid(0.9, 5), N=N))
        return {"b1_map": summary, "koebe_qc": koebe_summary,
                "samples": [s.to_dict() for s in samples],
                "passed": summary["max_gap"] < 1e-6 and summary["chain_ok"]}

    def run_curvature(self) -> dict:
        print("\nCurvature of hyperbolic and pulled-back densities...")
        rng = self._rng(4)
        densities = {"hyperbolic": hyperbolic_density}
        for j in range(5):
            a = 0.7 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            densities[f"blaschke_{j}"] = pullback(blaschke_factor(a, 2 * np.pi * rng.random()))
        points = 0.8 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
        worst = {name: max(abs(curvature_check(d, t)) for t in points) for name, d in densities.items()}
        return {"max_defect": worst, "passed": max(worst.values()) < 1e-4}

    def run_univalence(self) -> dict:
        print("\nGrunsky norms of the univalent catalog...")
        rng = self._rng(5)
        rows = []
        for name, f in sample_univalent_maps(2 * GRUNSKY_N + 1).items():
            N = min(GRUNSKY_N, (1 - f.lo) // 2)
            B = grunsky_coefficients(f, N)
            report = grunsky_norm(B, restarts=self.config.restarts, seed=self.config.seed)
            violations = 0
            for _ in range(100 if self.quick else 1000):
                x = _random_complex(rng, N)
                x *= rng.random() / np.linalg.norm(x)
                if abs(h_x_value(B, x)) > np.linalg.norm(x) ** 2 + 1e-12:
                    violations += 1
            rows.append({"map": name, "N": N, "norm": report.value, "area_violations": violations})
        passed = all(r["norm"] <= 1 + 1e-8 and r["area_violations"] == 0 for r in rows)
        return {"rows": rows, "passed": passed}

    def run_sharp_bound(self) -> dict:
        print("\nMonte Carlo check of the sharp first-order bound...")
        J = FunctionalSpec.coefficient(1)
        report = sharp_bound_experiment(J, 0.1, samples=100 if self.quick else 1000, seed=self.config.seed,
                                        grid_size=32 if self.quick else 64, progress=self.progress)
        competitors = coefficient_competitors(3, 0.1, samples=10 if self.quick else 50, seed=self.config.seed)
        fixed = fixed_point_coeff_bound(3, 0.1, [0.5, -0.5, 0.5j], restarts=self.config.restarts,
                                        seed=self.config.seed)
        return {
            "sharp_bound": report.to_dict(),
            "competitors": competitors.to_dict(),
            "fixed_point": fixed.to_dict(),
            "passed": report.violations == 0 and competitors.violations == 0,
        }

    def run(self) -> dict:
        print("=" * 60)
        print("QUASICONFORMAL EXPERIMENT PIPELINE")
        print("=" * 60)

        steps = [
            ("grunsky_diagonal", self.run_grunsky_diagonal),
            ("coefficient_equality", self.run_coefficient_equality),
            ("kn_bracket", self.run_kn_brackets),
            ("beltrami_exactness", self.run_beltrami_exactness),
            ("first_order_accuracy", self.run_first_order_accuracy),
            ("norm_derivative", self.run_norm_derivative),
            ("kkt", self.run_kkt),
            ("metric_coincidence", self.run_metric_coincidence),
            ("curvature", self.run_curvature),
            ("univalence", self.run_univalence),
            ("sharp_bound", self.run_sharp_bound),
        ]
        status = {}
        for name, step in steps:
            logger.info("running %s", name)
            result = step()
            status[name] = bool(result["passed"])
            self.save_results(name, result)

        summary = {"status": status, "files": dict(self.files), "quick": self.quick}
        self.save_results("pipeline", summary)

        print("\n" + "=" * 60)
        print("PIPELINE COMPLETE!")
        print("=" * 60)
        for name, ok in status.items():
            print(f"  {name:<24} {'ok' if ok else 'FAILED'}")
        return summary


def main():
    ExperimentPipeline().run()


if __name__ == "__main__":
    main()
