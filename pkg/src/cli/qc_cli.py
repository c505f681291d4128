"""Command-line front end: one subcommand per experiment, JSON or CSV reports."""

import argparse
import json
import logging
import sys
from datetime import datetime
from typing import List, Optional

import numpy as np
import pandas as pd

from src.config import RunConfig, load_config
from src.errors import DomainError, InputError, QCError
from src.extremal.coefficient_bounds import coeff_bound, kn_bracket
from src.extremal.l1_span import kkt_check, l1_distance_to_span, reduced_rho_basis, rho_basis
from src.grunsky.grunsky_matrix import grunsky_coefficients, grunsky_norm
from src.metrics.metric_bounds import (
    geodesic_coincidence_experiment,
    radial_grid,
    sweep_family,
    sweep_frame,
    sweep_summary,
    upper_is_exact,
)
from src.quaddiff.beltrami_field import BeltramiField, load_grid_field
from src.quaddiff.quad_diff import load_quaddiff
from src.quaddiff.quadrature import EXTERIOR
from src.series.laurent_series import load_series, require_sigma
from src.variation.beltrami_solver import BeltramiSolver
from src.variation.first_order import first_order_accuracy, first_order_value
from src.variation.functional_spec import HYDRODYNAMIC, NORMALIZATIONS, FunctionalSpec, load_functional

logger = logging.getLogger(__name__)

SUMMARY_ENTRIES = 4


def parse_complex(text: str) -> complex:
    """'0.3', '0.3+0.1j' or '0.3,0.1'."""
    text = text.strip()
    try:
        if "," in text:
            re, im = text.split(",", 1)
            return complex(float(re), float(im))
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc


def _json_default(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def emit(payload: dict, config: RunConfig, stamp: bool = False, frame: Optional[pd.DataFrame] = None) -> str:
    """Write the report to ``config.out`` or stdout; CSV only for tabular reports."""
    if stamp:
        payload = {**payload, "generated_at": datetime.now().isoformat()}
    if config.format == "csv" and frame is not None:
        text = frame.to_csv(index=False)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"Saved report: {config.out}")
    else:
        sys.stdout.write(text)
    return text


def _load_points(path: str) -> List[Optional[complex]]:
    """Points file: {"points": [[re, im], ...]}; null stands for infinity."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        raw = data["points"] if isinstance(data, dict) else data
        return [None if p is None else complex(float(p[0]), float(p[1])) for p in raw]
    except (IOError, json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"cannot read points file {path}: {exc}") from exc


def _beltrami_field(args) -> BeltramiField:
    if args.mu_grid:
        return load_grid_field(args.mu_grid)
    if args.constant is not None:
        return BeltramiField.constant(parse_complex(args.constant))
    raise InputError("give a Beltrami coefficient with --mu-grid or --constant")


# --- subcommands ---
def cmd_grunsky(args, config: RunConfig) -> dict:
    f = require_sigma(load_series(args.series))
    supported = (1 - f.lo) // 2
    N = args.N or min(config.truncation, supported)
    if not args.N and N < config.truncation:
        logger.info("series supports N=%d only (requested %d)", N, config.truncation)
    B = grunsky_coefficients(f, N)
    report = grunsky_norm(B, restarts=config.restarts, seed=config.seed)
    n = min(SUMMARY_ENTRIES, N)
    off_diagonal = B.entries - np.diag(np.diag(B.entries))
    out = {
        "grunsky": report.to_dict(),
        "leading_alpha": [[B.alpha(m, k) for k in range(1, n + 1)] for m in range(1, n + 1)],
        "max_off_diagonal": float(np.max(np.abs(off_diagonal), initial=0.0)),
    }
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            json.dump(B.to_dict(), fh, indent=2)
        out["matrix_file"] = args.dump
    return out


def cmd_coeff_bounds(args, config: RunConfig):
    if args.n_min < 2:
        raise DomainError("coefficient bounds start at n = 2")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        row = coeff_bound(n, args.k).to_dict()
        if n >= 3:
            bracket = kn_bracket(n)
            row.update(kn_lower=bracket.lower, kn_upper=bracket.upper, kn_root=bracket.root,
                       crossing_ok=bracket.crossing_ok)
        else:
            row.update(kn_lower=None, kn_upper=None, kn_root=None, crossing_ok=None)
        rows.append(row)
    return {"k": args.k, "rows": rows}, pd.DataFrame(rows)


def cmd_extremal(args, config: RunConfig) -> dict:
    psi0 = load_quaddiff(args.psi0)
    psi0.check_integrable()
    points = _load_points(args.points)
    if psi0.domain == EXTERIOR:
        basis = reduced_rho_basis(points, EXTERIOR)
    else:
        basis = rho_basis(points, psi0.domain)
    solution = l1_distance_to_span(psi0, basis, tol=args.kkt_tol, restarts=config.restarts, seed=config.seed,
                                   rule_tol=config.tol)
    report = kkt_check(solution, psi0, basis, args.kkt_tol, config.tol)
    out = solution.to_dict()
    out.update(kkt_passed=report.passed, in_span=report.in_span, basis_size=len(basis))
    return out


def cmd_metric_sweep(args, config: RunConfig):
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise InputError(f"family parameter {item!r} is not key=value")
        key, value = item.split("=", 1)
        params[key.strip()] = parse_complex(value)
    N = args.N or config.truncation
    f, known_k = sweep_family(args.family, params, order=2 * N + 1)
    if args.t_values is not None:
        t_grid = [parse_complex(t) for t in args.t_values]
    else:
        t_grid = radial_grid(args.r_max, args.points, args.angle)
    samples = geodesic_coincidence_experiment(f, known_k, t_grid, N=N, restarts=config.restarts, seed=config.seed)
    frame = sweep_frame(samples)
    summary = sweep_summary(samples, args.gap_tol, upper_exact=upper_is_exact(args.family))
    summary.update(family=args.family, N=N)
    return {"summary": summary, "samples": [s.to_dict() for s in samples]}, frame


def cmd_beltrami_solve(args, config: RunConfig) -> dict:
    mu = _beltrami_field(args)
    solver = BeltramiSolver(grid_size=config.grid_size)
    solution = solver.solve(mu, args.normalization)
    theta = 2 * np.pi * np.arange(args.samples) / args.samples
    z = args.radius * np.exp(1j * theta)
    values = solution.evaluate(z)
    out = {
        "normalization": args.normalization,
        "residual": solution.residual_report(),
        "coefficients": {f"b{n}": solution.coefficient(n) for n in range(1, args.terms + 1)},
        "shift": solution.shift,
        "circle": {"radius": args.radius, "values": [[v.real, v.imag] for v in values]},
    }
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            json.dump(solution.to_dict(), fh)
        out["solution_file"] = args.dump
    return out


def cmd_variation_check(args, config: RunConfig) -> dict:
    if args.functional:
        J = load_functional(args.functional)
    else:
        J = FunctionalSpec.coefficient(args.coefficient, normalization=args.normalization)
    mu = _beltrami_field(args)
    out = {"functional": J.to_dict(), "first_order_value": first_order_value(J, mu, config.tol)}
    if args.eps:
        report = first_order_accuracy(J, mu, args.eps, BeltramiSolver(grid_size=config.grid_size))
        out["accuracy"] = report.to_dict()
    return out


def cmd_pipeline(args, config: RunConfig) -> dict:
    from src.processors.experiment_pipeline import ExperimentPipeline
    return ExperimentPipeline(config, output_dir=args.output_dir, quick=args.quick).run()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qc", description="Quasiconformal variational toolkit")
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tol", type=float, help="quadrature tolerance")
    parser.add_argument("--trunc", type=int, help="Grunsky truncation N")
    parser.add_argument("--grid", type=int, help="Beltrami solver grid size")
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--format", choices=["json", "csv"])
    parser.add_argument("--stamp", action="store_true", help="add a generated_at timestamp")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grunsky", help="Grunsky matrix summary and norm of a Sigma series")
    p.add_argument("series")
    p.add_argument("--N", type=int)
    p.add_argument("--dump", help="write the matrix dump here")
    p.set_defaults(handler=cmd_grunsky)

    p = sub.add_parser("coeff-bounds", help="|a_n| bounds on S_k and the k_n bracket")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.set_defaults(handler=cmd_coeff_bounds)

    p = sub.add_parser("extremal", help="L1 distance from psi_0 to the span of rho kernels")
    p.add_argument("psi0")
    p.add_argument("points")
    p.add_argument("--kkt-tol", type=float, default=1e-4)
    p.set_defaults(handler=cmd_extremal)

    p = sub.add_parser("metric-sweep", help="Grunsky vs Teichmuller distance along a homotopy disk")
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append", help="family parameter key=value")
    p.add_argument("--t-values", nargs="*", help="explicit t grid")
    p.add_argument("--r-max", type=float, default=0.9)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--angle", type=float, default=0.0)
    p.add_argument("--N", type=int)
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.set_defaults(handler=cmd_metric_sweep)

    for name, handler, text in (("beltrami-solve", cmd_beltrami_solve, "solve the Beltrami equation"),
                                ("variation-check", cmd_variation_check, "first-order variation of a functional")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--mu-grid", help="grid dump of mu")
        p.add_argument("--constant", help="mu = c on the unit disk")
        p.add_argument("--normalization", choices=NORMALIZATIONS, default=HYDRODYNAMIC)
        p.set_defaults(handler=handler)
        if name == "beltrami-solve":
            p.add_argument("--radius", type=float, default=2.0)
            p.add_argument("--samples", type=int, default=64)
            p.add_argument("--terms", type=int, default=4)
            p.add_argument("--dump", help="write the solution grid dump here")
        else:
            p.add_argument("--functional", help="functional JSON")
            p.add_argument("--coefficient", type=int, default=1, help="use J = b_n when no file is given")
            p.add_argument("--eps", type=float, nargs="*", help="run the solver at these scalings")

    p = sub.add_parser("pipeline", help="run every experiment and save timestamped reports")
    p.add_argument("--output-dir", default="data/processed")
    p.add_argument("--quick", action="store_true", help="smaller grids and sample counts")
    p.set_defaults(handler=cmd_pipeline)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    overrides = {
        "seed": args.seed,
        "tol": args.tol,
        "truncation": args.trunc,
        "grid_size": args.grid,
        "restarts": args.restarts,
        "out": args.out,
        "format": args.format,
    }
    try:
        config = load_config(args.config, overrides)
        result = args.handler(args, config)
        payload, frame = result if isinstance(result, tuple) else (result, None)
        if args.command != "pipeline":
            emit(payload, config, args.stamp, frame)
        if isinstance(payload, dict) and payload.get("accepted") is False:
            return 4
    except QCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
