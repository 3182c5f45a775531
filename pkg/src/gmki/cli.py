"""Command-line entry point.

Subcommands:
  run        execute a method on a named benchmark, persist all artifacts
  reference  write a grid reference posterior as CSV
  metrics    per-iteration total-variation table for a finished run
  ns-truth   generate the synthetic fluid-flow ground truth artifacts

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields as dataclass_fields
from pathlib import Path

import numpy as np

from . import __version__
from .artifacts import (
    dumps,
    read_density_csv,
    write_density_csv,
    write_field_csv,
    write_final_mixture,
    write_mixtures,
    write_records,
    write_vector_csv,
    read_mixtures,
)
from .benchmarks import get_benchmark
from .driver import GmkiConfig, run as run_gmki
from .errors import ConfigError, GmkiError
from .gmvi import GmviConfig, run_gmvi
from .oracles import grid_posterior, mixture_to_grid, tv_distance
from .problems import CountingForwardModel, InverseProblem


def _load_config(path, cfg_cls, base=None, seed=None):
    """Flat JSON config; unknown keys are errors; --seed wins over the file."""
    allowed = {f.name for f in dataclass_fields(cfg_cls)}
    values = dict(base or {})
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a flat key/value object")
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)
    if seed is not None:
        values["seed"] = seed
    try:
        return cfg_cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _reference_density(spec, bounds=None, resolution=None):
    bounds = bounds if bounds is not None else spec.reference_bounds
    resolution = resolution if resolution is not None else spec.reference_resolution
    if bounds is None or resolution is None:
        raise ConfigError(f"benchmark {spec.name} has no grid reference")
    phi = spec.derivatives.phi if spec.derivatives is not None else None
    return grid_posterior(spec.problem, bounds, resolution, phi=phi)


def cmd_run(args) -> int:
    spec = get_benchmark(args.problem)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()

    if args.method == "gmki":
        base = {f.name: getattr(spec.recommended_cfg, f.name)
                for f in dataclass_fields(GmkiConfig)}
        cfg = _load_config(args.config, GmkiConfig, base=base, seed=args.seed)
        problem = InverseProblem(forward=CountingForwardModel(spec.problem.forward),
                                 y=spec.problem.y, sigma_eta=spec.problem.sigma_eta,
                                 r0=spec.problem.r0, sigma_0=spec.problem.sigma_0)
        result = run_gmki(problem, cfg)
        forward_total = problem.forward.count
    elif args.method == "gmvi":
        if spec.derivatives is None:
            raise ConfigError(f"benchmark {args.problem} has no analytic derivatives for gmvi")
        cfg = _load_config(args.config, GmviConfig, seed=args.seed)
        result = run_gmvi(spec.derivatives, cfg, dim=spec.problem.n_theta)
        forward_total = 0
    else:
        raise ConfigError(f"unknown method {args.method!r}")

    write_records(out / "records.jsonl", result.records)
    write_mixtures(out / "mixtures.jsonl", result.mixtures)
    write_final_mixture(out / "final_mixture.json", result.final_mixture)
    if spec.problem.n_theta <= 2 and spec.reference_bounds is not None:
        reference = _reference_density(spec)
        density = mixture_to_grid(result.final_mixture, reference.axes)
        write_density_csv(out / "density.csv", density)

    manifest = {
        "method": args.method,
        "problem": args.problem,
        "config": {f.name: getattr(cfg, f.name) for f in dataclass_fields(type(cfg))},
        "code_version": __version__,
        "wall_clock_s": time.perf_counter() - t_start,
        "forward_evals_total": forward_total,
    }
    (out / "manifest.json").write_text(dumps(manifest) + "\n")
    return 0


def cmd_reference(args) -> int:
    spec = get_benchmark(args.problem)
    bounds = None
    resolution = None
    if args.bounds:
        vals = [float(v) for v in args.bounds.split(",")]
        if len(vals) % 2:
            raise ConfigError("--bounds needs lo,hi pairs")
        bounds = tuple((vals[i], vals[i + 1]) for i in range(0, len(vals), 2))
    if args.resolution:
        resolution = tuple(int(v) for v in args.resolution.split(","))
    density = _reference_density(spec, bounds, resolution)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_density_csv(Path(args.out), density)
    return 0


def cmd_metrics(args) -> int:
    run_dir = Path(args.run)
    mix_path = run_dir / "mixtures.jsonl"
    if not mix_path.exists():
        raise ConfigError(f"no mixtures.jsonl in {run_dir}")
    reference = read_density_csv(Path(args.reference))
    mixtures = read_mixtures(mix_path)
    lines = ["iteration,tv"]
    for n, mix in enumerate(mixtures):
        tv = tv_distance(mixture_to_grid(mix, reference.axes), reference)
        lines.append(f"{n},{tv:.17g}")
    (run_dir / "tv.csv").write_text("\n".join(lines) + "\n")
    return 0


def cmd_ns_truth(args) -> int:
    from .navier_stokes import (
        KlBasis,
        NsConfig,
        NsForwardModel,
        ObservationOperator,
        SpectralGrid,
        ns_synthetic_truth,
    )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = SpectralGrid(args.grid)
    cfg = NsConfig()
    basis = KlBasis(truncation=args.modes)
    op = ObservationOperator()
    model = NsForwardModel(basis, cfg, op, grid, n_modes=args.modes)
    truth = ns_synthetic_truth(model, args.seed)
    write_vector_csv(out / "theta_ref.csv", truth.theta_ref, header="theta")
    write_field_csv(out / "omega0.csv", truth.omega0)
    write_vector_csv(out / "observations.csv", truth.noisy_observations, header="observation")
    manifest = {
        "seed": args.seed,
        "modes": args.modes,
        "grid": args.grid,
        "viscosity": cfg.viscosity,
        "background_velocity": list(cfg.background_velocity),
        "dt_pde": cfg.dt_pde,
        "observation_times": list(op.times),
        "noise_std": op.noise_std,
        "observation_locations": op.locations(),
        "code_version": __version__,
    }
    (out / "manifest.json").write_text(dumps(manifest) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmki")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a method on a named benchmark")
    p_run.add_argument("--method", choices=("gmki", "gmvi"), default="gmki")
    p_run.add_argument("--problem", required=True)
    p_run.add_argument("--config", default=None)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_ref = sub.add_parser("reference", help="write a grid reference posterior CSV")
    p_ref.add_argument("--problem", required=True)
    p_ref.add_argument("--bounds", default=None, help="lo,hi[,lo,hi]")
    p_ref.add_argument("--resolution", default=None, help="n[,n]")
    p_ref.add_argument("--out", required=True)
    p_ref.set_defaults(func=cmd_reference)

    p_met = sub.add_parser("metrics", help="per-iteration TV distance table")
    p_met.add_argument("--run", required=True)
    p_met.add_argument("--reference", required=True)
    p_met.set_defaults(func=cmd_metrics)

    p_ns = sub.add_parser("ns-truth", help="generate the fluid-flow synthetic truth")
    p_ns.add_argument("--out", required=True)
    p_ns.add_argument("--seed", type=int, default=7)
    p_ns.add_argument("--modes", type=int, default=32)
    p_ns.add_argument("--grid", type=int, default=32)
    p_ns.set_defaults(func=cmd_ns_truth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GmkiError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
