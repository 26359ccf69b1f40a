"""Command-line front end: construct | solve | sweep | limits | pde.

Exit codes: 0 success or certified, 2 configuration/domain error, 3 solver
failure, 4 certification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .config import RunConfig, load_config
from .coupling import Variant
from .errors import (
    ConfigError,
    ParamDomainError,
    PreconditionError,
    ScheduleDomainError,
    SolverError,
)
from .experiment import (
    ScheduleTag,
    make_schedule,
    run_sweep,
    sweep_summary,
    verify_nonconvergence,
    write_json,
    write_sweep_csv,
)
from .pde import TorusGrid, pde_sweep, solve_pde
from .solver import solve_reduced, solve_system_iterative

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_CERTIFICATION = 4


def _fmt(value: float) -> str:
    return format(value, ".17g")


def _ensure_out(config: RunConfig) -> str:
    os.makedirs(config.out_dir, exist_ok=True)
    return config.out_dir


def _emit(payload: dict, config: RunConfig) -> None:
    if config.out_format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key} = {value}")


def _construction_xs(config: RunConfig) -> list:
    """Uniform samples plus dyadic refinement so the envelope kinks are visible."""
    x_min, x_max, count = config.x_min, config.x_max, config.samples
    if not x_min < x_max:
        raise ConfigError(f"empty sample range [{x_min}, {x_max}]")
    if count < 2:
        raise ConfigError(f"need at least 2 samples, got {count}")
    step = (x_max - x_min) / (count - 1)
    xs = {x_min + i * step for i in range(count)}
    fracs = (0.5, 0.5625, 0.625, 0.6875, 0.75, 0.8125, 0.875, 0.9375, 1.0)
    for j in range(0, 25):
        for frac in fracs:
            x = -math.ldexp(frac, -j)
            if x_min <= x <= x_max:
                xs.add(x)
    return sorted(xs)


def cmd_construct(config: RunConfig) -> int:
    triple = config.build_triple()
    xs = _construction_xs(config)
    dyadic = triple.variant is Variant.DYADIC
    table = {
        "x": xs,
        "psi": [triple.psi(x) if dyadic else math.nan for x in xs],
        "eta": [triple.eta(x) for x in xs],
        "h": [triple.h(x) for x in xs],
        "f": [triple.f(x) for x in xs],
        "g": [triple.g(x) for x in xs],
    }
    out = _ensure_out(config)
    csv_path = os.path.join(out, "construct.csv")
    columns = ("x", "psi", "eta", "h", "f", "g")
    lines = [",".join(columns)]
    for i in range(len(xs)):
        lines.append(",".join(_fmt(table[c][i]) for c in columns))
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    written = [csv_path]
    if config.plot:
        from . import plots

        fig_path = os.path.join(out, "construct.png")
        plots.render_construction(triple, table, fig_path)
        written.append(fig_path)
    _emit({"samples": len(xs), "files": written}, config)
    return EXIT_OK


def cmd_solve(config: RunConfig, lam: float) -> int:
    if lam is None:
        raise ConfigError("solve needs --lambda")
    if not lam > 0.0:
        raise PreconditionError(f"the pair system needs a strictly positive discount, got {lam}")
    triple = config.build_triple()
    cfg = config.build_solver_config()
    reduced = solve_reduced(triple, lam, cfg)
    iterative = solve_system_iterative(triple, lam, cfg)
    discrepancy = max(abs(reduced.u - iterative.u), abs(reduced.v - iterative.v))
    payload = {
        "lambda": lam,
        "u": reduced.u,
        "v": reduced.v,
        "z": reduced.z,
        "residual_u": reduced.residual_u,
        "residual_v": reduced.residual_v,
        "iterative_u": iterative.u,
        "iterative_v": iterative.v,
        "solver_discrepancy": discrepancy,
    }
    _emit(payload, config)
    return EXIT_OK


def _schedule_from_config(config: RunConfig):
    return make_schedule(config.build_params(), config.tag, config.j_lo, config.j_hi,
                         lam_min=config.lam_min, lam_max=config.lam_max)


def cmd_sweep(config: RunConfig) -> int:
    triple = config.build_triple()
    cfg = config.build_solver_config()
    schedule = _schedule_from_config(config)
    report = run_sweep(triple, schedule, cfg)
    out = _ensure_out(config)
    stem = f"sweep_{config.tag.value}"
    csv_path = os.path.join(out, stem + ".csv")
    json_path = os.path.join(out, stem + ".json")
    write_sweep_csv(report, csv_path)
    summary = sweep_summary(report, triple, extra={"schedule": {
        "tag": config.tag.value, "j_lo": config.j_lo, "j_hi": config.j_hi}})
    write_json(summary, json_path)
    written = [csv_path, json_path]
    if config.plot:
        from . import plots

        fig_path = os.path.join(out, stem + ".png")
        k0, d, p = triple.k0, triple.d, triple.params
        targets = ((k0 * d / p.k2, k0 * d / p.k_star) if triple.variant is Variant.DYADIC
                   else (k0 * d / 3.0, k0 * d / 2.0))
        plots.render_sweep(report, triple, fig_path, targets=targets)
        written.append(fig_path)
    _emit({"rows": len(report.rows), "cluster_lo": report.cluster_lo,
           "cluster_hi": report.cluster_hi, "gap": report.gap, "files": written}, config)
    return EXIT_OK


def cmd_limits(config: RunConfig) -> int:
    triple = config.build_triple()
    cfg = config.build_solver_config()
    result = verify_nonconvergence(triple, config.j_max, cfg)
    certified = result.gap > config.gap_min and result.bounds_ok
    payload = {
        "params": config.params_echo(),
        "variant": config.variant.value,
        "j_max": result.j_max,
        "cluster_lo": result.liminf_est,
        "cluster_hi": result.limsup_est,
        "gap": result.gap,
        "target_lo": result.target_lo,
        "target_hi": result.target_hi,
        "v_cluster_lo": result.v_liminf_est,
        "v_cluster_hi": result.v_limsup_est,
        "bounds_ok": result.bounds_ok,
        "gap_min": config.gap_min,
        "certified": certified,
    }
    out = _ensure_out(config)
    json_path = os.path.join(out, "limits.json")
    write_json(payload, json_path)
    if config.plot:
        from . import plots

        plots.render_limits(result, os.path.join(out, "limits.png"))
    _emit(payload, config)
    return EXIT_OK if certified else EXIT_CERTIFICATION


def cmd_pde(config: RunConfig, lam: float | None) -> int:
    triple = config.build_triple()
    cfg = config.build_solver_config()
    grid = TorusGrid(config.grid_n)
    out = _ensure_out(config)
    if lam is not None:
        if not lam > 0.0:
            raise PreconditionError(f"the grid solve needs a strictly positive discount, got {lam}")
        sol = solve_pde(triple, lam, grid, cfg)
        reduced = solve_reduced(triple, lam, cfg)
        u_val = float(sum(sol.u_values) / len(sol.u_values))
        v_val = float(sum(sol.v_values) / len(sol.v_values))
        payload = {
            "lambda": lam,
            "grid_n": config.grid_n,
            "u": u_val,
            "v": v_val,
            "constancy": sol.constancy,
            "max_residual": sol.max_residual,
            "algebraic_u": reduced.u,
            "algebraic_v": reduced.v,
            "deviation": max(abs(u_val - reduced.u), abs(v_val - reduced.v)),
        }
        write_json(payload, os.path.join(out, "pde_single.json"))
        _emit(payload, config)
        return EXIT_OK
    schedule = _schedule_from_config(config)
    report = pde_sweep(triple, schedule, grid, cfg)
    stem = f"pde_{config.tag.value}"
    csv_path = os.path.join(out, stem + ".csv")
    json_path = os.path.join(out, stem + ".json")
    write_sweep_csv(report, csv_path)
    summary = sweep_summary(report, triple, extra={"grid_n": config.grid_n})
    write_json(summary, json_path)
    written = [csv_path, json_path]
    if config.plot:
        from . import plots

        fig_path = os.path.join(out, stem + ".png")
        plots.render_sweep(report, triple, fig_path)
        written.append(fig_path)
    _emit({"rows": len(report.rows), "cluster_lo": report.cluster_lo,
           "cluster_hi": report.cluster_hi, "gap": report.gap, "files": written}, config)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discountgap",
        description="Monotone coupling construction, discounted solves, and "
                    "vanishing-discount sweeps with two distinct cluster values.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key=value run configuration file")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), dest="out_format",
                        help="stdout summary format")
    common.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    common.add_argument("--variant", choices=[v.value for v in Variant], help="coupling variant")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common],
                       help="dump samples of psi, eta, h, f, g as CSV (and a figure)")
    p.add_argument("--x-min", type=float, dest="x_min")
    p.add_argument("--x-max", type=float, dest="x_max")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("solve", parents=[common], help="solve one discount level both ways")
    p.add_argument("--lambda", type=float, dest="lam", required=True)

    p = sub.add_parser("sweep", parents=[common], help="sweep a discount schedule")
    p.add_argument("--schedule", choices=[t.value for t in ScheduleTag], dest="tag")
    p.add_argument("--j-lo", type=int, dest="j_lo")
    p.add_argument("--j-hi", type=int, dest="j_hi")
    p.add_argument("--lam-min", type=float, dest="lam_min")
    p.add_argument("--lam-max", type=float, dest="lam_max")

    p = sub.add_parser("limits", parents=[common],
                       help="certify the two distinct cluster values (exit 4 if not)")
    p.add_argument("--j-max", type=int, dest="j_max")
    p.add_argument("--gap-min", type=float, dest="gap_min")

    p = sub.add_parser("pde", parents=[common], help="torus-grid verification")
    p.add_argument("--lambda", type=float, dest="lam")
    p.add_argument("--schedule", choices=[t.value for t in ScheduleTag], dest="tag")
    p.add_argument("--j-lo", type=int, dest="j_lo")
    p.add_argument("--j-hi", type=int, dest="j_hi")
    p.add_argument("--grid-n", type=int, dest="grid_n")

    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides = {}
    for name in ("x_min", "x_max", "samples", "j_lo", "j_hi", "lam_min", "lam_max",
                 "j_max", "gap_min", "grid_n", "out_format"):
        if hasattr(args, name):
            overrides[name] = getattr(args, name)
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = args.out
    if getattr(args, "variant", None) is not None:
        overrides["variant"] = Variant(args.variant)
    if getattr(args, "tag", None) is not None:
        overrides["tag"] = ScheduleTag(args.tag)
    if getattr(args, "no_plot", False):
        overrides["plot"] = False
    return overrides


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, _overrides_from_args(args))
        if args.command == "construct":
            return cmd_construct(config)
        if args.command == "solve":
            return cmd_solve(config, args.lam)
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "limits":
            return cmd_limits(config)
        if args.command == "pde":
            return cmd_pde(config, args.lam)
        raise ConfigError(f"unknown command {args.command!r}")  # pragma: no cover
    except (ConfigError, ParamDomainError, ScheduleDomainError, PreconditionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
