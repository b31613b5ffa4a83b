"""Command-line driver: inspect the pipeline stage by stage or run sweeps.

Subcommands mirror the pipeline: ``spectrum`` (eigenvalues and spin labels),
``kraus`` (channel hierarchy), ``codewords`` (Knill-Laflamme solve),
``compile`` (pulse schedules), ``cycle`` (one protocol cycle), ``sweep``
(threshold/scaling grids to CSV) and ``fit`` (log-log slope extraction).
Intermediate artifacts are JSON so they can be cached and inspected.

Exit codes: 0 success, 1 configuration error, 2 partial sweep failure.
"""

import argparse
import json
import sys

import numpy as np

from .config import ConfigError, default_config, load_config
from .constants import angular_to_ghz
from .protocol import (
    MeasurementModel,
    build_system,
    run_cycle,
)
from .et_compiler import planar_generator, schedule_pulses
from .sweep import (
    FitResult,
    cached_codewords,
    export,
    fit_slope,
    load_plan,
    read_csv,
    run_sweep,
    store_codewords,
)


def _load_cfg(path):
    return load_config(path) if path else default_config()


def _print_json(data, out=None):
    text = json.dumps(data, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_spectrum(args) -> int:
    cfg = _load_cfg(args.config)
    system = build_system(cfg, args.d)
    energies = angular_to_ghz(system.eig.energies - system.eig.energies[0])
    n = min(args.levels, len(energies))
    data = {
        "energies_ghz": [float(e) for e in energies[:n]],
        "qudit_d": args.d,
        "spin_labels": [float(s) for s in system.basis.spin_labels],
        "boundary_gap_ghz": float(energies[args.d] - energies[args.d - 1])
        if args.d < len(energies)
        else None,
    }
    _print_json(data, args.out)
    return 0


def cmd_kraus(args) -> int:
    cfg = _load_cfg(args.config)
    system = build_system(cfg, args.d)
    kraus = system.kraus
    data = {
        "d": args.d,
        "t_snapshot_ns": kraus.t_snapshot * 1e9,
        "norms": [float(x) for x in kraus.norms],
        "diagonals_re": np.real(kraus.diagonals).tolist(),
        "diagonals_im": np.imag(kraus.diagonals).tolist(),
    }
    _print_json(data, args.out)
    return 0


def cmd_codewords(args) -> int:
    cfg = _load_cfg(args.config)
    cached = cached_codewords(cfg, args.d)
    if cached is not None and not args.no_cache:
        cw, basis = cached
    else:
        system = build_system(cfg, args.d)
        cw, basis = system.codewords, system.error_basis
        store_codewords(cfg, args.d, cw, basis)
    data = {"codewords": cw.to_dict(), "error_basis": basis.to_dict()}
    _print_json(data, args.out)
    return 0


def cmd_compile(args) -> int:
    cfg = _load_cfg(args.config)
    system = build_system(cfg, args.d)
    if args.op == "gate":
        theta, phi = (float(x) for x in args.gate.split(","))
        gen = planar_generator(theta, phi, system.error_basis)
        energies = system.energies
    elif args.op == "cu":
        gen = system.cu_gen
        # synthetic ancilla ladder for reporting transition frequencies
        span = float(system.energies[-1] - system.energies[0])
        anc = 1.5 * span * np.arange(system.n_errors)
        energies = (system.energies[:, None] + anc[None, :]).reshape(-1)
    elif args.op.startswith("recovery"):
        k = int(args.op.split(":")[1])
        gen = system.recovery_gens[k]
        if gen is None:
            print("recovery 0 is the identity; nothing to schedule", file=sys.stderr)
            return 0
        energies = system.energies
    elif args.op == "prep":
        gen = system.prep_gen
        energies = system.energies
    else:
        raise ConfigError(f"unknown op {args.op!r}")
    schedule = schedule_pulses(
        gen, energies, system.rabi_max, cfg.drive.linewidth_factor
    )
    _print_json(schedule.to_dict(), args.out)
    return 0


def cmd_cycle(args) -> int:
    cfg = _load_cfg(args.config)
    system = build_system(cfg, args.d)
    theta, phi = (float(x) for x in args.gate.split(","))
    model = MeasurementModel(p_m=args.p_m, n_rep=args.n_rep)
    report = run_cycle(system, theta, phi, args.t2_us * 1e-6, model)
    row = report.as_row("single_gate_cycle")
    _print_json(row, args.out)
    return 0


def cmd_sweep(args) -> int:
    plan = load_plan(args.config)
    rows = run_sweep(plan, jobs=args.jobs)
    export(rows, args.out)
    failures = sum(1 for r in rows if r.get("circuit") == "error")
    print(f"wrote {len(rows)} rows to {args.out} ({failures} failed)", file=sys.stderr)
    return 2 if failures else 0


def cmd_fit(args) -> int:
    rows = read_csv(args.infile)
    result: FitResult = fit_slope(
        rows, x_kind=args.x, d=args.d, circuit=args.circuit
    )
    _print_json(
        {
            "slope": result.slope,
            "intercept": result.intercept,
            "r_squared": result.r_squared,
            "n_points": result.n_points,
        },
        args.out,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qudit-ftqec",
        description="Fault-tolerant single-qudit QEC simulation pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues and spin labels")
    p.add_argument("--config")
    p.add_argument("--d", type=int, default=16)
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("kraus", help="dephasing Kraus hierarchy")
    p.add_argument("--config")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_kraus)

    p = sub.add_parser("codewords", help="Knill-Laflamme code words")
    p.add_argument("--config")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_codewords)

    p = sub.add_parser("compile", help="pulse schedule of a logical operation")
    p.add_argument("--config")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--op", default="gate", help="gate | cu | recovery:K | prep")
    p.add_argument("--gate", default="1.5707963,3.1415927", help="theta,phi")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("cycle", help="single gate + EC cycle")
    p.add_argument("--config")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--t2-us", type=float, default=10.0)
    p.add_argument("--gate", default="1.5707963,3.1415927")
    p.add_argument("--p-m", type=float, default=0.0)
    p.add_argument("--n-rep", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("sweep", help="run a sweep plan to CSV")
    p.add_argument("--config", required=True, help="plan JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="log-log slope of a results CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--x", choices=("inv_t2", "dim"), default="inv_t2")
    p.add_argument("--d", type=int)
    p.add_argument("--circuit")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
