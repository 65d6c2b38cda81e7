"""Command-line driver: ``l1recovery {sweep,solve,rip,tomo,spectrum} ...``.

Every CSV carries the resolved configuration in ``#`` header lines.  The
worker count and output directory are left out of that header, so the same
flags give byte-identical files whatever ``--threads`` is.
"""
import argparse
import os
import sys

import numpy as np

from . import diagnostics, ensembles, io, phase_lab, problem_gen
from .ensembles import SpectrumKind, SpectrumSpec
from .solvers import lasso_path

THREADS_ENV = "L1RECOVERY_THREADS"


def _positive_unit(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1]")
    return v


def _nonneg(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"{text} must be >= 0")
    return v


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be a positive integer")
    return v


def _seed(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("seeds are nonnegative integers")
    return v


def _default_threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise SystemExit(f"error: {THREADS_ENV}={raw!r} is not an integer")


def _spec_from(args):
    kind = SpectrumKind(args.type)
    kappa = args.kappa if kind != SpectrumKind.TYPE1 else 1.0
    return SpectrumSpec(kind, kappa)


def _add_common(p, seed=0):
    p.add_argument("--seed", type=_seed, default=seed)
    p.add_argument("--output", default=".", help="output directory (default: current)")
    p.add_argument("--format", choices=["csv", "svg", "both"], default="both")
    p.add_argument("--threads", type=_count, default=None,
                   help=f"worker processes (default: ${THREADS_ENV} or 1)")


def _add_ensemble(p):
    p.add_argument("--type", type=int, choices=[1, 2, 3], default=1)
    p.add_argument("--kappa", type=float, default=1e4)


def build_parser():
    parser = argparse.ArgumentParser(prog="l1recovery",
                                     description="Sparse recovery error experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="mean-error map over the (delta, rho) plane")
    p.add_argument("--preset", choices=sorted(phase_lab.PRESETS), default="mini")
    p.add_argument("--epsilon", type=_nonneg, nargs="+", default=[0.1])
    p.add_argument("--trials", type=_count)
    p.add_argument("--n", type=_count)
    p.add_argument("--delta", type=_positive_unit, nargs="+")
    p.add_argument("--rho", type=_positive_unit, nargs="+")
    _add_ensemble(p)
    _add_common(p)

    p = sub.add_parser("solve", help="one random instance solved along the homotopy path")
    p.add_argument("--n", type=_count, default=200)
    p.add_argument("--delta", type=_positive_unit, default=0.5)
    p.add_argument("--rho", type=_positive_unit, default=0.1)
    p.add_argument("--epsilon", type=_nonneg, default=0.1)
    p.add_argument("--instance", help="replay a saved .npz instance instead of drawing one")
    p.add_argument("--save-instance", action="store_true")
    _add_ensemble(p)
    _add_common(p)

    p = sub.add_parser("rip", help="condition numbers of random column submatrices")
    p.add_argument("--preset", choices=["hadamard128", "ensemble"], default="ensemble")
    p.add_argument("--samples", type=_count, default=10_000)
    p.add_argument("--columns", type=_count)
    p.add_argument("--n", type=_count, default=800)
    p.add_argument("--m", type=_count, default=200)
    p.add_argument("--parents", type=_count, default=1)
    _add_ensemble(p)
    _add_common(p)

    p = sub.add_parser("tomo", help="sparse magnetic tomography, l1 against l2")
    p.add_argument("--preset", choices=["tomo64"], default="tomo64")
    p.add_argument("--seeds", type=_count, default=1, help="number of realizations")
    p.add_argument("--sensor-seed", type=_seed, default=0)
    p.add_argument("--export-matrix", action="store_true")
    _add_common(p)

    p = sub.add_parser("spectrum", help="mean normalized singular spectrum of row subsamples")
    p.add_argument("--n", type=_count, default=800)
    p.add_argument("--m", type=_count, default=400)
    p.add_argument("--repeats", type=_count, default=10)
    _add_ensemble(p)
    _add_common(p)
    return parser


def _config(args, **extra):
    skip = {"output", "threads", "format"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip}
    cfg.update(extra)
    return cfg


def _path(args, name):
    return os.path.join(args.output, name)


def _want(args, kind):
    return args.format in (kind, "both")


def _tag(v):
    return format(v, "g").replace(".", "p")


def cmd_sweep(args):
    spec_e = _spec_from(args)
    overrides = {k: getattr(args, k) for k in ("trials", "n") if getattr(args, k) is not None}
    if args.delta:
        overrides["delta_values"] = args.delta
    if args.rho:
        overrides["rho_values"] = args.rho
    written = []
    summary = []
    for eps in args.epsilon:
        spec = phase_lab.preset(args.preset, epsilon=eps, ensemble=spec_e, base_seed=args.seed, **overrides)
        grid = phase_lab.run_sweep(spec, threads=args.threads)
        cfg = _config(args, epsilon=eps, grid=spec.config())
        stem = f"sweep_{args.preset}_{spec_e.label()}_eps{_tag(eps)}".replace("(", "_").replace(")", "").replace("=", "")
        curves = phase_lab.extract_level_curve(grid, 2 * eps)
        if _want(args, "csv"):
            io.write_csv(_path(args, stem + ".csv"), phase_lab.SWEEP_COLUMNS, phase_lab.sweep_rows(grid), cfg)
            io.write_csv(_path(args, stem + "_contour.csv"), ["curve_id", "delta", "rho"],
                         phase_lab.contour_rows(curves), cfg)
            written += [stem + ".csv", stem + "_contour.csv"]
        if _want(args, "svg"):
            title = f"mean relative error, {spec_e.label()}, eps={eps:g}"
            io.atomic_write(_path(args, stem + ".svg"), phase_lab.heatmap_svg(grid, curves, title=title))
            written.append(stem + ".svg")
        values = phase_lab.mean_error_grid(grid)
        fails = sum(c.failure_count for row in grid for c in row)
        summary.append(f"eps={eps:g} mean={np.nanmean(values):.4f} failures={fails}")
    return f"sweep {args.preset} {spec_e.label()}: " + "; ".join(summary) + f" -> {len(written)} files in {args.output}"


def cmd_solve(args):
    if args.instance:
        inst = problem_gen.load_instance(args.instance)
    else:
        spec = _spec_from(args)
        m, k = problem_gen.sweep_sizes(args.n, args.delta, args.rho)
        parent = ensembles.gen_parent(args.n, spec, (args.seed, 0))
        K = ensembles.subsample_rows(parent, m, (args.seed, 1))
        x0 = problem_gen.gen_signal(args.n, k, (args.seed, 2))
        inst = problem_gen.synthesize(K, x0, args.epsilon, (args.seed, 3))
    _, sol = lasso_path(inst.matrix.entries, inst.data, target_residual=inst.noise_norm, record=False)
    err = problem_gen.relative_error(sol.x, inst.signal)
    cfg = _config(args, m=int(inst.data.size), k=int(inst.signal.k))
    os.makedirs(args.output, exist_ok=True)
    io.write_solution(_path(args, "solution"), sol, dict(cfg, relative_error=err))
    if args.save_instance:
        problem_gen.save_instance(_path(args, "instance.npz"), inst)
    return (f"solve m={inst.data.size} k={inst.signal.k}: status={sol.status.value} lambda={sol.lam:.6g} "
            f"residual={sol.residual_norm:.6g} relative_error={err:.6g}")


def cmd_rip(args):
    if args.preset == "hadamard128":
        columns = args.columns or 12
        K = diagnostics.identity_hadamard_matrix(128)
        rep = diagnostics.sample_condition_numbers(K, columns, args.samples, args.seed)
        label = "hadamard128"
    else:
        columns = args.columns or 20
        spec = _spec_from(args)
        rep = diagnostics.ensemble_condition_numbers(args.n, args.m, spec, columns, args.samples,
                                                     args.seed, parents=args.parents)
        label = f"{spec.label()}_{args.m}x{args.n}".replace("(", "_").replace(")", "").replace("=", "")
    cfg = _config(args, columns=columns, bound=diagnostics.rip_bound_constant())
    if args.preset == "hadamard128":
        for key in ("type", "kappa", "n", "m", "parents"):
            cfg.pop(key)
    io.write_csv(_path(args, f"rip_{label}.csv"), diagnostics.REPORT_COLUMNS, [rep.row()], cfg)
    return (f"rip {label}: columns={columns} samples={rep.samples} mean={rep.mean_kappa:.4f} "
            f"max={rep.max_kappa:.4f} min={rep.min_kappa:.4f} singular={rep.infinite_count}")


def cmd_tomo(args):
    from .magtomo import experiment, render
    from .magtomo.geometry import stream_to_current

    setup = experiment.tomo_setup(64, 1000, args.sensor_seed)
    cfg = _config(args)
    reports = [experiment.run_tomo_experiment(args.seed + s, setup) for s in range(args.seeds)]
    if _want(args, "csv"):
        io.write_csv(_path(args, "tomo_report.csv"), experiment.REPORT_COLUMNS, [r.row() for r in reports], cfg)
        s = np.linalg.svd(setup.matrix, compute_uv=False)
        io.write_csv(_path(args, "tomo_spectrum.csv"), ["index", "singular_value", "normalized_value"],
                     ensembles.spectrum_rows(s), cfg)
        norms = np.linalg.norm(setup.matrix, axis=0)
        io.write_csv(_path(args, "tomo_column_norms.csv"), ["column", "norm"], list(enumerate(norms)), cfg)
    if _want(args, "svg"):
        first = reports[0]
        for name, F in first.fields.items():
            J = stream_to_current(F, setup.grid)
            io.atomic_write(_path(args, f"tomo_{name}.svg"), render.field_svg(F, J, title=f"{name}, seed {first.seed}"))
            io.atomic_write(_path(args, f"tomo_{name}.ppm"), render.field_ppm(F))
    if args.export_matrix:
        io.write_matrix(_path(args, "tomo_matrix.bin"), setup.matrix)
    l1 = np.median([r.l1_error for r in reports])
    l2 = np.median([r.l2_error for r in reports])
    return f"tomo {args.seeds} seed(s): median l1 error={l1:.4f} median l2 error={l2:.4f}"


def cmd_spectrum(args):
    spec = _spec_from(args)
    if args.m > args.n:
        raise ValueError("m must not exceed n")
    mean = ensembles.mean_normalized_spectrum(args.n, args.m, spec, args.repeats, args.seed)
    label = f"{spec.label()}_{args.m}x{args.n}".replace("(", "_").replace(")", "").replace("=", "")
    io.write_csv(_path(args, f"spectrum_{label}.csv"), ["index", "singular_value", "normalized_value"],
                 ensembles.spectrum_rows(mean), _config(args))
    return f"spectrum {label}: {args.repeats} repeats, last/first={mean[-1] / mean[0]:.4g}"


COMMANDS = {"sweep": cmd_sweep, "solve": cmd_solve, "rip": cmd_rip, "tomo": cmd_tomo, "spectrum": cmd_spectrum}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = _default_threads()
    try:
        line = COMMANDS[args.command](args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
