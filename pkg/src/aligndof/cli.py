"""Command-line front end.

Exit codes: 0 ok, 2 usage, 3 no feasible plan, 4 constructive failure,
5 verification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .dofcalc import MAX_STAGES, DEFAULT_STAGES, optimal_bounds, plan as make_plan, upper_bound
from .exceptions import AlignDofError, ConstructionError, NoFeasiblePlan
from .netmodel import NetworkConfig, sample_channel
from .orchestrator import NetworkDesign, derive_seed, design_network, random_design, verify_design
from .subspace import Tolerance, default_tolerance
from .sweep import SweepSpec, parse_sweep, plot_script, run_sweep, to_csv, to_json
from .sweep import dec, exact

log = logging.getLogger("aligndof")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_CONSTRUCT, EXIT_VERIFY = 0, 2, 3, 4, 5


class _UsageError(Exception):
    pass


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _tolerance(text):
    try:
        return Tolerance(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_config(p, required=True):
    p.add_argument("-L", type=_positive, required=required, help="number of cells")
    p.add_argument("-K", type=_positive, required=required, help="users per cell")
    p.add_argument("-M", type=_positive, required=required, dest="M_r",
                   help="receive antennas per BS")
    p.add_argument("-N", type=_positive, required=required, dest="N_t",
                   help="transmit antennas per user")


def _add_common(p):
    p.add_argument("--tol", type=_tolerance, default=None,
                   help="relative rank tolerance (default $ALIGNDOF_TOL or 1e-10)")
    p.add_argument("--max-stages", type=int, default=DEFAULT_STAGES,
                   choices=range(1, MAX_STAGES + 1), metavar=f"1..{MAX_STAGES}",
                   help=f"enhancement stages searched (default {DEFAULT_STAGES})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="aligndof", description="Interference alignment DoF planner for multicell uplinks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="best scheme parameters and total DoF")
    _add_config(p)
    _add_common(p)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("design", help="build precoders on one channel draw")
    _add_config(p)
    _add_common(p)
    p.add_argument("--seed", type=int, default=0, help="channel seed")
    p.add_argument("--out", help="write the design as JSON here")

    p = sub.add_parser("verify", help="redesign and verify over fresh channel draws")
    _add_config(p, required=False)
    _add_common(p)
    p.add_argument("--design", help="design JSON written by `aligndof design`")
    p.add_argument("--seed", type=int, default=None, help="base channel seed")
    p.add_argument("--trials", type=_positive, default=1)
    p.add_argument("--random-precoders", action="store_true",
                   help="control run: replace the design with random precoders")

    p = sub.add_parser("sweep", help="DoF table over one axis")
    _add_config(p, required=False)
    _add_common(p)
    p.add_argument("--sweep", required=True, help="AXIS=LO..HI with AXIS in K, M, N, L")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--plot", help="also write a matplotlib script rendering the CSV")
    p.add_argument("--trials", type=int, default=0,
                   help="channel draws per point for a constructive check (JSON only)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("baselines", help="closed-form baselines and optimal-DoF bounds")
    _add_config(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _tol(args):
    return args.tol if args.tol is not None else default_tolerance()


def _config(args):
    missing = [flag for flag, name in (("-L", "L"), ("-K", "K"), ("-M", "M_r"), ("-N", "N_t"))
               if getattr(args, name) is None]
    if missing:
        raise _UsageError(f"missing {' '.join(missing)}")
    return NetworkConfig(args.L, args.K, args.M_r, args.N_t)


def _plan_lines(p):
    lines = [f"config: L={p.L} K={p.K} M_r={p.M_r} N_t={p.N_t}"]
    for idx, stage in enumerate(p.stages, start=1):
        s = stage.params
        tag = " (extrapolated)" if idx > DEFAULT_STAGES else ""
        zf = " zero-forcing" if s.zero_forcing else ""
        lines.append(f"stage {idx}: K_t={s.K_t} kappa_t={s.kappa_t} K_r={s.K_r} "
                     f"d={exact(s.d)} ({dec(s.d)}){zf}{tag}")
    lines.append(f"D = {exact(p.D)} ({dec(p.D)})")
    lines.append(f"n_ICI = {exact(p.n_ICI)} ({dec(p.n_ICI)})")
    if p.L * p.M_r > p.N_t:
        ub = upper_bound(p.L, p.M_r, p.N_t)
        lines.append(f"D_UB = {exact(ub)} ({dec(ub)})")
    else:
        lines.append("D_UB = undefined (L*M_r <= N_t)")
    if p.extension_factor > 1:
        lines.append(f"symbol extension length = {p.extension_factor}")
    return lines


def cmd_plan(args, out):
    cfg = _config(args)
    p = make_plan(cfg.L, cfg.K, cfg.M_r, cfg.N_t, args.max_stages)
    if args.format == "json":
        out.write(json.dumps(p.as_dict(), indent=2) + "\n")
    else:
        out.write("\n".join(_plan_lines(p)) + "\n")
    return EXIT_OK


def _summary(report):
    lines = []
    for b in report.per_bs:
        lines.append(f"BS {b.bs + 1}: desired dim {b.desired_dim}, ICI dim {b.ici_dim} "
                     f"(predicted {exact(b.predicted_n_ici)}), "
                     f"{'decodable' if b.decodable else 'NOT decodable'}")
    ranks = sorted(set(report.user_ranks.values()))
    lines.append(f"precoder ranks: {ranks} (expected {report.d_int})")
    lines.append("PASS" if report.passed else "FAIL")
    return lines


def cmd_design(args, out):
    cfg = _config(args)
    tol = _tol(args)
    p = make_plan(cfg.L, cfg.K, cfg.M_r, cfg.N_t, args.max_stages)
    channel = sample_channel(cfg, args.seed)
    design_seed = derive_seed(args.seed, 1)
    try:
        design = design_network(cfg, channel, p, design_seed, tol)
    except ConstructionError as exc:
        out.write(f"construction failed: {exc}\n")
        return EXIT_CONSTRUCT
    report = verify_design(cfg, channel, design, tol)
    if args.out:
        payload = design.to_dict()
        payload["verification"] = report.to_dict()
        with open(args.out, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
    out.write("\n".join(_plan_lines(p)) + "\n")
    for note in design.notes:
        out.write(f"note: {note}\n")
    out.write("\n".join(_summary(report)) + "\n")
    if design.notes and any("symbol extension" in n for n in design.notes):
        return EXIT_CONSTRUCT
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_verify(args, out):
    tol = _tol(args)
    stored_plan = None
    base_seed = args.seed
    if args.design:
        with open(args.design) as fh:
            stored = NetworkDesign.from_dict(json.load(fh))
        cfg = stored.config
        stored_plan = stored.plan
        if base_seed is None:
            base_seed = stored.channel_seed or 0
    else:
        cfg = _config(args)
    base_seed = base_seed or 0
    p = stored_plan or make_plan(cfg.L, cfg.K, cfg.M_r, cfg.N_t, args.max_stages)

    passed = 0
    for t in range(args.trials):
        ch_seed = base_seed + t
        channel = sample_channel(cfg, ch_seed)
        try:
            if args.random_precoders:
                d_int = max(int(p.d), 1)
                design = random_design(cfg, d_int, derive_seed(ch_seed, 2))
            else:
                design = design_network(cfg, channel, p, derive_seed(ch_seed, 1), tol)
        except ConstructionError as exc:
            out.write(f"trial {t} (seed {ch_seed}): construction failed: {exc}\n")
            return EXIT_CONSTRUCT
        report = verify_design(cfg, channel, design, tol)
        ici = ",".join(str(b.ici_dim) for b in report.per_bs)
        out.write(f"trial {t} (seed {ch_seed}): {'pass' if report.passed else 'FAIL'} "
                  f"[ICI dims {ici}]\n")
        passed += report.passed
    out.write(f"passed {passed}/{args.trials}\n")
    return EXIT_OK if passed == args.trials else EXIT_VERIFY


def _sweep_verifier(tol, max_stages):
    def verify(L, K, M_r, N_t, trials, seed):
        cfg = NetworkConfig(L, K, M_r, N_t)
        p = make_plan(L, K, M_r, N_t, max_stages)
        ok = 0
        for t in range(trials):
            channel = sample_channel(cfg, derive_seed(seed, L, K, M_r, N_t, t))
            try:
                design = design_network(cfg, channel, p, derive_seed(channel.seed, 1), tol)
            except AlignDofError:
                continue
            ok += verify_design(cfg, channel, design, tol).passed
        return ok, trials
    return verify


def cmd_sweep(args, out):
    try:
        axis, lo, hi = parse_sweep(args.sweep)
    except ValueError as exc:
        raise _UsageError(str(exc))
    fixed = {name: getattr(args, name) for name in ("L", "K", "M_r", "N_t")}
    missing = [n for n, v in fixed.items() if v is None and n != axis]
    if missing:
        raise _UsageError(f"missing fixed value(s) for {', '.join(missing)}")
    fixed[axis] = lo
    try:
        spec = SweepSpec(axis, lo, hi, trials=args.trials, seed=args.seed, out=args.out,
                         format=args.format, max_stages=args.max_stages, **fixed)
    except ValueError as exc:
        raise _UsageError(str(exc))
    verifier = _sweep_verifier(_tol(args), args.max_stages) if spec.trials else None
    rows = run_sweep(spec, verifier)
    text = to_csv(rows) if spec.format == "csv" else to_json(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.plot:
        if spec.format != "csv" or not args.out:
            raise _UsageError("--plot needs --format csv and --out")
        png = os.path.splitext(args.out)[0] + ".png"
        with open(args.plot, "w") as fh:
            fh.write(plot_script(args.out, png))
    return EXIT_OK


def cmd_baselines(args, out):
    cfg = _config(args)
    b = optimal_bounds(cfg.L, cfg.K, cfg.M_r, cfg.N_t)
    if args.format == "json":
        out.write(json.dumps(b.as_dict(), indent=2) + "\n")
        return EXIT_OK
    base = b.baselines
    lines = [f"config: L={cfg.L} K={cfg.K} M_r={cfg.M_r} N_t={cfg.N_t}",
             f"COS     = {exact(base.COS)} ({dec(base.COS)})"]
    if base.Lee is not None:
        lines.append(f"Lee     = {exact(base.Lee)} ({dec(base.Lee)})")
    lines += [f"LCell   = {exact(base.LCell)} ({dec(base.LCell)})",
              f"D_decom  = {exact(b.D_decom)} ({dec(b.D_decom)})",
              f"D_proper = {exact(b.D_proper)} ({dec(b.D_proper)})"]
    if b.C_A_inf is not None:
        lines.append(f"C_B_inf = {b.C_B_inf:.15g}, C_A_inf = {b.C_A_inf:.15g}")
    if b.D_UB is not None:
        lines.append(f"D_UB    = {exact(b.D_UB)} ({dec(b.D_UB)})")
    lines.append(f"region: {b.region.value}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {"plan": cmd_plan, "design": cmd_design, "verify": cmd_verify,
            "sweep": cmd_sweep, "baselines": cmd_baselines}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"aligndof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoFeasiblePlan as exc:
        print(f"aligndof: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"aligndof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
