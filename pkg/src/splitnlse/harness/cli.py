"""Command-line entry point: ``splitnlse {run,reference,converge,rco,selftest}``.

Exit codes: 0 success, 1 usage/config/input error, 2 numerical divergence.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys

from ..analysis import error_norms, rco_diagnostics
from ..errors import CacheError, ConfigError, DivergenceError, InvalidInputError
from ..integrators import SCHEMES, SchemeRun, evolve
from ..physics import INITIAL_DATA, POTENTIALS, InitialData, Nonlinearity, Potential
from ..spectral import Grid, sobolev_norm
from .config import ExperimentConfig, parse_number
from .study import compute_reference, records_to_csv, run_convergence_study

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _number(text):
    try:
        return parse_number(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    p = _Parser(prog="splitnlse", description="Time-splitting Fourier spectral NLSE solver")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one simulation and print final norms")
    r.add_argument("--scheme", choices=SCHEMES, default="ltfs")
    r.add_argument("--potential", choices=POTENTIALS, default="box4")
    r.add_argument("--initial", choices=INITIAL_DATA, default="gaussian")
    r.add_argument("--beta", type=_number, default=-1.0)
    r.add_argument("--sigma", type=_number, default=1.0)
    r.add_argument("--N", type=int, default=512)
    r.add_argument("--a", type=_number, default=-16.0)
    r.add_argument("--b", type=_number, default=16.0)
    r.add_argument("--tau", type=_number, required=True)
    r.add_argument("--T", type=_number, default=1.0)
    r.add_argument("--q", type=int, default=None, help="oversampling factor")

    for name, hlp in (("reference", "compute or load cached reference solutions"),
                      ("converge", "run a convergence study (CSV + SVG)")):
        c = sub.add_parser(name, help=hlp)
        c.add_argument("--config", required=True)
        c.add_argument("--paper-scale", action="store_true",
                       help="reference at tau_e=1e-6, h_e=2^-9 instead of the desk-scale default")
        c.add_argument("--recompute", action="store_true")
        if name == "converge":
            c.add_argument("--csv")
            c.add_argument("--svg")
            c.add_argument("--zero-timing", action="store_true",
                           help="write wall_seconds as 0 so repeated runs are byte-identical")
            c.add_argument("--workers", type=int, default=1)

    o = sub.add_parser("rco", help="tabulate |delta_l|, |S_nl| and their product as CSV")
    o.add_argument("--N", type=int, default=512)
    o.add_argument("--a", type=_number, default=-16.0)
    o.add_argument("--b", type=_number, default=16.0)
    g = o.add_mutually_exclusive_group(required=True)
    g.add_argument("--tau", type=_number)
    g.add_argument("--tau-over-cfl", type=_number, help="tau as a multiple of h^2/pi")
    o.add_argument("--n", type=int, default=1000)
    o.add_argument("--out", help="CSV path (default: stdout)")

    s = sub.add_parser("selftest", help="run the randomized invariant suite")
    s.add_argument("--seed", type=int, default=0)
    return p


def _cmd_run(args):
    grid = Grid(args.a, args.b, args.N)
    run = SchemeRun(args.scheme, args.tau, args.T, grid, Potential(args.potential),
                    Nonlinearity(args.beta, args.sigma), InitialData(args.initial), args.q)
    traj = evolve(run, [0.0, run.T])
    psi0, psi = traj.snapshots[0][1], traj.final
    m0, m1 = sobolev_norm(psi0, 0), sobolev_norm(psi, 0)
    print(f"scheme={run.scheme} potential={args.potential} N={grid.N} tau={run.tau!r} "
          f"steps={run.n_steps} q={run.oversample_q} wall={traj.wall_time:.2f}s")
    print(f"L2 norm: initial={m0!r} final={m1!r}")
    print(f"H1 norm: final={sobolev_norm(psi, 1)!r}")
    print(f"mass drift (relative): {abs(m1 * m1 - m0 * m0) / (m0 * m0):.3e}")
    print(f"L2 distance travelled: {error_norms(psi, psi0, 0)!r}")
    return EXIT_OK


def _load_config(args, **overrides):
    cfg = ExperimentConfig.from_file(args.config, **overrides)
    return cfg.with_paper_scale() if args.paper_scale else cfg


def _cmd_reference(args):
    cfg = _load_config(args)
    for s in cfg.sigmas:
        ref = compute_reference(cfg, s, recompute=args.recompute)
        print(f"sigma={s!r}: {ref.path}")
    return EXIT_OK


def _cmd_converge(args):
    overrides = {}
    for key in ("csv", "svg"):
        if getattr(args, key):
            overrides[key] = getattr(args, key)
    if args.zero_timing:
        overrides["zero_timing"] = True
    cfg = _load_config(args, **overrides)
    if args.recompute:
        for s in cfg.sigmas:
            compute_reference(cfg, s, recompute=True)
    records = run_convergence_study(cfg, workers=args.workers)
    if not cfg.csv:
        sys.stdout.write(records_to_csv(records))
    else:
        print(f"wrote {len(records)} records to {cfg.csv}")
    if cfg.svg:
        print(f"wrote plot {cfg.svg}")
    return EXIT_OK


def _cmd_rco(args):
    grid = Grid(args.a, args.b, args.N)
    tau = args.tau if args.tau is not None else args.tau_over_cfl * grid.h ** 2 / math.pi
    table = rco_diagnostics(grid, tau, args.n)
    text = table.to_csv(args.out)
    if args.out is None:
        sys.stdout.write(text)
    bound = math.pi * tau / 2
    print(f"# tau={tau!r} max_product={table.max_product!r} pi*tau/2={bound!r} "
          f"cfl={'yes' if tau < grid.h ** 2 / math.pi else 'no'}", file=sys.stderr)
    return EXIT_OK


def _cmd_selftest(args):
    from ..selftest import run_selftest

    return EXIT_OK if run_selftest(args.seed) else EXIT_CONFIG


COMMANDS = {"run": _cmd_run, "reference": _cmd_reference, "converge": _cmd_converge,
            "rco": _cmd_rco, "selftest": _cmd_selftest}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, InvalidInputError, CacheError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
