"""quasiground: solvers, sweeps, limit checks and the acceptance suite from the shell.

Usage:
    quasiground branch --N 1 --p 9 --lambda-min 0.01 --lambda-max 1000 --points 25 --out run
    quasiground free-boundary --N 1 --p 9
    quasiground zero-mass --N 5 --p 6
    quasiground minimize --N 1 --p 9 --a 3.0
    quasiground limit-check small-mass --N 1 --p 9
    quasiground verify --criteria 1 2 3

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 failed check.
A ``--config`` file of ``key = value`` lines supplies defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import acceptance, curves, direct_minimizer, shooting
from .dual_transform import ConvergenceError
from .radial_field import ParameterError, Params, functionals, read_profile_csv
from .report import Report

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3

log = logging.getLogger("quasiground")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for numerical failure here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use the long flag names."""
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_common(sp, lam=False):
    sp.add_argument("--config", help="key = value file with default options")
    sp.add_argument("--N", type=int, required=False)
    sp.add_argument("--p", type=float, required=False)
    sp.add_argument("--out", type=Path, default=None, help="output directory")
    sp.add_argument("--rtol", type=float, default=None, help="integrator relative tolerance")
    sp.add_argument("--grid-growth", type=float, default=None, help="geometric grid growth factor")
    sp.add_argument("-v", "--verbose", action="store_true")
    if lam:
        sp.add_argument("--lambda-min", type=float, default=None)
        sp.add_argument("--lambda-max", type=float, default=None)
        sp.add_argument("--points", type=int, default=None)
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")


def build_parser() -> _Parser:
    parser = _Parser(prog="quasiground", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("branch", help="sweep lambda and tabulate (lambda, a, M)")
    _add_common(sp, lam=True)

    sp = sub.add_parser("zero-mass", help="zero-mass solution u0 and a0")
    _add_common(sp)

    sp = sub.add_parser("free-boundary", help="overdetermined free-boundary limit problem")
    _add_common(sp)

    sp = sub.add_parser("semilinear", help="semilinear ground state W")
    _add_common(sp)

    sp = sub.add_parser("minimize", help="direct minimisation of the reduced energy at mass a")
    _add_common(sp)
    sp.add_argument("--a", type=float, default=None, help="prescribed mass")
    sp.add_argument("--init", type=Path, default=None, help="initial profile CSV (r,value)")
    sp.add_argument("--knots", type=int, default=12)
    sp.add_argument("--max-evals", type=int, default=4000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("limit-check", help="limit regimes along the branch")
    sp.add_argument("kind", choices=["small-mass", "large-mass", "critical", "a0"])
    _add_common(sp, lam=True)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--criteria", type=int, nargs="*", default=None, choices=sorted(acceptance.CRITERIA))
    sp.add_argument("--out", type=Path, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--config", help="key = value file with default options")
    sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cfg = read_config(known.config)
        # defaults for the chosen subcommand; flags on the command line override them
        sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        for name, sp in sub_action.choices.items():
            dests = {a.dest for a in sp._actions}
            unknown = set(cfg) - dests
            if name in argv and unknown:
                raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
            sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests})
    args = parser.parse_args(argv)
    return args


def _params(args) -> Params:
    if args.N is None or args.p is None:
        raise UsageError("--N and --p are required")
    return Params(args.N, args.p)


def _options(args) -> shooting.ShootingOptions:
    opts = shooting.DEFAULT_OPTIONS
    if args.rtol is not None:
        opts = replace(opts, rtol=args.rtol)
    if args.grid_growth is not None:
        opts = replace(opts, grid_growth=args.grid_growth)
    return opts


def _lambdas(args, lo, hi, n):
    lo = args.lambda_min if args.lambda_min is not None else lo
    hi = args.lambda_max if args.lambda_max is not None else hi
    n = args.points if args.points is not None else n
    if not (0 < lo < hi) or n < 2:
        raise UsageError("need 0 < lambda-min < lambda-max and at least 2 points")
    return np.geomspace(lo, hi, n)


def _outdir(args) -> Path | None:
    if args.out is None:
        return None
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _emit(rep: Report, out: Path | None, fname: str) -> int:
    for line in rep.lines():
        print(line)
    if out is not None:
        rep.write_json(out / fname)
    return EXIT_OK if rep.passed else EXIT_CHECK


def _write_json(path: Path, record: dict) -> None:
    path.write_text(json.dumps(record, indent=2, sort_keys=True, default=float) + "\n")


# --------------------------------------------------------------------------
# subcommands


def cmd_branch(args) -> int:
    params = _params(args)
    lams = _lambdas(args, 1e-2, 1e3, 25)
    table = curves.branch_sweep(params, lams, _options(args), jobs=args.jobs)
    out = _outdir(args)
    if out is not None:
        table.to_csv(out / "branch.csv")
    print(f"branch N={params.N} p={params.p:g}: {len(table.points)} points, a in [{table.a.min():.6g}, {table.a.max():.6g}]")
    return _emit(curves.branch_structure_report(table), out, "branch_report.json")


def cmd_zero_mass(args) -> int:
    params = _params(args)
    zm = shooting.shoot_zero_mass(params, _options(args))
    print(f"alpha = {zm.alpha:.12g}  a0 = {zm.a0:.10g}  decay exponent = {zm.decay_exponent:.4f}  R_max = {zm.r_max:g}")
    out = _outdir(args)
    if out is not None:
        shooting.dump_trajectory(
            zm.trajectory, out / "zero_mass_v", a0=zm.a0, tail_constant=zm.tail_constant,
            decay_exponent=zm.decay_exponent, r_max=zm.r_max,
        )
        zm.u0.to_csv(out / "zero_mass_u0.csv")
    if not zm.decay_ok:
        print("warning: fitted decay exponent off target; truncation radius unconverged")
        return EXIT_CHECK
    return EXIT_OK


def cmd_free_boundary(args) -> int:
    params = _params(args)
    fb = shooting.shoot_free_boundary(params, _options(args))
    uq = shooting.check_uniqueness_hypotheses(params)
    print(f"alpha = {fb.alpha:.12g}  R = {fb.R:.12g}  residual = {fb.residual:.3g}")
    if fb.alpha_F_root is not None:
        print(f"root of F(alpha) = 0: {fb.alpha_F_root:.12g}")
    print(f"edge slope of u_bar (reported only) = {fb.edge_slope_u_bar:.6g}")
    print(f"hypotheses: H1={uq.h1_ok} H2={uq.h2_ok} H'4={uq.hprime4_ok}")
    out = _outdir(args)
    if out is not None:
        fb.v_tilde.to_csv(out / "free_boundary.csv")
        _write_json(out / "free_boundary.json", {
            "alpha": fb.alpha, "R": fb.R, "residual": fb.residual, "alpha_F_root": fb.alpha_F_root,
            "edge_slope_u_bar": fb.edge_slope_u_bar, "h1_ok": uq.h1_ok, "h2_ok": uq.h2_ok,
            "hprime4_ok": uq.hprime4_ok,
        })
    ok = fb.residual <= 1e-7 * fb.alpha and uq.h1_ok and uq.h2_ok
    return EXIT_OK if ok else EXIT_CHECK


def cmd_semilinear(args) -> int:
    params = _params(args)
    traj = shooting.shoot_semilinear(params, _options(args))
    fv = functionals(traj.profile, params)
    print(f"W(0) = {traj.alpha:.12g}  |W|_2^2 = {fv.mass:.10g}  |grad W|_2^2 = {fv.kinetic:.10g}")
    out = _outdir(args)
    if out is not None:
        shooting.dump_trajectory(traj, out / "semilinear", mass=fv.mass, kinetic=fv.kinetic)
    return EXIT_OK


def cmd_minimize(args) -> int:
    params = _params(args)
    if args.a is None:
        raise UsageError("--a is required")
    init = read_profile_csv(args.init, params.N) if args.init else direct_minimizer.gaussian_init(params.N, args.a)
    opts = direct_minimizer.MinimizeOptions(knots=args.knots, max_evals=args.max_evals, seed=args.seed)
    if args.grid_growth is not None:
        opts.grid_growth = args.grid_growth
    res = direct_minimizer.minimize_reduced(params, args.a, init, opts)
    print(f"a = {args.a:.10g}  M_hat = {res.M_hat:.12g}  converged = {res.converged}  iterations = {res.iterations}")
    out = _outdir(args)
    if out is not None:
        res.write(out / "minimize")
    return EXIT_OK


def cmd_limit_check(args) -> int:
    params = _params(args)
    opts = _options(args)
    out = _outdir(args)
    kind = args.kind
    if kind == "small-mass":
        fb = shooting.shoot_free_boundary(params, opts)
        lams = _lambdas(args, 1e2, 1e4, 3)
        checks = [
            curves.small_mass_limit_check(params, curves.branch_point(params, lam, opts, keep_profile=True), fb)
            for lam in lams
        ]
        return _emit(curves.small_mass_series_report(checks), out, "small_mass.json")
    if kind == "large-mass":
        W = curves.SemilinearNorms.from_trajectory(shooting.shoot_semilinear(params, opts), params)
        table = curves.branch_sweep(params, _lambdas(args, 1e-12, 1e-9, 8), opts, jobs=args.jobs, check_span=False)
        if out is not None:
            table.to_csv(out / "branch_large_mass.csv")
        return _emit(curves.large_mass_asymptotics(params, table, W), out, "large_mass.json")
    if kind == "critical":
        lams = _lambdas(args, 1e-5, 1e-2, 4)
        items = [
            curves.critical_rescale(params, curves.branch_point(params, lam, opts, keep_profile=True))
            for lam in lams
        ]
        return _emit(curves.critical_series_report(items), out, "critical.json")
    # a0
    if params.N < 5:
        raise ParameterError("a0 is finite only for N >= 5")
    zm = shooting.shoot_zero_mass(params, opts)
    table = curves.branch_sweep(params, _lambdas(args, 1e-5, 1e-1, 9), opts, jobs=args.jobs, zero_mass=zm)
    if out is not None:
        table.to_csv(out / "branch_a0.csv")
    return _emit(curves.estimate_a0(params, table, zm).report, out, "a0.json")


def cmd_verify(args) -> int:
    reports = acceptance.run_acceptance(args.criteria, jobs=args.jobs, out_dir=args.out)
    failed = [k for k, rep in reports.items() if not rep.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} criteria passed")
    return EXIT_OK if not failed else EXIT_CHECK


COMMANDS = {
    "branch": cmd_branch,
    "zero-mass": cmd_zero_mass,
    "free-boundary": cmd_free_boundary,
    "semilinear": cmd_semilinear,
    "minimize": cmd_minimize,
    "limit-check": cmd_limit_check,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except UsageError as exc:
        print(f"quasiground: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"quasiground: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"quasiground: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"quasiground: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
