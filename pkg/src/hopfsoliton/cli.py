"""Command-line front end: ``solve``, ``invariant``, ``link``, ``verify`` and ``export``.

Exit codes: 0 success, 1 usage or input error, 2 solver non-convergence,
3 verification failure. Every run writes ``manifest.json`` into ``--out``;
``--manifest PATH`` replays a previous run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, ansatz, checks, io, plotting
from .errors import HopfSolitonError, NonConvergence, SingularJacobian
from .hopf import (
    DeformedMapSpec,
    S3Grid,
    deformed_invariant,
    deformed_invariant_reduced,
    gauss_linking,
    hopf_invariant_cs,
    hopf_invariant_forms,
    preimage_circle,
)
from .profiles import ModelParams
from .solver import SolverConfig, newton_solve

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_VERIFY = 0, 1, 2, 3
COINCIDENT_TOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _vector3(text):
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}") from None
    if v.shape != (3,):
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--workers", type=int, default=1, help="threads for quadratures")
    common.add_argument("--seed", type=int, default=0, help="seed for random sample points")
    common.add_argument("--manifest", help="replay the run recorded in this manifest.json")

    parser = _Parser(prog="hopfsoliton", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="solve the radial profile equations")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--rc", type=float, default=50.0, help="cutoff radius")
    p.add_argument("--n", type=int, default=2000, help="interior mesh nodes")
    p.add_argument("--tol", type=float, default=1e-10, help="residual max-norm tolerance")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--guess", choices=("rational", "tanh"), default="rational")
    p.add_argument("--mesh", choices=("uniform", "graded"), default="uniform")

    p = sub.add_parser("invariant", parents=[common], help="Hopf invariant by quadrature")
    p.add_argument("--grid", type=int, default=64, help="cells per dimension")
    p.add_argument("--map", choices=("hopf", "deformed"), default="hopf")
    p.add_argument("--profile", help="profile CSV for the boundary Chern-Simons integral")
    p.add_argument("--radius", type=float, help="boundary radius (default: profile end, or 1)")

    p = sub.add_parser("link", parents=[common], help="Gauss linking number of two fibres")
    p.add_argument("--p", type=_vector3, default=_vector3("0,0,1"))
    p.add_argument("--q", type=_vector3, default=_vector3("0,0,-1"))
    p.add_argument("--samples", type=int, default=512)

    p = sub.add_parser("verify", parents=[common], help="identity and consistency checks")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--profile", help="profile CSV used for the field checks")

    p = sub.add_parser("export", parents=[common], help="plot data as CSV plus PNG figures")
    p.add_argument("--what", choices=("fg", "density", "fibers", "fields"), required=True)
    p.add_argument("--profile", help="profile CSV (solved with defaults when omitted)")
    p.add_argument("--p", type=_vector3, default=_vector3("0,0,1"))
    p.add_argument("--q", type=_vector3, default=_vector3("0,0,-1"))
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--points", type=int, default=100, help="sample points for --what fields")
    return parser


# ---------------------------------------------------------------------------
# subcommands


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_profile(path):
    if not Path(path).is_file():
        raise UsageError(f"profile file not found: {path}")
    return io.read_profile_csv(path)


def cmd_solve(args, out):
    config = SolverConfig(
        r_c=args.rc, n=args.n, lam=args.lam, tol=args.tol, max_iter=args.max_iter, guess=args.guess, mesh=args.mesh
    )
    try:
        config.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    code = EXIT_OK
    try:
        report = newton_solve(config)
    except NonConvergence as exc:
        report = exc.report
        print(f"solver did not converge: {exc}", file=sys.stderr)
        code = EXIT_NONCONVERGED
    except SingularJacobian as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED, [], []
    io.write_profile_csv(out / "profile.csv", report.profile)
    io.write_json(out / "report.json", report.to_dict())
    plotting.plot_profiles(out / "profile.png", report.profile.r, report.profile.f_nodes, report.profile.g_nodes)
    plotting.plot_history(out / "newton_history.png", report.history)
    print(
        f"converged={report.converged} iterations={report.iterations} residual={report.residual_norm:.3e} "
        f"action={report.action:.12g} s_f={report.s_f:.6g} s_g={report.s_g:.6g}"
    )
    outputs = ["profile.csv", "report.json", "profile.png", "newton_history.png"]
    return code, outputs, []


def cmd_invariant(args, out):
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    result = {"map": args.map, "grid": args.grid}
    inputs = []
    if args.map == "hopf":
        grid = S3Grid.cube(args.grid)
        grid.check_resolution()
        forms = hopf_invariant_forms(grid, workers=args.workers)
        cs = hopf_invariant_cs(grid, workers=args.workers)
        prof = None
        if args.profile:
            prof = _load_profile(args.profile)
            inputs.append(str(args.profile))
        radius = args.radius if args.radius is not None else (prof.r_max if prof is not None else 1.0)
        if radius <= 0:
            raise UsageError("--radius must be positive")
        boundary = ansatz.boundary_hopf_number(prof, grid, radius, workers=args.workers)
        result.update(
            forms=forms,
            cs=cs,
            boundary_cs=boundary,
            radius=radius,
            diff_forms_cs=forms - cs,
            diff_forms_boundary=forms - boundary,
            diff_cs_boundary=cs - boundary,
        )
        print(f"forms       = {forms:.15f}")
        print(f"cs          = {cs:.15f}")
        print(f"boundary_cs = {boundary:.15f}  (R = {radius:g})")
        print(f"forms - cs = {forms - cs:.3e}, forms - boundary = {forms - boundary:.3e}")
    else:
        n = args.grid
        spec = DeformedMapSpec(n_r=4 * n, n_theta=4 * n, n_x3=n)
        spec.check_resolution()
        value = deformed_invariant(spec, workers=args.workers)
        reduced = deformed_invariant_reduced(spec)
        result.update(deformed=value, reduced=reduced, diff=value - reduced, r_max=spec.r_max)
        print(f"deformed = {value:.15f}")
        print(f"reduced  = {reduced:.15f}  (difference {value - reduced:.3e})")
    io.write_json(out / "invariant.json", result)
    return EXIT_OK, ["invariant.json"], inputs


def cmd_link(args, out):
    if args.samples < 16:
        raise UsageError("--samples must be at least 16")
    if np.linalg.norm(args.p - args.q) <= COINCIDENT_TOL:
        raise UsageError("base points coincide; their fibres are the same curve")
    c1 = preimage_circle(args.p, args.samples)
    c2 = preimage_circle(args.q, args.samples)
    value = gauss_linking(c1, c2)
    io.write_json(
        out / "link.json", {"p": args.p.tolist(), "q": args.q.tolist(), "samples": args.samples, "linking": value}
    )
    print(f"linking = {value:.12f}")
    return EXIT_OK, ["link.json"], []


def cmd_verify(args, out):
    if args.points < 1:
        raise UsageError("--points must be positive")
    prof = None
    inputs = []
    if args.profile:
        prof = _load_profile(args.profile)
        inputs.append(str(args.profile))
    results = checks.run_checks(args.points, args.seed, prof)
    print(f"{'check':<28s} {'max resid':>11s} {'tol':>9s}  status")
    for res in results:
        print(res.row())
    ok = all(r.passed for r in results)
    io.write_json(
        out / "verify.json",
        {
            "points": args.points,
            "seed": args.seed,
            "checks": [{"name": r.name, "max_residual": r.max_residual, "tolerance": r.tolerance, "passed": r.passed} for r in results],
            "all_passed": ok,
        },
    )
    return (EXIT_OK if ok else EXIT_VERIFY), ["verify.json"], inputs


def _export_profile(args):
    if args.profile:
        return _load_profile(args.profile), [str(args.profile)]
    return newton_solve(SolverConfig()).profile, []


def cmd_export(args, out):
    outputs, inputs = [], []
    if args.what == "fg":
        prof, inputs = _export_profile(args)
        io.write_csv(out / "fg_vs_r.csv", ["r", "f", "g"], [prof.r, prof.f_nodes, prof.g_nodes])
        plotting.plot_profiles(out / "fg_vs_r.png", prof.r, prof.f_nodes, prof.g_nodes, r_max=min(prof.r_max, 10.0))
        outputs = ["fg_vs_r.csv", "fg_vs_r.png"]
    elif args.what == "density":
        prof, inputs = _export_profile(args)
        r = prof.r[prof.r >= ansatz.R_MIN]
        kin, gauge, pot = ansatz.action_density_terms(r, prof, ModelParams())
        io.write_density_csv(out / "density_vs_r.csv", r, kin, gauge, pot)
        plotting.plot_density(out / "density_vs_r.png", r, kin, gauge, pot)
        outputs = ["density_vs_r.csv", "density_vs_r.png"]
    elif args.what == "fibers":
        if args.samples < 16:
            raise UsageError("--samples must be at least 16")
        curves = [preimage_circle(args.p, args.samples), preimage_circle(args.q, args.samples)]
        for label, curve in zip(("p", "q"), curves):
            curve.to_csv(out / f"fiber_{label}.csv")
        plotting.plot_fibers(out / "fibers.png", curves, ["p", "q"])
        outputs = ["fiber_p.csv", "fiber_q.csv", "fibers.png"]
    else:
        prof, inputs = _export_profile(args)
        pts = checks.random_points(args.points, args.seed, r_min=0.5, r_max=min(5.0, 0.9 * prof.r_max))
        sample = ansatz.eval_fields(pts, prof)
        io.write_field_csv(out / "fields.csv", pts, sample.phi, sample.A)
        outputs = ["fields.csv"]
    print("wrote " + ", ".join(outputs))
    return EXIT_OK, outputs, inputs


COMMANDS = {"solve": cmd_solve, "invariant": cmd_invariant, "link": cmd_link, "verify": cmd_verify, "export": cmd_export}


def _resolved_argv(args):
    """Canonical argument list reproducing ``args`` (without --out and --manifest)."""
    argv = [args.command]
    for key, value in sorted(vars(args).items()):
        if key in ("command", "out", "manifest") or value is None:
            continue
        flag = "--lambda" if key == "lam" else "--" + key.replace("_", "-")
        if isinstance(value, np.ndarray):
            value = ",".join(repr(float(v)) for v in value)
        argv += [flag, str(value)]
    return argv


def _parameters(args):
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "manifest"):
            continue
        params[key] = value.tolist() if isinstance(value, np.ndarray) else value
    return params


def write_manifest(out, args, outputs, inputs, exit_code):
    manifest = {
        "subcommand": args.command,
        "parameters": _parameters(args),
        "argv": _resolved_argv(args),
        "inputs": inputs,
        "outputs": outputs,
        "seed": args.seed,
        "version": __version__,
        "exit_code": exit_code,
    }
    io.write_json(out / "manifest.json", manifest)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    if args.manifest:
        try:
            recorded = io.read_json(args.manifest)
            replay = list(recorded["argv"])
        except (OSError, ValueError, KeyError) as exc:
            print(f"cannot replay manifest {args.manifest}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        out = args.out if "--out" in (argv if argv is not None else sys.argv[1:]) else recorded["parameters"]["out"]
        try:
            args = parser.parse_args(replay + ["--out", out])
        except SystemExit as exc:
            return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.workers < 1:
        print("--workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        out = _out_dir(args)
        code, outputs, inputs = COMMANDS[args.command](args, out)
    except (UsageError, HopfSolitonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_manifest(out, args, outputs, inputs, code)
    return code


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
