"""Command-line front end: ``quadsolve classify|reduce|solve|monodromy|iso|newton|plot``.

Exit codes: 0 success, 2 bad input, 3 not algebraically solvable (not covered),
4 oracle deviation above ``--tol``, 5 degenerate initial data, 6 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import GaussianRational
from .algsolve import (
    BranchCollision,
    DegenerateInitialData,
    NotSolvable,
    SingularTime,
    branch_times,
    build_solution,
    exc_solve,
    plan_for,
    solve_ivp,
)
from .canonical import (
    DegenerateOrbit,
    Exc3,
    GeneralSystem,
    IrreducibleSystem,
    Nor,
    NumericallyDegenerate,
    Uncoupled,
    equivalence_orbit,
    reduce_to_canonical,
)
from .classify import classify
from .oracle import PoleApproach, PoleOnLoop, StepUnderflow, monodromy, sample_path
from .reports import (
    DescriptorError,
    cjson,
    descriptor_of,
    load_descriptor,
    read_columns,
    read_trajectory_csv,
    write_columns,
    write_report,
    write_trajectory_csv,
)

log = logging.getLogger("quadsolve")

EXIT_OK, EXIT_INPUT, EXIT_NOT_ALGEBRAIC, EXIT_DEVIATION, EXIT_DEGENERATE, EXIT_SOLVER = 0, 2, 3, 4, 5, 6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _canonical(obj):
    """Return ``(form, T)`` with ``x = T y``; ``T`` is None for canonical input."""
    if isinstance(obj, Nor):
        return obj, None
    try:
        red = reduce_to_canonical(obj, tol=1e-10)
    except (NumericallyDegenerate, IrreducibleSystem) as exc:
        raise CliError(f"reduction failed: {exc}", EXIT_SOLVER) from exc
    return red.form, red.transform


def _system(obj) -> GeneralSystem:
    return obj if isinstance(obj, GeneralSystem) else obj.system()


def _load(args):
    try:
        return load_descriptor(args.input)
    except DescriptorError as exc:
        raise CliError(f"bad descriptor: {exc}", EXIT_INPUT) from exc


# -- classify / reduce --------------------------------------------------------------


def cmd_classify(args) -> int:
    obj = _load(args)
    form, T = _canonical(obj)
    verdict = classify(form)
    body = {"input": descriptor_of(obj), "form": form.to_json(), "classification": verdict.to_json()}
    if T is not None:
        body["transform"] = T.to_json()
    print(f"form: {form.to_json()}")
    print(f"verdict: {verdict}")
    if verdict.exponents is not None:
        ex = verdict.exponents
        print(f"nu_plus: {ex.nu_plus}  nu_minus: {ex.nu_minus}")
    for a, b in verdict.orbit:
        print(f"orbit: A={a}  B2={b}")
    if verdict.finite_sheets is False:
        print("note: complex exponents, sheets not finite")
    if args.out:
        write_report(_outdir(args) / "classify.json", "classify", body)
    return EXIT_OK if verdict.is_algebraic else EXIT_NOT_ALGEBRAIC


def cmd_reduce(args) -> int:
    obj = _load(args)
    if isinstance(obj, Nor):
        obj = obj.system()
    red = reduce_to_canonical(obj, tol=args.tol if args.tol else 1e-10)
    print(f"form: {red.form.to_json()}")
    print("transform (x = T y):")
    for row in red.transform.matrix:
        print("  " + "  ".join(f"{complex(v):.12g}" for v in row))
    if red.degenerate_pattern:
        print(f"pattern: {red.degenerate_pattern}")
    body = {"input": descriptor_of(obj), "form": red.form.to_json(), "transform": red.transform.to_json(),
            "exact": red.exact, "line": red.line, "pattern": red.degenerate_pattern}
    if isinstance(red.form, Nor):
        try:
            body["orbit"] = [{"A": str(a), "B2": str(b)} for a, b in equivalence_orbit(red.form.A, red.form.Bsq)]
        except DegenerateOrbit:
            body["orbit"] = None
    if args.out:
        write_report(_outdir(args) / "reduce.json", "reduce", body)
    return EXIT_OK


# -- solve ------------------------------------------------------------------------------


def _solve_canonical(form, y0, times):
    if isinstance(form, (Exc3, Uncoupled)):
        return [exc_solve(form, y0[0], y0[1], t) for t in times]
    return solve_ivp(form, y0[0], y0[1], times)


def cmd_solve(args) -> int:
    obj = _load(args)
    sys_ = _system(obj)
    form, T = _canonical(obj)
    x0 = (args.x10, args.x20)
    times = [complex(args.t_end) * s for s in np.linspace(0.0, 1.0, args.steps + 1)]
    out = _outdir(args)
    body = {"input": descriptor_of(obj), "x0": [cjson(v) for v in x0], "form": form.to_json()}
    verdict = classify(form)
    body["classification"] = verdict.to_json()
    states = None
    if not args.oracle_only:
        y0 = x0 if T is None else T.solve(x0)
        try:
            ys = _solve_canonical(form, y0, times)
        except DegenerateInitialData as exc:
            print(f"degenerate initial data: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
        except NotSolvable as exc:
            print(f"{exc}; rerun with --oracle-only", file=sys.stderr)
            return EXIT_NOT_ALGEBRAIC
        except (SingularTime, BranchCollision) as exc:
            print(f"{type(exc).__name__} at t={exc.t}: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        states = ys if T is None else [T.apply(y) for y in ys]
        if isinstance(form, Nor):
            plan = plan_for(form)
            sol = build_solution(plan.exponents, *(y0 if plan.transform is None else plan.transform.solve(y0)))
            body["solution"] = sol.to_json()
    oracle = None
    if args.oracle_check or args.oracle_only or states is None:
        try:
            oracle = sample_path(sys_.rhs(), x0, times)
        except (PoleApproach, StepUnderflow) as exc:
            print(f"oracle stopped: {exc}", file=sys.stderr)
            return EXIT_SOLVER
    code = EXIT_OK
    if states is not None and oracle is not None:
        dev = max(max(abs(a - b) for a, b in zip(s, o)) / max(max(abs(v) for v in o), 1e-300)
                  for s, o in zip(states, oracle))
        body["oracle_deviation"] = dev
        print(f"max relative deviation from oracle: {dev:.3e}")
        if dev > args.tol:
            code = EXIT_DEVIATION
    files = {}
    primary = states if states is not None else oracle
    if args.emit == "csv":
        write_trajectory_csv(out / "trajectory.csv", times, primary)
        files["trajectory"] = "trajectory.csv"
        if oracle is not None and states is not None:
            write_trajectory_csv(out / "oracle.csv", times, oracle)
            files["oracle"] = "oracle.csv"
    else:
        body["trajectory"] = [[cjson(t), cjson(a), cjson(b)] for t, (a, b) in zip(times, primary)]
    if not args.no_plot:
        from .plotting import plot_trajectory

        plot_trajectory(out / "trajectory.png", times, primary, oracle if states is not None else None)
        files["figure"] = "trajectory.png"
    body["files"] = files
    write_report(out / "report.json", "solve", body)
    print(f"wrote {out / 'report.json'}")
    return code


# -- monodromy ------------------------------------------------------------------------


def cmd_monodromy(args) -> int:
    obj = _load(args)
    sys_ = _system(obj)
    x0 = (args.x10, args.x20)
    center = args.center
    candidates = []
    if center is None:
        form, T = _canonical(obj)
        if not isinstance(form, Nor):
            raise CliError("--center is required for this form", EXIT_INPUT)
        try:
            plan = plan_for(form)
        except NotSolvable as exc:
            raise CliError(f"{exc}; give --center explicitly", EXIT_NOT_ALGEBRAIC) from exc
        y0 = x0 if T is None else T.solve(x0)
        if plan.transform is not None:
            y0 = plan.transform.solve(y0)
        sol = build_solution(plan.exponents, *y0)
        candidates = branch_times(sol)
        if not candidates:
            raise CliError("no finite branch times", EXIT_SOLVER)
        center = min(candidates, key=abs)
    radius = args.radius
    if radius is None:
        others = [abs(c - center) for c in candidates if c != center] + [abs(center)]
        radius = 0.3 * min(o for o in others if o > 0) if any(o > 0 for o in others) else 0.1
    try:
        res = monodromy(sys_.rhs(), x0, center, radius, args.turns, tol=args.tol)
    except PoleOnLoop as exc:
        print(f"pole on loop: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"center={center:.12g} radius={radius:.6g} cycle={res.cycle}")
    body = {"input": descriptor_of(obj), "x0": [cjson(v) for v in x0], "center": cjson(center), "radius": radius,
            "branch_times": [cjson(c) for c in candidates], "monodromy": res.to_json()}
    if args.out:
        write_report(_outdir(args) / "monodromy.json", "monodromy", body)
    return EXIT_OK


# -- iso ----------------------------------------------------------------------------------


def _iso_trial(payload):
    from .transforms import isochronous_variant, measure_period

    coeffs, omega, x0, max_multiple, tol = payload
    isys = isochronous_variant(GeneralSystem(*coeffs), omega)
    r = measure_period(isys, x0, max_multiple=max_multiple, tol=tol)
    return r.n, r.event, r.returns[-1] if r.returns else None


def random_initial(rng: np.random.Generator, n: int, scale: float = 1.0) -> list[tuple[complex, complex]]:
    z = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return [(complex(a) * scale, complex(b) * scale) for a, b in z]


def period_survey(sys_: GeneralSystem, omega: float, trials: int, seed: int, *, max_multiple: int = 24,
                  tol: float = 1e-6, parallel: int = 1, scale: float = 1.0):
    rng = np.random.default_rng(seed)
    x0s = random_initial(rng, trials, scale)
    payloads = [(sys_.numeric(), omega, x0, max_multiple, tol) for x0 in x0s]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as ex:
            results = list(ex.map(_iso_trial, payloads))
    else:
        results = [_iso_trial(p) for p in payloads]
    return x0s, results


def cmd_iso(args) -> int:
    obj = _load(args)
    sys_ = _system(obj)
    tol = args.tol if args.tol else 1e-6
    x0s, results = period_survey(sys_, args.omega, args.trials, args.seed, max_multiple=args.max_multiple,
                                 tol=tol, parallel=args.parallel, scale=args.scale)
    hist: dict = {}
    for n, _, _ in results:
        hist[n] = hist.get(n, 0) + 1
    hist = dict(sorted(hist.items(), key=lambda kv: (kv[0] is None, kv[0] or 0)))
    for n, c in hist.items():
        print(f"period {n if n is not None else 'fail'}T: {c}")
    out = _outdir(args)
    write_columns(out / "periods.csv", ["trial", "n", "re_x10", "im_x10", "re_x20", "im_x20"],
                  [list(range(len(x0s))), [n if n is not None else -1 for n, _, _ in results],
                   [x[0].real for x in x0s], [x[0].imag for x in x0s], [x[1].real for x in x0s],
                   [x[1].imag for x in x0s]])
    if not args.no_plot:
        from .plotting import plot_period_histogram

        plot_period_histogram(out / "periods.png", hist)
    events = [{"trial": i, "event": ev} for i, (n, ev, _) in enumerate(results) if n is None]
    body = {"input": descriptor_of(obj), "omega": args.omega, "trials": args.trials, "seed": args.seed,
            "max_multiple": args.max_multiple, "tol": tol,
            "histogram": {("fail" if k is None else str(k)): v for k, v in hist.items()},
            "events": events, "files": {"periods": "periods.csv", "figure": "periods.png"}}
    write_report(out / "report.json", "iso", body)
    return EXIT_OK


# -- newton ---------------------------------------------------------------------------------


def cmd_newton(args) -> int:
    from .transforms import newton_from_k, newton_reduce, newton_solve

    if (args.A is None) == (args.k is None):
        raise CliError("give exactly one of --A or --k", EXIT_INPUT)
    try:
        ns = newton_reduce(GaussianRational.parse(args.A)) if args.A is not None else newton_from_k(Fraction(args.k))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    times = np.linspace(0, args.t_end, args.steps + 1)
    traj = newton_solve(ns, args.z0, args.zdot0, times, route=args.route)
    print(f"k={ns.k} family={ns.family} n={ns.n} route={traj.route} energy drift={traj.energy_drift:.3e}")
    out = _outdir(args)
    write_columns(out / "newton.csv", ["t", "re_z", "im_z", "re_zdot", "im_zdot"],
                  [times.real, traj.z.real, traj.z.imag, traj.zdot.real, traj.zdot.imag])
    body = {"k": str(ns.k), "A": str(ns.A), "family": ns.family, "n": ns.n, "route": traj.route,
            "z0": cjson(args.z0), "zdot0": cjson(args.zdot0), "energy_drift": traj.energy_drift,
            "files": {"trajectory": "newton.csv"}}
    if not args.no_plot:
        from .plotting import plot_trajectory

        plot_trajectory(out / "newton.png", times, list(zip(traj.z, traj.zdot)), labels=("z", "dz/dt"),
                        title=f"k = {ns.k}")
        body["files"]["figure"] = "newton.png"
    write_report(out / "report.json", "newton", body)
    return EXIT_OK


# -- plot -------------------------------------------------------------------------------------


def cmd_plot(args) -> int:
    from . import plotting

    out = _outdir(args)
    if args.kind == "fig1":
        from .transforms import verify_case34

        rep = verify_case34(args.x10, args.x20, [1.0, 2.0], trace_end=args.t_end)
        write_columns(out / "fig1.txt", ["t", "ln_abs_x1_sq"], [rep.times, rep.log_abs_x1_sq])
        plotting.plot_trace(out / "fig1.png", rep.times, rep.log_abs_x1_sq, rep.peaks, rep.median)
        print(f"z'' + 4 z^2 residual {rep.residual:.3e}; {rep.n_peaks} peaks above median + ln 3")
        write_report(out / "fig1.json", "plot", {"kind": "fig1", "x0": [cjson(args.x10), cjson(args.x20)],
                                                 "residual": rep.residual, "peaks": rep.peaks,
                                                 "median": rep.median, "events": rep.events,
                                                 "files": {"trace": "fig1.txt", "figure": "fig1.png"}})
        return EXIT_OK
    if args.source is None:
        raise CliError("--from is required for this plot kind", EXIT_INPUT)
    if args.kind == "trajectory":
        times, states = read_trajectory_csv(args.source)
        target = out / (Path(args.source).stem + ".png")
        plotting.plot_trajectory(target, times, states)
    else:
        header, cols = read_columns(args.source)
        ns = [int(v) for v in cols[header.index("n")]]
        hist: dict = {}
        for n in ns:
            key = n if n > 0 else None
            hist[key] = hist.get(key, 0) + 1
        target = out / (Path(args.source).stem + ".png")
        plotting.plot_period_histogram(target, hist)
    print(f"wrote {target}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadsolve", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"quadsolve {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", default="-", help="system descriptor JSON file, or - for stdin")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--parallel", type=int, default=1)
    common.add_argument("--no-plot", action="store_true", help="skip PNG output")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", parents=[common], help="solvability verdict")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("reduce", parents=[common], help="canonical form and transform")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("solve", parents=[common], help="solve an initial-value problem")
    sp.add_argument("--x10", type=_complex, required=True)
    sp.add_argument("--x20", type=_complex, required=True)
    sp.add_argument("--t-end", type=_complex, default=1.0)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--oracle-check", action="store_true")
    sp.add_argument("--oracle-only", action="store_true")
    sp.add_argument("--emit", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("monodromy", parents=[common], help="loop around a point of the complex t-plane")
    sp.add_argument("--x10", type=_complex, required=True)
    sp.add_argument("--x20", type=_complex, required=True)
    sp.add_argument("--center", type=_complex, default=None, help="defaults to the nearest branch time")
    sp.add_argument("--radius", type=float, default=None)
    sp.add_argument("--turns", type=int, default=6)
    sp.set_defaults(func=cmd_monodromy)

    sp = sub.add_parser("iso", parents=[common], help="period survey of the isochronous variant")
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--max-multiple", type=int, default=24)
    sp.add_argument("--scale", type=float, default=1.0, help="scale of the random initial data")
    sp.set_defaults(func=cmd_iso)

    sp = sub.add_parser("newton", parents=[common], help="z'' = -A^2 z^k")
    sp.add_argument("--A", default=None)
    sp.add_argument("--k", default=None)
    sp.add_argument("--z0", type=_complex, default=1.0)
    sp.add_argument("--zdot0", type=_complex, default=0.5j)
    sp.add_argument("--t-end", type=float, default=1.0)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--route", choices=("auto", "algebraic", "numeric"), default="auto")
    sp.set_defaults(func=cmd_newton)

    sp = sub.add_parser("plot", parents=[common], help="figures: fig1 trace, trajectory, periods")
    sp.add_argument("--kind", choices=("fig1", "trajectory", "periods"), required=True)
    sp.add_argument("--from", dest="source", default=None, help="CSV written by solve or iso")
    sp.add_argument("--x10", type=_complex, default=0.03 * (0.8 + 0.5j))
    sp.add_argument("--x20", type=_complex, default=0.03 * (-0.3 + 0.6j))
    sp.add_argument("--t-end", type=float, default=1e4)
    sp.set_defaults(func=cmd_plot)
    return p


def _setup_logging() -> None:
    level = os.environ.get("QUADSOLVE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command in ("solve", "iso", "newton", "plot") and args.out is None:
        args.out = "."
    if args.command == "solve" and args.tol is None:
        args.tol = 1e-6
    if args.command == "monodromy" and args.tol is None:
        args.tol = 1e-6
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
