"""Command-line front end.

Subcommands: classify, gamma, transit, return, reproduce, portrait.

Exit codes are fixed so CI harnesses can assert failure modes:
    0  success (any classifier verdict counts as success)
    1  reproduce ran but at least one check failed
    2  parse error / unknown case id
    3  input not in normal form
    4  not a hyperbolic fake saddle
    5  invalid sections or window
    6  no transit / no return

The environment variable FSL_TOL overrides the default quadrature
absolute tolerance and integrator relative tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import asymptotics, casebook, flow
from .normalform import NormalFormField, NotInNormalForm, classify, invariants, \
    validate_and_build
from .polyfield import PlanarField, Poly2

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_PARSE = 2
EXIT_NOT_NORMAL_FORM = 3
EXIT_NOT_HYPERBOLIC = 4
EXIT_BAD_SECTIONS = 5
EXIT_NO_TRANSIT = 6


def _tolerances():
    tol = os.environ.get("FSL_TOL")
    if tol is None:
        return asymptotics.QUAD_ABS_TOL, 1e-10
    val = float(tol)
    return val, val


def _integrator_cfg() -> flow.IntegratorConfig:
    _, rel = _tolerances()
    return flow.IntegratorConfig(rel_tol=rel, abs_tol=rel * 1e-2)


class _InputError(Exception):
    def __init__(self, code, msg):
        self.code = code
        super().__init__(msg)


def _load_json_input(text: str):
    data = json.loads(text)
    if "f1" in data:
        return None, NormalFormField.from_json(data)
    field = PlanarField.from_json(data)
    return field, None


def _resolve_input(args):
    """Return (field, nf) where nf is a NormalFormField when available."""
    sources = [s for s in ("case", "file", "json") if getattr(args, s, None)]
    if len(sources) != 1:
        raise _InputError(EXIT_PARSE,
                          "exactly one of --case / --file / --json is required")
    if args.case:
        return _resolve_case(args)
    try:
        text = Path(args.file).read_text() if args.file else args.json
        field, nf = _load_json_input(text)
    except (OSError, ValueError, KeyError) as exc:
        raise _InputError(EXIT_PARSE, f"cannot parse input: {exc}") from None
    if nf is not None:
        return nf.field(), nf
    return field, None


def _resolve_case(args):
    case = args.case
    if case in ("example6", "figure3"):
        a = Fraction(args.a if args.a is not None else 1)
        b = Fraction(args.b if args.b is not None else -1)
        c = Fraction(args.c if args.c is not None else -1)
        nf = casebook.build_example6(a, b, c)
        return nf.field(), nf
    if case in ("x3", "x4", "xn"):
        n = {"x3": 3, "x4": 4}.get(case, args.n or 4)
        return casebook.build_xn(int(n)), None
    if case == "y1":
        u, v = Poly2.gens()
        p = (u ** 2 + v ** 2 - u ** 3 - 4 * u * v ** 2
             + 6 * u ** 2 * v ** 2 - 4 * u ** 3 * v ** 2 + u ** 4 * v ** 2)
        field = PlanarField(p, u ** 2 * v)
        return field, validate_and_build(field)
    if case == "z-family":
        alpha = args.alpha_param if args.alpha_param is not None else 1.0
        beta = args.beta if args.beta is not None else 1.0
        field = casebook.build_z(float(alpha), float(beta))
        nf = casebook.build_z_normalform(float(alpha), float(beta))
        return field, nf
    raise _InputError(EXIT_PARSE, f"unknown case id {case!r}")


def _need_nf(field, nf):
    if nf is not None:
        return nf
    return validate_and_build(field)


def _emit(args, payload: dict, human_lines):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


# -- subcommands ----------------------------------------------------------------


def cmd_classify(args) -> int:
    field, nf = _resolve_input(args)
    try:
        nf = _need_nf(field, nf)
    except NotInNormalForm as exc:
        print(f"not in normal form: {exc}", file=sys.stderr)
        return EXIT_NOT_NORMAL_FORM
    inv = invariants(nf)
    cls = classify(inv)
    payload = {"invariants": inv.to_json(), "classification": cls.to_json()}
    a, b, c, d = (float(inv.a), float(inv.b), float(inv.c), float(inv.d))
    lines = [f"invariants: a={a:.12g} b={b:.12g} c={c:.12g} d={d:.12g}",
             f"verdict: {cls.verdict.value}"]
    if cls.ratio is not None:
        lines.append(f"hyperbolicity ratio: {float(cls.ratio):.12g}")
    if cls.extra_count is not None:
        lines.append(f"extra divisor singularities: {cls.extra_count} "
                     f"at {list(cls.extra_locations)}")
    _emit(args, payload, lines)
    return EXIT_OK


def _sections_from(args):
    if getattr(args, "infinite", False):
        return None
    if args.alpha is None or args.omega is None:
        raise _InputError(EXIT_BAD_SECTIONS,
                          "need --alpha and --omega (or --infinite)")
    return asymptotics.SectionPair(float(args.alpha), float(args.omega))


def cmd_gamma(args) -> int:
    field, nf = _resolve_input(args)
    try:
        nf = _need_nf(field, nf)
    except NotInNormalForm as exc:
        print(f"not in normal form: {exc}", file=sys.stderr)
        return EXIT_NOT_NORMAL_FORM
    try:
        sections = _sections_from(args)
        report = asymptotics.transition_report(nf, sections)
    except asymptotics.NotHyperbolicFakeSaddle as exc:
        print(f"not a hyperbolic fake saddle: {exc}", file=sys.stderr)
        return EXIT_NOT_HYPERBOLIC
    except (asymptotics.SectionInvalid, asymptotics.TailNotIntegrable) as exc:
        print(f"invalid sections: {exc}", file=sys.stderr)
        return EXIT_BAD_SECTIONS
    lines = [f"PV                = {report.pv:.12g}",
             f"gamma0            = {report.gamma0:.12g}",
             f"gamma_plus        = {report.gamma_plus:.12g}",
             f"gamma_minus       = {report.gamma_minus:.12g}",
             f"delta00 (closed)  = {report.delta00_closed:.12g}",
             f"delta00 (via L)   = "
             + (f"{report.delta00_via_L:.12g}" if report.delta00_via_L
                else "n/a (infinite sections)")]
    _emit(args, report.to_json(), lines)
    return EXIT_OK


def _offsets_from(args):
    if args.offsets:
        return tuple(float(o) for o in args.offsets)
    return None


def cmd_transit(args) -> int:
    field, nf = _resolve_input(args)
    try:
        nf = _need_nf(field, nf)
        sections = _sections_from(args)
        if sections is None:
            raise _InputError(EXIT_BAD_SECTIONS,
                              "transit needs finite --alpha/--omega")
        est = flow.transition_slope(nf, sections, args.side,
                                    offsets=_offsets_from(args),
                                    cfg=_integrator_cfg())
    except NotInNormalForm as exc:
        print(f"not in normal form: {exc}", file=sys.stderr)
        return EXIT_NOT_NORMAL_FORM
    except asymptotics.SectionInvalid as exc:
        print(f"invalid sections: {exc}", file=sys.stderr)
        return EXIT_BAD_SECTIONS
    except (flow.TransitDoesNotExist, flow.NoReturn) as exc:
        print(f"no transit: {exc}", file=sys.stderr)
        return EXIT_NO_TRANSIT
    payload = {"slope": est.to_json()}
    lines = [f"measured slope    = {est.value:.10g}  "
             f"(residual {est.residual:.3g})"]
    try:
        g = asymptotics.gamma_pm(nf, sections)
        closed = math.exp(g[0] if args.side == "+" else g[1])
        payload["closed_form"] = closed
        payload["relative_deviation"] = abs(est.value - closed) / abs(closed)
        lines.append(f"closed-form slope = {closed:.10g}")
        lines.append(f"relative deviation = "
                     f"{payload['relative_deviation']:.3g}")
    except asymptotics.NotHyperbolicFakeSaddle:
        lines.append("closed-form slope = n/a (d <= 0)")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_return(args) -> int:
    field, _nf = _resolve_input(args)
    try:
        est = flow.return_slope(field, section_scale=args.section_x,
                                offsets=_offsets_from(args),
                                cfg=_integrator_cfg())
    except flow.NoReturn as exc:
        print(f"no return: {exc}", file=sys.stderr)
        return EXIT_NO_TRANSIT
    payload = {"slope": est.to_json()}
    lines = [f"measured return slope = {est.value:.10g}  "
             f"(residual {est.residual:.3g})"]
    alpha_param = args.alpha_param if args.alpha_param is not None else 1.0
    beta = args.beta if args.beta is not None else 1.0
    if args.case == "z-family" and beta > 0.25:
        closed = casebook.z_return_slope_closed(alpha_param, beta)
        payload["closed_form"] = closed
        lines.append(f"closed-form slope     = {closed:.10g}")
        lines.append(f"relative deviation    = "
                     f"{abs(est.value - closed) / closed:.3g}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.all:
        case_ids = sorted(casebook.CASES)
    else:
        if args.case_id not in casebook.CASES:
            print(f"unknown case id {args.case_id!r}; known: "
                  f"{sorted(casebook.CASES)}", file=sys.stderr)
            return EXIT_PARSE
        case_ids = [args.case_id]
    results = [casebook.run_case(cid, cfg=_integrator_cfg())
               for cid in case_ids]
    all_pass = all(r.passed for r in results)
    if args.format == "json":
        print(json.dumps([r.to_json() for r in results], indent=2))
    else:
        for r in results:
            print(f"case {r.case_id}: {'PASS' if r.passed else 'FAIL'}")
            for line in r.summary_lines():
                print(line)
    if args.out:
        casebook.dump_results(results, args.out)
    return EXIT_OK if all_pass else EXIT_CHECKS_FAILED


def _portrait_seeds(window, n):
    x0, x1, y0, y1 = window
    seeds = []
    for k in range(n):
        t = (k + 0.5) / n
        if k % 2 == 0:
            seeds.append((x0 + 1e-3 * (x1 - x0), y0 + t * (y1 - y0)))
        else:
            seeds.append((x0 + t * (x1 - x0), y0 + 1e-3 * (y1 - y0)))
    return seeds


def cmd_portrait(args) -> int:
    field, nf = _resolve_input(args)
    x0, x1, y0, y1 = args.window
    if not (x0 < x1 and y0 < y1):
        print(f"bad window {args.window}", file=sys.stderr)
        return EXIT_BAD_SECTIONS
    outdir = Path(args.out or f"portrait_{args.case or 'field'}")
    outdir.mkdir(parents=True, exist_ok=True)
    margin = 1e-6
    stop = flow.Stop.window_exit(x0 - margin, x1 + margin,
                                 y0 - margin, y1 + margin)
    cfg = flow.IntegratorConfig(rel_tol=1e-9, abs_tol=1e-12,
                                max_steps=200_000, max_step=0.05)
    summary = {"case": args.case, "window": list(args.window), "orbits": []}
    names = []
    for k, seed in enumerate(_portrait_seeds((x0, x1, y0, y1), args.orbits)):
        for direction, tag in ((False, "fwd"), (True, "bwd")):
            try:
                traj = flow.integrate(field, seed, stop, cfg=cfg,
                                      param="arclength", backward=direction)
            except (flow.MaxStepsExceeded, flow.StepUnderflow):
                continue
            name = f"orbit_{k:02d}_{tag}.csv"
            traj.to_csv(outdir / name)
            names.append(name)
            entry = {"file": name, "seed": list(seed), "samples":
                     len(traj.samples)}
            if args.case in ("example6", "figure3"):
                try:
                    entry["first_integral_drift"] = flow.conservation_check(
                        field, casebook.example6_first_integral(), traj,
                        branch_quantum=2.0 * math.pi)
                except flow.BranchTrackingFailed:
                    entry["first_integral_drift"] = None
            summary["orbits"].append(entry)
    plots = ", \\\n  ".join(f"'{n}' using 2:3 with lines notitle"
                            for n in names)
    script = ("set size ratio -1\nset xlabel 'x'\nset ylabel 'y'\n"
              + (f"plot \\\n  {plots}\n" if names else "# no orbits requested\n"))
    (outdir / "portrait.gp").write_text(script)
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2))
    print(f"wrote {len(names)} orbit files to {outdir}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _add_input_args(p):
    p.add_argument("--case", help="built-in case id (example6, x3, x4, xn, "
                                  "y1, z-family, figure3)")
    p.add_argument("--file", help="path to a field/normal-form JSON file")
    p.add_argument("--json", help="inline field/normal-form JSON")
    p.add_argument("--a", type=Fraction, help="example6: xy coefficient")
    p.add_argument("--b", type=Fraction, help="example6: g2(0)")
    p.add_argument("--c", type=Fraction, help="example6: g1(0,0)")
    p.add_argument("--n", type=int, help="xn: degree of the y-component")
    p.add_argument("--alpha-param", dest="alpha_param", type=float,
                   help="z-family: alpha parameter")
    p.add_argument("--beta", type=float, help="z-family: beta parameter")
    p.add_argument("--format", choices=("json", "human"), default="human")


def _add_section_args(p):
    p.add_argument("--alpha", type=float, help="left section {x = alpha < 0}")
    p.add_argument("--omega", type=float, help="right section {x = omega > 0}")
    p.add_argument("--infinite", action="store_true",
                   help="symmetric sections at infinity")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fakesaddle",
        description="Classify fake-saddle singularities of planar vector "
                    "fields and compute/measure their transition-map slopes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="invariants and verdict")
    _add_input_args(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("gamma", help="closed-form transition exponents")
    _add_input_args(p)
    _add_section_args(p)
    p.set_defaults(fn=cmd_gamma)

    p = sub.add_parser("transit", help="measured transition slope")
    _add_input_args(p)
    _add_section_args(p)
    p.add_argument("--side", choices=("+", "-"), default="+")
    p.add_argument("--offsets", nargs="*", type=float)
    p.set_defaults(fn=cmd_transit)

    p = sub.add_parser("return", help="measured Poincare return slope")
    _add_input_args(p)
    p.add_argument("--section-x", dest="section_x", type=float, default=1.0)
    p.add_argument("--offsets", nargs="*", type=float)
    p.set_defaults(fn=cmd_return)

    p = sub.add_parser("reproduce", help="run the casebook regressions")
    p.add_argument("case_id", nargs="?", help="case id, or use --all")
    p.add_argument("--all", action="store_true")
    p.add_argument("--out", help="write CaseResult JSON to this path")
    p.add_argument("--format", choices=("json", "human"), default="human")
    p.set_defaults(fn=cmd_reproduce)

    p = sub.add_parser("portrait", help="export phase-portrait orbit data")
    _add_input_args(p)
    p.add_argument("--window", nargs=4, type=float,
                   default=(-1.0, 1.0, -1.0, 1.0),
                   metavar=("X0", "X1", "Y0", "Y1"))
    p.add_argument("--orbits", type=int, default=8)
    p.add_argument("--out", help="output directory")
    p.set_defaults(fn=cmd_portrait)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    if args.command == "reproduce" and not args.all and not args.case_id:
        print("reproduce needs a case id or --all", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.fn(args)
    except _InputError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except NotInNormalForm as exc:
        print(f"not in normal form: {exc}", file=sys.stderr)
        return EXIT_NOT_NORMAL_FORM


if __name__ == "__main__":
    sys.exit(main())
