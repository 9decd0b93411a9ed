"""Command-line front end: ``greenperturb <subcommand> [flags]``.

Data (CSV or JSON) goes to standard output and diagnostics to standard
error.  Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .backends import NumericBackend, backend_for
from .domain import BoundaryPerturbation, DomainError, build_disk
from .fields import parse_polynomial
from .greenop import KernelOperator, neumann_series_helmholtz, neumann_series_schrodinger
from .harness import (
    ScenarioError,
    emit_plot,
    emit_report,
    load_scenario,
    parse_domain,
    run_convergence,
    run_oracle_suite,
)
from .pde_solver import (
    DEFAULT_H,
    SolverError,
    green_beltrami_numeric,
    green_helmholtz_numeric,
    green_numeric,
    green_schrodinger_numeric,
)
from .variation import (
    beltrami_delta_grad,
    beltrami_delta_lap,
    growth_dgdt,
    hadamard_delta,
    hadamard_delta_weighted,
    sign_convention_adapter,
)

VARIATION_COLUMNS = ("z_re", "z_im", "w_re", "w_im", "delta_g", "formula_tag", "N")


class UsageError(Exception):
    """Invalid command line; reported with exit code 1."""


class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    """Show defaults unless the help text already states one or there is none."""

    def _get_help_string(self, action):
        text = action.help or ""
        if "default" in text or action.default in (None, False):
            return text
        return super()._get_help_string(action)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _complex_list(text: str) -> list[complex]:
    return [_complex(t) for t in text.replace(";", ",").split(",") if t.strip()]


def _pairs(text: str) -> list[tuple[complex, complex]]:
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        if ":" not in item:
            raise argparse.ArgumentTypeError("pairs are written z:w separated by ';'")
        z, w = item.split(":", 1)
        out.append((_complex(z), _complex(w)))
    if not out:
        raise argparse.ArgumentTypeError("no pairs given")
    return out


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _polynomial(text: str):
    try:
        return parse_polynomial(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_domain(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--disk", type=_positive_float, metavar="R",
                   help="disk of radius R centred at the origin (default: unit disk)")
    g.add_argument("--domain", type=Path, metavar="FILE",
                   help="domain file with key = value lines (kind, radius, cos, sin)")


def _add_points(p, pairs=True):
    p.add_argument("--z", type=_complex, help="evaluation point, e.g. 0.3+0.2j")
    p.add_argument("--w", type=_complex, help="pole, e.g. -0.1j")
    if pairs:
        p.add_argument("--pairs", type=_pairs, metavar="Z:W;...",
                       help="several (z, w) pairs, e.g. '0:0.5;0.3:0.2j'")


def _add_grid(p):
    p.add_argument("--h", type=_positive_float, default=DEFAULT_H,
                   help="finite-difference grid spacing (length units)")


def build_parser() -> argparse.ArgumentParser:
    fmt = _Formatter
    parser = _Parser(prog="greenperturb", formatter_class=fmt,
                     description="Green functions and their first-order variations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("green", formatter_class=fmt, help="evaluate a Green function")
    _add_domain(p)
    _add_points(p)
    _add_grid(p)
    p.add_argument("--operator", choices=("laplace", "helmholtz", "schrodinger", "beltrami"),
                   default="laplace", help="operator whose Green function is evaluated")
    p.add_argument("--a", type=float, default=0.0, help="Helmholtz shift a in Delta - a")
    p.add_argument("--p", type=_polynomial, default=None,
                   help="potential q (schrodinger) or conductivity lambda (beltrami), polynomial in x, y")
    p.add_argument("--numeric", action="store_true", help="use the grid solver even on a disk")

    p = sub.add_parser("hadamard", formatter_class=fmt, help="boundary-perturbation variation")
    _add_domain(p)
    _add_points(p)
    _add_grid(p)
    p.add_argument("--p-cos", type=_floats, default=[1.0], metavar="C0,C1,...",
                   help="cosine coefficients of the normal displacement p(theta)")
    p.add_argument("--p-sin", type=_floats, default=[0.0], metavar="S0,S1,...",
                   help="sine coefficients of p(theta) (S0 is ignored)")
    p.add_argument("--lam", type=_polynomial, default=None,
                   help="conductivity lambda for the weighted formula (polynomial in x, y)")
    p.add_argument("--N", type=_positive_int, default=2048, help="boundary quadrature nodes")
    p.add_argument("--alternate", action="store_true",
                   help="report in the g = -log|z - w| + O(1) convention")

    p = sub.add_parser("growth", formatter_class=fmt, help="Laplacian-growth rate dg/dt(z, 0)")
    _add_domain(p)
    _add_grid(p)
    p.add_argument("--z", type=_complex_list, default=[0j], metavar="Z,...",
                   help="evaluation points")
    p.add_argument("--lam", type=_polynomial, default=None, help="conductivity lambda (polynomial)")
    p.add_argument("--N", type=_positive_int, default=2048, help="boundary quadrature nodes")

    p = sub.add_parser("beltrami", formatter_class=fmt, help="conductivity variation, lambda = 1 + eps p")
    _add_domain(p)
    _add_points(p)
    _add_grid(p)
    p.add_argument("--p", type=_polynomial, default="x^2 + y^2",
                   help="interior perturbation p (polynomial in x, y)")
    p.add_argument("--form", choices=("grad", "lap", "both"), default="both",
                   help="gradient form, Laplacian form, or both")
    p.add_argument("--local", type=_positive_int, nargs=2, default=(64, 64), metavar=("NR", "NA"),
                   help="radial and angular nodes of each singular-point patch")

    for name in ("helmholtz", "schrodinger"):
        p = sub.add_parser(name, formatter_class=fmt, help=f"{name} Green function by Neumann series")
        _add_domain(p)
        _add_grid(p)
        if name == "helmholtz":
            p.add_argument("--a", type=float, required=True, help="shift a in Delta - a")
        else:
            p.add_argument("--eps", type=float, required=True, help="potential scale eps in Delta - eps p")
            p.add_argument("--p", type=_polynomial, default="x^2 + y^2",
                           help="potential shape p (polynomial in x, y)")
        p.add_argument("--w", type=_complex, default=0j, help="pole")
        p.add_argument("--probes", type=_complex_list, required=True, metavar="Z,...",
                       help="evaluation points")
        p.add_argument("--terms", type=_positive_int, default=50, help="maximum number of series terms")
        p.add_argument("--tol", type=_positive_float, default=1e-14, help="stop when a term is below this")
        p.add_argument("--ns", type=_positive_int, default=None, help="radial quadrature cells (default 128 disk, 20 other)")
        p.add_argument("--nt", type=_positive_int, default=None, help="angular quadrature cells (default 256 disk, 64 other)")
        p.add_argument("--direct", action="store_true", help="also solve directly on the grid and report the difference")

    p = sub.add_parser("converge", formatter_class=fmt, help="run a convergence study")
    p.add_argument("--scenario", type=Path, required=True, metavar="FILE", help="scenario file")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="report format")
    p.add_argument("--output", type=Path, default=None,
                   help="report path (default: scenario path with .csv/.json)")
    p.add_argument("--plot", type=Path, default=None, help="SVG path (default: scenario path with .svg)")
    p.add_argument("--no-plot", action="store_true", help="skip the SVG plot")

    p = sub.add_parser("selftest", formatter_class=fmt, help="run the closed-form oracle table")
    return parser


# ---- subcommands ----------------------------------------------------------------

def _domain(args):
    if getattr(args, "domain", None) is not None:
        try:
            text = args.domain.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read domain file: {exc}") from None
        return parse_domain(text, str(args.domain))
    return build_disk(args.disk if getattr(args, "disk", None) is not None else 1.0)


def _pairs_from(args):
    if getattr(args, "pairs", None):
        if args.z is not None or args.w is not None:
            raise UsageError("use either --pairs or --z/--w")
        return args.pairs
    if args.z is None or args.w is None:
        raise UsageError("--z and --w (or --pairs) are required")
    return [(args.z, args.w)]


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _variation_row(v, N=None):
    return (v.z.real, v.z.imag, v.w.real, v.w.imag, float(v.value), v.tag, int(N if N is not None else v.N))


def cmd_green(args) -> str:
    d = _domain(args)
    rows = []
    for z, w in _pairs_from(args):
        if not d.contains(z):
            raise ValueError(f"point {z} is not inside the domain")
        if args.operator == "laplace":
            if d.kind == "disk" and not args.numeric:
                val, tag = float(backend_for(d).value(np.array([z]), w)[0]), "analytic"
            else:
                val, tag = float(green_numeric(d, w, args.h)(np.array([z]))[0]), "numeric"
        else:
            if args.operator == "helmholtz":
                ng = green_helmholtz_numeric(d, args.a, w, args.h)
            elif args.p is None:
                raise UsageError(f"--p is required for --operator {args.operator}")
            elif args.operator == "schrodinger":
                ng = green_schrodinger_numeric(d, args.p, w, args.h)
            else:
                ng = green_beltrami_numeric(d, args.p, w, args.h)
            val, tag = float(ng(np.array([z]))[0]), "numeric"
        rows.append((z.real, z.imag, w.real, w.imag, val, args.operator, tag))
    return _csv(rows, ("z_re", "z_im", "w_re", "w_im", "g", "operator", "backend"))


def cmd_hadamard(args) -> str:
    d = _domain(args)
    p = BoundaryPerturbation(np.array(args.p_cos), np.array(args.p_sin))
    backend = None if d.kind == "disk" else NumericBackend(d, args.h)
    rows = []
    for z, w in _pairs_from(args):
        if args.lam is None:
            v = hadamard_delta(d, p, z, w, args.N, backend)
        else:
            v = hadamard_delta_weighted(d, args.lam, p, z, w, args.N, args.h)
        if args.alternate:
            v = sign_convention_adapter(v)
        rows.append(_variation_row(v))
    return _csv(rows, VARIATION_COLUMNS)


def cmd_growth(args) -> str:
    d = _domain(args)
    backend = None if d.kind == "disk" or args.lam is not None else NumericBackend(d, args.h)
    rows = []
    for z in args.z:
        val = growth_dgdt(d, z, args.lam, args.N, args.h, backend)
        rows.append((z.real, z.imag, 0.0, 0.0, float(val), "growth", args.N))
    return _csv(rows, VARIATION_COLUMNS)


def cmd_beltrami(args) -> str:
    d = _domain(args)
    backend = None if d.kind == "disk" else NumericBackend(d, args.h)
    forms = {"grad": (beltrami_delta_grad,), "lap": (beltrami_delta_lap,),
             "both": (beltrami_delta_grad, beltrami_delta_lap)}[args.form]
    rows = []
    for z, w in _pairs_from(args):
        for f in forms:
            rows.append(_variation_row(f(d, args.p, z, w, backend, tuple(args.local))))
    return _csv(rows, VARIATION_COLUMNS)


def cmd_series(args) -> str:
    d = _domain(args)
    backend = backend_for(d) if d.kind == "disk" else NumericBackend(d, max(args.h, 1 / 64))
    op = KernelOperator(d, backend, args.ns, args.nt)
    probes = np.array(args.probes, dtype=complex)
    if not np.all(d.contains(probes)):
        raise ValueError("all probes must lie inside the domain")
    if args.command == "helmholtz":
        res = neumann_series_helmholtz(op, args.a, args.w, probes, args.terms, args.tol)
    else:
        res = neumann_series_schrodinger(op, args.p, args.eps, args.w, probes, args.terms, args.tol)
    print(f"terms={res.terms} residual_bound={res.residual_bound:.3e} |T|={op.norm:.6f}", file=sys.stderr)
    header = ["z_re", "z_im", "w_re", "w_im", "value", "terms", "residual_bound"]
    direct = None
    if args.direct:
        if args.command == "helmholtz":
            ng = green_helmholtz_numeric(d, args.a, args.w, args.h)
        else:
            ng = green_schrodinger_numeric(d, args.p.scaled(args.eps), args.w, args.h)
        direct = ng(probes)
        header += ["direct_value", "abs_difference"]
    rows = []
    for k, z in enumerate(probes):
        row = [z.real, z.imag, args.w.real, args.w.imag, float(res.values[k]), res.terms, float(res.residual_bound)]
        if direct is not None:
            row += [float(direct[k]), float(abs(direct[k] - res.values[k]))]
        rows.append(row)
    return _csv(rows, header)


def cmd_converge(args) -> str:
    try:
        s = load_scenario(args.scenario)
    except OSError as exc:
        raise UsageError(f"cannot read scenario file: {exc}") from None
    report = run_convergence(s)
    out = args.output or args.scenario.with_suffix("." + args.format)
    text = emit_report(report, args.format, out)
    if not args.no_plot:
        emit_plot(report, args.plot or args.scenario.with_suffix(".svg"))
    print(f"scenario={s.scenario_id} slope={report.slope:.4f} threshold={report.threshold:g} "
          f"flag={report.flag} report={out}", file=sys.stderr)
    if not report.passed:
        raise SolverError(f"slope {report.slope:.4f} below threshold {report.threshold:g}")
    return text


def cmd_selftest(args) -> str:
    rows = run_oracle_suite()
    failed = [r for r in rows if not r["passed"]]
    for r in rows:
        print(f"{'PASS' if r['passed'] else 'FAIL'} {r['check']}", file=sys.stderr)
    text = _csv([(r["check"], r["expected"], r["got"], r["tolerance"], str(r["passed"]).lower()) for r in rows],
                ("check", "expected", "got", "tolerance", "passed"))
    if failed:
        sys.stdout.write(text)
        raise SolverError(f"{len(failed)} of {len(rows)} oracle checks failed")
    return text


COMMANDS = {
    "green": cmd_green,
    "hadamard": cmd_hadamard,
    "growth": cmd_growth,
    "beltrami": cmd_beltrami,
    "helmholtz": cmd_series,
    "schrodinger": cmd_series,
    "converge": cmd_converge,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = COMMANDS[args.command](args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SolverError as exc:  # includes resonance rejection
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, DomainError, ScenarioError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
