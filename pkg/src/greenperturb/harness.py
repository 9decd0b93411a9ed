"""Convergence studies for the first-order formulas and the oracle table.

A :class:`Scenario` fixes a domain, a perturbation, probe pairs and a
decreasing schedule of perturbation sizes.  :func:`run_convergence` computes,
for every size ``eps``, the perturbed Green function directly and the
first-order prediction ``g + eps * delta g``, and fits the log-log slope of
the error (max over probes) against ``eps``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import disk_analytic as da
from .backends import NumericBackend, backend_for
from .domain import BoundaryPerturbation, Domain2D, build_disk, build_star, perturb
from .fields import Polynomial2D, parse_polynomial, radial_square
from .greenop import KernelOperator, apply_T, estimate_T_norm, neumann_series_helmholtz
from .pde_solver import (
    DEFAULT_H,
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
    hadamard_delta_alternate,
    poisson_jensen_residual,
    sign_convention_adapter,
)

__all__ = [
    "KINDS",
    "Scenario",
    "ConvergenceReport",
    "ScenarioError",
    "run_convergence",
    "run_oracle_suite",
    "emit_report",
    "emit_plot",
    "read_report_csv",
    "parse_scenario",
    "load_scenario",
    "parse_domain",
    "worker_count",
    "fit_slope",
    "CSV_COLUMNS",
]

KINDS = ("hadamard", "helmholtz", "schrodinger", "beltrami")
CSV_COLUMNS = ("scenario_id", "epsilon", "probe_index", "direct_value", "predicted_value",
               "abs_error", "slope", "flag")
FLOOR_CHANGE = 0.30


class ScenarioError(ValueError):
    """Invalid scenario or scenario file."""


def worker_count() -> int:
    """Thread count from ``GREENPERTURB_THREADS`` (0 or unset means automatic)."""
    raw = os.environ.get("GREENPERTURB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ScenarioError(f"GREENPERTURB_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ScenarioError("GREENPERTURB_THREADS must be nonnegative")
    return n if n > 0 else min(4, os.cpu_count() or 1)


@dataclass
class Scenario:
    """One convergence study.

    ``perturbation`` is a :class:`BoundaryPerturbation` for ``hadamard``, a
    polynomial ``p`` for ``schrodinger`` (potential ``eps p``) and
    ``beltrami`` (conductivity ``1 + eps p``), and unused for ``helmholtz``
    where ``eps`` is the shift ``a`` itself.
    """

    scenario_id: str
    kind: str
    domain: Domain2D
    probes: list
    eps: tuple
    perturbation: object = None
    h: float = DEFAULT_H
    N: int = 2048
    numeric: bool | None = None
    threshold: float | None = None
    mesh: tuple = (None, None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScenarioError(f"unknown scenario kind {self.kind!r}")
        eps = tuple(float(e) for e in self.eps)
        if len(eps) < 3:
            raise ScenarioError("the eps schedule needs at least 3 entries")
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ScenarioError("the eps schedule must be positive and strictly decreasing")
        self.eps = eps
        if self.kind == "hadamard":
            if not isinstance(self.perturbation, BoundaryPerturbation):
                raise ScenarioError("hadamard scenarios need a boundary perturbation")
        elif self.kind in ("schrodinger", "beltrami"):
            if not isinstance(self.perturbation, Polynomial2D):
                raise ScenarioError(f"{self.kind} scenarios need a polynomial p")
        if not self.probes:
            raise ScenarioError("at least one probe pair is required")
        self.probes = [(complex(z), complex(w)) for z, w in self.probes]
        for z, w in self.probes:
            for q in (z, w):
                if not self.domain.contains(q):
                    raise ScenarioError(f"probe point {q} is outside the domain")
                if self.uses_grid and self.domain.boundary_distance(q)[0] < 4 * self.h:
                    raise ScenarioError(f"probe point {q} is within 4h of the boundary")
            if abs(z - w) < 1e-3:
                raise ScenarioError("probe pairs must satisfy |z - w| >= 1e-3")
        if self.threshold is None:
            self.threshold = self.default_threshold

    @property
    def analytic_direct(self) -> bool:
        """Whether the perturbed Green function has a closed form."""
        return (self.kind == "hadamard" and self.domain.kind == "disk"
                and self.perturbation.is_constant and not self.numeric)

    @property
    def uses_grid(self) -> bool:
        return not self.analytic_direct

    @property
    def default_threshold(self) -> float:
        if self.analytic_direct:
            return 1.9
        if self.kind == "hadamard":
            return 1.5
        if self.kind == "beltrami":
            return 1.8
        return 1.9


@dataclass
class ConvergenceReport:
    """Rows ``(eps, probe_index, direct, predicted, abs_error)`` and the fit."""

    scenario_id: str
    rows: list
    slope: float
    slope_residual: float
    threshold: float
    flag: str
    floor_check: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.flag in ("pass", "discretization-limited")

    @property
    def eps(self) -> np.ndarray:
        return np.array(sorted({r[0] for r in self.rows}, reverse=True))

    @property
    def errors(self) -> np.ndarray:
        """Max-over-probes error per eps (decreasing eps order)."""
        return np.array([max(r[4] for r in self.rows if r[0] == e) for e in self.eps])

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "slope": self.slope,
            "slope_residual": self.slope_residual,
            "threshold": self.threshold,
            "flag": self.flag,
            "floor_check": self.floor_check,
            "rows": [dict(zip(CSV_COLUMNS, (self.scenario_id, *r[:2], *r[2:5], self.slope, self.flag)))
                     for r in self.rows],
        }


def fit_slope(eps, errors) -> tuple[float, float]:
    """Least-squares slope of ``log error`` against ``log eps`` and RMS residual."""
    x, y = np.log(np.asarray(eps)), np.log(np.asarray(errors))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


class _Study:
    """Per-scenario evaluation of base values, first-order terms and direct values."""

    def __init__(self, s: Scenario, h: float):
        self.s, self.h = s, h
        d = s.domain
        zs = np.array([z for z, _ in s.probes])
        ws = [w for _, w in s.probes]
        self.zs, self.ws = zs, ws
        if s.analytic_direct:
            R = d.radius
            self.base = np.array([float(da.green_disk(R, z, w)) for z, w in s.probes])
        else:
            self.base = np.array([float(green_numeric(d, w, h)(np.array([z]))[0]) for z, w in s.probes])
        self.first = self._first_order()

    def _first_order(self) -> np.ndarray:
        s, d = self.s, self.s.domain
        if s.kind == "hadamard":
            backend = backend_for(d) if d.kind == "disk" else NumericBackend(d, self.h)
            return np.array([hadamard_delta(d, s.perturbation, z, w, s.N, backend).value for z, w in s.probes])
        if s.kind == "beltrami":
            backend = backend_for(d) if d.kind == "disk" else NumericBackend(d, self.h)
            return np.array([beltrami_delta_grad(d, s.perturbation, z, w, backend).value for z, w in s.probes])
        op = _operator(d, s.mesh, self.h)
        out = []
        for z, w in s.probes:
            gw = op.green_nodes(w)
            if s.kind == "schrodinger":
                gw = gw * op.node_values(s.perturbation)
            out.append(float(op.apply(gw, np.array([z]))[0]))
        return np.array(out)

    def direct(self, eps: float) -> np.ndarray:
        s, d, h = self.s, self.s.domain, self.h
        if s.kind == "hadamard":
            if s.analytic_direct:
                R = d.radius + eps * float(s.perturbation.cos_coeffs[0])
                return np.array([float(da.green_disk(R, z, w)) for z, w in s.probes])
            dd = perturb(d, s.perturbation, eps)
            return np.array([float(green_numeric(dd, w, h)(np.array([z]))[0]) for z, w in s.probes])
        if s.kind == "helmholtz":
            fn = lambda w: green_helmholtz_numeric(d, eps, w, h)  # noqa: E731
        elif s.kind == "schrodinger":
            q = s.perturbation.scaled(eps)
            fn = lambda w: green_schrodinger_numeric(d, q, w, h)  # noqa: E731
        else:
            lam = s.perturbation.scaled(eps).shifted(1.0)
            fn = lambda w: green_beltrami_numeric(d, lam, w, h)  # noqa: E731
        return np.array([float(fn(w)(np.array([z]))[0]) for z, w in s.probes])

    def rows(self, eps: float) -> list:
        direct = self.direct(eps)
        pred = self.base + eps * self.first
        return [(eps, k, float(direct[k]), float(pred[k]), float(abs(direct[k] - pred[k])))
                for k in range(len(direct))]


_OPS: dict = {}


def _operator(d: Domain2D, mesh, h) -> KernelOperator:
    key = (repr(d), mesh, h)
    op = _OPS.get(key)
    if op is None:
        backend = backend_for(d) if d.kind == "disk" else NumericBackend(d, max(h, 1 / 64))
        op = KernelOperator(d, backend, *mesh)
        _OPS[key] = op
        while len(_OPS) > 4:
            _OPS.pop(next(iter(_OPS)))
    return op


def run_convergence(s: Scenario, threads: int | None = None) -> ConvergenceReport:
    """Run one convergence study.

    For grid-based scenarios the smallest ``eps`` is rerun at ``h/2``; an
    error change above 30% marks the report ``discretization-limited``
    instead of judging the slope.
    """
    study = _Study(s, s.h)
    n = threads if threads is not None else worker_count()
    with ThreadPoolExecutor(max_workers=max(1, n)) as pool:
        futures = {e: pool.submit(study.rows, e) for e in s.eps}
        rows = []
        for e in s.eps:
            try:
                rows.extend(futures[e].result())
            except Exception as exc:
                raise RuntimeError(f"scenario {s.scenario_id!r} failed at eps={e:g}: {exc}") from exc
    errs = [max(r[4] for r in rows if r[0] == e) for e in s.eps]
    if min(errs) <= 0:
        slope, resid = math.inf, 0.0
    else:
        slope, resid = fit_slope(s.eps, errs)
    flag = "pass" if slope >= s.threshold else "fail"
    floor = {}
    if s.uses_grid:
        fine = _Study(s, s.h / 2).rows(s.eps[-1])
        e_fine = max(r[4] for r in fine)
        change = abs(e_fine - errs[-1]) / errs[-1] if errs[-1] > 0 else 0.0
        floor = {"h": s.h, "error": errs[-1], "h_half_error": e_fine, "relative_change": change}
        if change > FLOOR_CHANGE:
            flag = "discretization-limited"
    return ConvergenceReport(s.scenario_id, rows, slope, resid, s.threshold, flag, floor)


# ---- oracle table --------------------------------------------------------------

def run_oracle_suite() -> list[dict]:
    """Closed-form comparisons; each row has check, expected, got, tolerance, passed.

    A check that raises is recorded as a failing row.
    """
    disk = build_disk(1.0)
    one = BoundaryPerturbation.constant(1.0)
    p2 = radial_square()
    rows = []

    def check(name, expected, compute, tol, relative=False):
        try:
            got = float(compute())
            err = abs(got - expected) / (abs(expected) if relative else 1.0)
            ok = bool(err <= tol)
        except Exception as exc:  # failures are rows
            got, ok = float("nan"), False
            name = f"{name} [{type(exc).__name__}: {exc}]"
        rows.append({"check": name, "expected": expected, "got": got, "tolerance": tol, "passed": ok})

    check("green disk g(0, 0.5)", math.log(0.5) / (2 * math.pi),
          lambda: da.green_disk(1.0, 0.0, 0.5), 1e-12)
    check("green numeric g(0, 0.5) h=1/128", math.log(0.5) / (2 * math.pi),
          lambda: green_numeric(disk, 0.5, DEFAULT_H)(np.array([0j]))[0], 1e-5)
    check("hadamard disk z=w=0", -1 / (2 * math.pi),
          lambda: hadamard_delta(disk, one, 0, 0).value, 1e-6, True)
    check("hadamard disk z=w=0.5", -(5 / 3) / (2 * math.pi),
          lambda: hadamard_delta(disk, one, 0.5, 0.5).value, 1e-6, True)
    check("hadamard alternate convention z=w=0", 1.0,
          lambda: sign_convention_adapter(hadamard_delta(disk, one, 0, 0)).value, 1e-10)
    check("hadamard alternate direct quadrature z=w=0", 1.0,
          lambda: hadamard_delta_alternate(disk, one, 0, 0), 1e-10)
    for z in (0.0, 0.4, 0.3j):
        check(f"growth dg/dt z={z}", -1 / (4 * math.pi**2), lambda z=z: growth_dgdt(disk, z), 1e-6, True)
    check("beltrami grad (0.6, 0)", 0.64 / (4 * math.pi),
          lambda: beltrami_delta_grad(disk, p2, 0.6, 0).value, 1e-3)
    check("beltrami lap (0.6, 0)", 0.64 / (4 * math.pi),
          lambda: beltrami_delta_lap(disk, p2, 0.6, 0).value, 1e-3)
    ref = float(da.beltrami_disk_delta(0.5, 0.5j))
    check("beltrami grad (0.5, 0.5i)", ref, lambda: beltrami_delta_grad(disk, p2, 0.5, 0.5j).value, 1e-3)
    check("beltrami lap (0.5, 0.5i)", ref, lambda: beltrami_delta_lap(disk, p2, 0.5, 0.5j).value, 1e-3)
    check("poisson-jensen u=|xi|^2 z=0", 0.0, lambda: poisson_jensen_residual(disk, p2, 0.0), 1e-3)
    op = KernelOperator(disk)
    check("T 1 at 0", -0.25, lambda: apply_T(op, 1.0, 0.0), 1e-4)
    check("T g_0 at 0", 1 / (8 * math.pi), lambda: apply_T(op, op.green_nodes(0.0), 0.0), 1e-4)
    j01 = 2.404825557695773
    check("norm of T, unit disk", 1 / j01**2, lambda: estimate_T_norm(op), 1e-3, True)
    check("helmholtz first-order term a=0.5", 0.5 / (8 * math.pi),
          lambda: 0.5 * apply_T(op, op.green_nodes(0.0), 0.0), 1e-4)
    series = lambda: neumann_series_helmholtz(op, 0.5, 0.0, np.array([0.3])).values[0]  # noqa: E731
    check("helmholtz series g*(0.3, 0) a=0.5", _helmholtz_disk(0.5, 0.3), series, 1e-4)
    return rows


def _helmholtz_disk(a: float, r: float) -> float:
    """Green function of ``Delta - a`` on the unit disk with pole 0, at radius ``r``."""
    from scipy.special import i0, k0

    k = math.sqrt(a)
    return float(-(k0(k * r) - k0(k) * i0(k * r) / i0(k)) / (2 * math.pi))


# ---- serialisation ---------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x)) if not math.isfinite(x) else format(float(x), ".17g")
    return str(x)


def emit_report(r: ConvergenceReport, fmt: str = "csv", path=None) -> str:
    """Serialise a report as CSV or JSON (17 significant digits); write it to
    ``path`` when given and return the text."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for eps, k, direct, pred, err in r.rows:
            w.writerow([r.scenario_id, _fmt(eps), k, _fmt(direct), _fmt(pred), _fmt(err), _fmt(r.slope), r.flag])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(r.to_dict(), indent=2) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def read_report_csv(text: str) -> list[dict]:
    """Parse CSV text produced by :func:`emit_report`."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append({
            "scenario_id": row["scenario_id"],
            "epsilon": float(row["epsilon"]),
            "probe_index": int(row["probe_index"]),
            "direct_value": float(row["direct_value"]),
            "predicted_value": float(row["predicted_value"]),
            "abs_error": float(row["abs_error"]),
            "slope": float(row["slope"]),
            "flag": row["flag"],
        })
    return out


def _decades(lo: float, hi: float) -> list[float]:
    return [10.0**k for k in range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1)]


def emit_plot(r: ConvergenceReport, path=None, width: int = 480, height: int = 360) -> str:
    """Self-contained SVG 1.1 log-log plot of error against eps with the fitted line."""
    eps, errs = r.eps, r.errors
    pos = errs > 0
    x0, x1 = math.log10(eps.min()) - 0.1, math.log10(eps.max()) + 0.1
    ey = errs[pos] if np.any(pos) else np.array([1.0])
    y0, y1 = math.log10(ey.min()) - 0.3, math.log10(ey.max()) + 0.3
    L, Rm, T, B = 70, 20, 30, 50
    pw, ph = width - L - Rm, height - T - B

    def X(v):
        return L + (math.log10(v) - x0) / (x1 - x0) * pw

    def Y(v):
        return T + (y1 - math.log10(v)) / (y1 - y0) * ph

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{r.scenario_id}: slope {r.slope:.3f} ({r.flag})</title>',
        f'<rect x="{L}" y="{T}" width="{pw}" height="{ph}" fill="white" stroke="black"/>',
    ]
    for v in _decades(10**x0, 10**x1) + list(eps):
        if 10**x0 <= v <= 10**x1:
            parts.append(f'<line x1="{X(v):.2f}" y1="{T + ph}" x2="{X(v):.2f}" y2="{T + ph + 5}" stroke="black"/>')
            parts.append(f'<text x="{X(v):.2f}" y="{T + ph + 18}" font-size="10" text-anchor="middle">{v:.3g}</text>')
    for v in _decades(10**y0, 10**y1):
        if 10**y0 <= v <= 10**y1:
            parts.append(f'<line x1="{L - 5}" y1="{Y(v):.2f}" x2="{L}" y2="{Y(v):.2f}" stroke="black"/>')
            parts.append(f'<text x="{L - 8}" y="{Y(v) + 3:.2f}" font-size="10" text-anchor="end">1e{round(math.log10(v))}</text>')
    if np.any(pos) and math.isfinite(r.slope):
        le, lr = np.log(eps[pos]), np.log(errs[pos])
        c = float(np.mean(lr - r.slope * le))
        xa, xb = 10**x0, 10**x1
        ya, yb = math.exp(c + r.slope * math.log(xa)), math.exp(c + r.slope * math.log(xb))
        parts.append(f'<line x1="{X(xa):.2f}" y1="{Y(ya):.2f}" x2="{X(xb):.2f}" y2="{Y(yb):.2f}" '
                     'stroke="steelblue" stroke-dasharray="4 3"/>')
    for e, v in zip(eps[pos], errs[pos]):
        parts.append(f'<circle cx="{X(e):.2f}" cy="{Y(v):.2f}" r="3.5" fill="firebrick"/>')
    parts.append(f'<text x="{L + pw / 2}" y="{height - 8}" font-size="12" text-anchor="middle">epsilon</text>')
    parts.append(f'<text x="14" y="{T + ph / 2}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 14 {T + ph / 2})">max abs error</text>')
    parts.append(f'<text x="{L + pw / 2}" y="18" font-size="12" text-anchor="middle">'
                 f'{r.scenario_id}: slope {r.slope:.3f}, threshold {r.threshold:g}, {r.flag}</text>')
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ---- plain-text configuration --------------------------------------------------

DOMAIN_KEYS = {"kind", "radius", "cos", "sin"}
SCENARIO_KEYS = {"id", "scenario", "p", "p_cos", "p_sin", "eps", "probes", "h", "N", "threshold",
                 "numeric", "ns", "nt"}


def _read_pairs(text: str, allowed: set, source: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{source}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in allowed:
            raise ScenarioError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ScenarioError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise ScenarioError(f"{name}: expected a list of numbers, got {text!r}") from None


def _complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ScenarioError(f"not a complex number: {text!r}") from None


def _domain_from(kv: dict, source: str) -> Domain2D:
    kind = kv.get("kind", "disk")
    if kind == "disk":
        if "cos" in kv or "sin" in kv:
            raise ScenarioError(f"{source}: disk domains take only 'radius'")
        return build_disk(float(_floats(kv.get("radius", "1"), "radius")[0]))
    if kind == "star":
        if "radius" in kv or "cos" not in kv:
            raise ScenarioError(f"{source}: star domains take 'cos' and optional 'sin'")
        cos = _floats(kv["cos"], "cos")
        sin = _floats(kv.get("sin", "0"), "sin")
        return build_star(cos, sin)
    raise ScenarioError(f"{source}: unknown domain kind {kind!r}")


def parse_domain(text: str, source: str = "<domain>") -> Domain2D:
    """Domain from ``key = value`` lines (keys: kind, radius, cos, sin)."""
    kv = _read_pairs(text, DOMAIN_KEYS, source)
    try:
        return _domain_from(kv, source)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"{source}: {exc}") from None


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """Scenario from ``key = value`` lines: the domain keys plus scenario keys."""
    kv = _read_pairs(text, DOMAIN_KEYS | SCENARIO_KEYS, source)
    try:
        d = _domain_from({k: v for k, v in kv.items() if k in DOMAIN_KEYS}, source)
        kind = kv.get("scenario")
        if kind is None:
            raise ScenarioError(f"{source}: missing 'scenario'")
        pert = None
        if kind == "hadamard":
            cos = _floats(kv.get("p_cos", "1"), "p_cos")
            sin = _floats(kv.get("p_sin", "0"), "p_sin")
            pert = BoundaryPerturbation(np.array(cos), np.array(sin))
        elif kind in ("schrodinger", "beltrami"):
            pert = parse_polynomial(kv.get("p", "x^2 + y^2"))
        probes = []
        for item in kv.get("probes", "").split(";"):
            if item.strip():
                if ":" not in item:
                    raise ScenarioError(f"{source}: probe pairs are written z:w")
                z, w = item.split(":", 1)
                probes.append((_complex(z), _complex(w)))
        numeric = kv.get("numeric")
        if numeric is not None:
            if numeric.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ScenarioError(f"{source}: numeric must be true or false")
            numeric = numeric.lower() in ("true", "1", "yes")
        return Scenario(
            scenario_id=kv.get("id", kind),
            kind=kind,
            domain=d,
            probes=probes,
            eps=tuple(_floats(kv.get("eps", ""), "eps")),
            perturbation=pert,
            h=float(kv.get("h", DEFAULT_H)),
            N=int(kv.get("N", 2048)),
            numeric=numeric,
            threshold=float(kv["threshold"]) if "threshold" in kv else None,
            mesh=(int(kv["ns"]) if "ns" in kv else None, int(kv["nt"]) if "nt" in kv else None),
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"{source}: {exc}") from None


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), str(path))

