"""Command-line front end.

Usage:
    polyharm classify --degree 3 --m1 4 --r 20 --format json
    polyharm thresholds --m1 7 --m2 8
    polyharm bounds --b 10000
    polyharm sweep --degree 3 --r-range 2:25
    polyharm sweep --b-list 1,8/7,2,10,100,10000 --format csv
    polyharm verify-geom --kind sphere --m 2 --r 3
    polyharm table --output headline.json

Every command writes a list of result records.  JSON carries exact
rationals as ``{"num", "den", "float"}``; CSV carries floats only (17
significant digits) after a ``#`` schema line.  Exit codes: 0 success,
2 usage, 3 numerical-verification failure, 4 unsupported configuration.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable

import click
import numpy as np

from . import __version__, criterion, geomlab, quartic, thresholds
from .errors import (
    DiscretizationError,
    DomainError,
    PreconditionError,
    UnsupportedError,
    VerificationError,
)
from .family import DEGREES, IsoparametricFamily, invariants, minimal_parameter

__all__ = ["main", "ResultRecord", "RunConfig"]

EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_UNSUPPORTED = 4

WORKERS_ENV = "POLYHARM_WORKERS"


@dataclass(frozen=True)
class RunConfig:
    command: str
    degree: int | None = None
    m1: int | None = None
    m2: int | None = None
    r: int | None = None
    c: int = 1
    b: Fraction | None = None
    grid: int = criterion.DEFAULT_GRID
    eps: float = criterion.DEFAULT_EPS
    format: str = "json"
    output: str | None = None

    def __post_init__(self):
        if self.b is not None and self.m1 is not None and self.m2 is not None:
            if Fraction(self.m2, self.m1) != self.b:
                raise click.UsageError(f"--b {self.b} does not equal m2/m1 = {self.m2}/{self.m1}")

    def echo(self) -> dict:
        keys = ("degree", "m1", "m2", "r", "c", "b")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}


@dataclass
class ResultRecord:
    input: dict
    output: dict
    provenance: str
    version: str = __version__

    def to_json(self) -> dict:
        return {
            "input": _json_value(self.input),
            "output": _json_value(self.output),
            "provenance": self.provenance,
            "version": self.version,
        }


class NumericalFailure(click.ClickException):
    exit_code = EXIT_VERIFY


class Unsupported(click.ClickException):
    exit_code = EXIT_UNSUPPORTED


# ---------------------------------------------------------------------------
# Serialization


def _json_value(v: Any) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, Fraction):
        return {"num": str(v.numerator), "den": str(v.denominator), "float": float(v)}
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _csv_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer, str)):
        return str(v)
    if isinstance(v, (Fraction, float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_csv_value(x) for x in v)
    if isinstance(v, dict):
        return ";".join(f"{k}={_csv_value(x)}" for k, x in v.items())
    raise TypeError(f"cannot serialize {type(v).__name__}")


def render(records: list[ResultRecord], fmt: str, command: str) -> str:
    if fmt == "json":
        return json.dumps([rec.to_json() for rec in records], indent=2) + "\n"
    columns: list[str] = []
    rows = []
    for rec in records:
        row = {**{f"in_{k}": v for k, v in rec.input.items()}, **rec.output}
        rows.append(row)
        columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    buf.write(f"# polyharm {__version__} {command}; exact rationals rendered as floats\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_value(row.get(k)) for k in columns])
    return buf.getvalue()


def emit(records: list[ResultRecord], cfg: RunConfig) -> None:
    text = render(records, cfg.format, cfg.command)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _workers(n_tasks: int) -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise click.UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, min(n, n_tasks))


def _parallel_map(fn: Callable, items: list) -> list:
    """Map preserving input order; a process pool when more than one worker."""
    workers = _workers(len(items))
    if workers == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Record builders (module-level so the process pool can pickle them)


def _family(cfg: RunConfig) -> IsoparametricFamily:
    if cfg.degree is None:
        raise click.UsageError("--degree is required")
    if cfg.degree not in DEGREES:
        raise Unsupported(f"degree {cfg.degree} is not an isoparametric degree {DEGREES}")
    if cfg.m1 is None:
        raise click.UsageError("--m1 is required")
    return IsoparametricFamily(cfg.degree, cfg.m1, cfg.m2)


def _b_from(cfg: RunConfig) -> Fraction:
    if cfg.b is not None:
        return cfg.b
    if cfg.m1 is None or cfg.m2 is None:
        raise click.UsageError("give --b or both --m1 and --m2")
    return Fraction(cfg.m2, cfg.m1)


def _oriented(b: Fraction) -> Fraction:
    # Swapping m1 and m2 maps b to 1/b and leaves (r*, r**) unchanged.
    return b if b >= 1 else 1 / b


def _solution_row(fam: IsoparametricFamily, r: int, sol: criterion.Solution) -> dict:
    inv = sol.invariants
    t = criterion.residual(
        criterion.HarmonicityQuery(c=1, m=fam.dim, r=r, a2=inv.a2, alpha2=inv.alpha2)
    )
    if abs(t) >= criterion.CLASSIFY_RTOL * inv.a2 * inv.a2:
        raise VerificationError(f"solution s={sol.s!r} fails re-verification (T={t!r})")
    return {
        "s": sol.s,
        "root": sol.root,
        "multiplicity": sol.multiplicity,
        "alpha": inv.alpha,
        "a2": inv.a2,
        "principal": [k for k, _ in inv.principal],
        "residual": t,
    }


def threshold_row(b: Fraction) -> dict:
    rep = thresholds.minimize(_oriented(b))
    return {
        "b": b,
        "y0": rep.y0,
        "y1": rep.y1,
        "y2": rep.y2,
        "R1": rep.R1,
        "R2": rep.R2,
        "rstar": rep.rstar,
        "rstarstar": rep.rstarstar,
        "bound_rstar": rep.bound_rstar,
        "bound_rstarstar": rep.bound_rstarstar,
    }


def _count_row(args: tuple[int, int, int | None, int]) -> dict:
    degree, m1, m2, r = args
    res = criterion.classify(IsoparametricFamily(degree, m1, m2), r)
    return {"r": r, "count": res.count, "s": [sol.s for sol in res.solutions]}


# ---------------------------------------------------------------------------
# Commands


def cmd_invariants(cfg: RunConfig, s_values: Iterable[float]) -> list[ResultRecord]:
    fam = _family(cfg)
    s_values = list(s_values) or [minimal_parameter(fam)]
    out = []
    for s in s_values:
        inv = invariants(fam, s)
        out.append(ResultRecord(
            {**cfg.echo(), "s": s},
            {
                "principal": [k for k, _ in inv.principal],
                "multiplicities": [k for _, k in inv.principal],
                "alpha": inv.alpha,
                "a2": inv.a2,
                "cauchy_gap": inv.cauchy_gap,
            },
            "principal curvatures cot(s + (i-1) pi/l) and the invariants alpha, |A|^2",
        ))
    return out


def cmd_roots(cfg: RunConfig) -> list[ResultRecord]:
    fam = _family(cfg)
    if cfg.r is None:
        raise click.UsageError("--r is required")
    out = []
    if fam.degree in (3, 4, 6) and fam.equal_multiplicities:
        a, b, c = criterion.degree_quadratic(fam.degree, cfg.r)
        for rt in criterion._quadratic_roots(fam.degree, cfg.r):
            out.append(ResultRecord(
                cfg.echo(),
                {"variable": f"cos({2 * fam.degree}s)", "value": rt.exact if rt.exact is not None else rt.value,
                 "multiplicity": rt.multiplicity, "quadratic": [a, b, c]},
                "quadratic reduction r x^2 + p x + q - r of the harmonicity residual",
            ))
    elif fam.degree == 4:
        q = quartic.build(fam.ratio, cfg.r)
        for rt in quartic.roots_in_unit_interval(q):
            out.append(ResultRecord(
                cfg.echo(),
                {"variable": "cos^2(2s)", "value": rt.value, "multiplicity": rt.multiplicity,
                 "bracket_lo": rt.bracket[0], "bracket_hi": rt.bracket[1], "s": rt.s,
                 "quartic": list(q.coeffs)},
                "Sturm-isolated roots of the quartic P_{b,r} on (0, 1)",
            ))
    elif fam.degree == 2:
        for rt in criterion._proper_clifford_roots(fam.m1, fam.m2, cfg.r):
            out.append(ResultRecord(
                cfg.echo(),
                {"variable": "sin^2(s)", "value": rt.value, "multiplicity": rt.multiplicity,
                 "bracket_lo": rt.bracket[0], "bracket_hi": rt.bracket[1]},
                "non-minimal roots of the Clifford torus residual polynomial",
            ))
    else:
        out.append(ResultRecord(
            cfg.echo(), {"variable": "cot^2(s)", "value": cfg.r - 1, "multiplicity": 1},
            "small hypersphere: cot^2 s = r - 1",
        ))
    return out


def cmd_classify(cfg: RunConfig) -> list[ResultRecord]:
    fam = _family(cfg)
    if cfg.r is None:
        raise click.UsageError("--r is required")
    res = criterion.classify(fam, cfg.r)
    prov = f"proper {cfg.r}-harmonic members of the degree-{fam.degree} family ({res.regime})"
    return [ResultRecord(cfg.echo(), _solution_row(fam, cfg.r, sol), prov) for sol in res.solutions]


def cmd_thresholds(cfg: RunConfig, confirm: int | None) -> list[ResultRecord]:
    b = _b_from(cfg)
    row = threshold_row(b)
    if confirm is not None:
        lo, hi = sorted((b.numerator, b.denominator))
        brute = thresholds.brute_force_thresholds(IsoparametricFamily(4, lo, hi), confirm)
        row.update(brute_rstar=brute.rstar, brute_rstarstar=brute.rstarstar)
        if brute.rstar != row["rstar"] or (
            brute.rstarstar is not None and brute.rstarstar != row["rstarstar"]
        ):
            raise VerificationError(
                f"brute-force ({brute.rstar}, {brute.rstarstar}) disagrees with "
                f"({row['rstar']}, {row['rstarstar']})"
            )
    return [ResultRecord({**cfg.echo(), "b": b}, row,
                         "minima of Q_b/R_b on either side of the pole y0 = b/(1+b)")]


def cmd_bounds(cfg: RunConfig) -> list[ResultRecord]:
    b = _oriented(_b_from(cfg))
    v1, v2 = thresholds.upper_bound_values(b)
    n1, n2 = thresholds.upper_bounds(b)
    return [ResultRecord(
        {**cfg.echo(), "b": b},
        {"bound_value_rstar": v1, "bound_value_rstarstar": v2, "bound_rstar": n1, "bound_rstarstar": n2},
        "Q_b/R_b evaluated at the midpoints of (0, y0) and (y0, 1)",
    )]


def cmd_scan(cfg: RunConfig) -> list[ResultRecord]:
    fam = _family(cfg)
    if cfg.r is None:
        raise click.UsageError("--r is required")
    res = criterion.scan_residual(fam, cfg.r, cfg.grid, cfg.eps)
    return [ResultRecord(
        {**cfg.echo(), "grid": cfg.grid, "eps": cfg.eps},
        {"count": res.count, "min_value": float(np.min(res.values)),
         "brackets": [[br.lo, br.hi] for br in res.brackets],
         "kinds": [br.kind for br in res.brackets]},
        "sign changes of T_r(s) on a uniform grid",
    )]


def cmd_verify_geom(cfg: RunConfig, kind: str, m: int | None, s: float | None, h: float) -> list[ResultRecord]:
    if kind == "sphere":
        if m is None or cfg.r is None:
            raise click.UsageError("sphere needs --m and --r")
        chart = geomlab.small_sphere(1 / math.sqrt(cfg.r), m)
        expected = {"a2": m * (cfg.r - 1), "alpha2": cfg.r - 1}
    else:
        if cfg.m1 is None or cfg.m2 is None:
            raise click.UsageError("torus needs --m1 and --m2")
        s = math.pi / 4 if s is None else s
        chart = geomlab.clifford_torus(cfg.m1, cfg.m2, math.sin(s), math.cos(s))
        expected = {"eigenvalues": sorted([1 / math.tan(s)] * cfg.m1 + [-math.tan(s)] * cfg.m2)}
    ff = geomlab.fundamental_forms(chart, h=h)
    lap = geomlab.verify_mean_curvature_laplacian(chart, h=h)
    out = {
        "f": ff.f,
        "a2": ff.a2,
        "alpha2": ff.alpha2,
        "eigenvalues": list(ff.shape_eigenvalues),
        "laplacian_residual": float(np.linalg.norm(lap)),
    }
    ok = out["laplacian_residual"] < 1e-4
    if kind == "sphere":
        ok &= abs(ff.a2 - expected["a2"]) < 1e-8 and abs(ff.alpha2 - expected["alpha2"]) < 1e-8
        verdicts = {rr: geomlab.check_criterion_on_chart(chart, rr, h=h) for rr in (cfg.r - 1, cfg.r, cfg.r + 1)}
        out["criterion"] = [f"{rr}:{v}" for rr, v in verdicts.items()]
        ok &= verdicts[cfg.r] and not verdicts[cfg.r - 1] and not verdicts[cfg.r + 1]
    else:
        # Eigenvalues are compared up to the global orientation sign.
        eig = np.array(ff.shape_eigenvalues)
        target = np.array(expected["eigenvalues"])
        err = min(np.max(np.abs(eig - target)), np.max(np.abs(np.sort(-eig) - target)))
        out["eigenvalue_error"] = float(err)
        ok &= err < 1e-8
        if cfg.r is not None:
            out["criterion"] = [f"{cfg.r}:{geomlab.check_criterion_on_chart(chart, cfg.r, h=h)}"]
    out["ok"] = bool(ok)
    rec = ResultRecord({**cfg.echo(), "kind": kind, "m": m, "s": s, "h": h}, out,
                       "finite-difference fundamental forms and rough Laplacian of H")
    if not ok:
        raise VerificationError(json.dumps(rec.to_json()))
    return [rec]


HEADLINE_B = (Fraction(8, 7), Fraction(10000))
BOUNDS_B = (Fraction(1), Fraction(8, 7), Fraction(2), Fraction(10), Fraction(100), Fraction(10000))


def cmd_table(cfg: RunConfig) -> list[ResultRecord]:
    out = []
    for degree in (3, 4, 6):
        r0 = next(r for r in range(2, 200) if criterion.classify(IsoparametricFamily(degree, 1), r).count)
        out.append(ResultRecord(
            {"degree": degree, "m1": "any"},
            {"quantity": "threshold", "value": r0,
             "roots": criterion.degree_roots(degree, r0)},
            "least r with proper r-harmonic members, equal multiplicities",
        ))
    for b in HEADLINE_B:
        row = threshold_row(b)
        out.append(ResultRecord(
            {"b": b},
            {"quantity": "critical_orders", "value": [row["rstar"], row["rstarstar"]],
             "R1": row["R1"], "R2": row["R2"]},
            "critical orders (r*, r**) for degree 4, b = m2/m1",
        ))
    for b in BOUNDS_B:
        out.append(ResultRecord(
            {"b": b},
            {"quantity": "upper_bounds", "value": list(thresholds.upper_bounds(b))},
            "integer upper bounds for (r*, r**)",
        ))
    return out


def _parse_range(text: str) -> list[int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise click.UsageError(f"--r-range expects LO:HI, got {text!r}") from None
    if hi < lo:
        raise click.UsageError("--r-range is empty")
    return list(range(lo, hi + 1))


def _parse_b_list(text: str) -> list[Fraction]:
    items = [x.strip() for x in text.split(",") if x.strip()]
    if not items:
        raise click.UsageError("--b-list is empty")
    try:
        out = [quartic.as_rational(x) for x in items]
    except (ValueError, ZeroDivisionError):
        raise click.UsageError(f"--b-list entries must be integers or p/q, got {text!r}") from None
    if any(b <= 0 for b in out):
        raise click.UsageError("--b-list entries must be positive")
    return out


def cmd_sweep(cfg: RunConfig, r_range: str | None, b_list: str | None) -> list[ResultRecord]:
    if (r_range is None) == (b_list is None):
        raise click.UsageError("give exactly one of --r-range or --b-list")
    if r_range is not None:
        if cfg.m1 is None:
            # Equal-multiplicity counts do not depend on m1.
            cfg = RunConfig(**{**cfg.__dict__, "m1": 1})
        fam = _family(cfg)
        rs = _parse_range(r_range)
        rows = _parallel_map(_count_row, [(fam.degree, fam.m1, fam.m2, r) for r in rs])
        return [ResultRecord({**cfg.echo(), "r": row["r"]}, row, "solution count per order r") for row in rows]
    bs = _parse_b_list(b_list)
    rows = _parallel_map(threshold_row, bs)
    return [ResultRecord({"b": b}, row, "critical orders per ratio b") for b, row in zip(bs, rows)]


# ---------------------------------------------------------------------------
# click wiring


def _rational(ctx, param, value):
    if value is None:
        return None
    try:
        b = quartic.as_rational(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"expected an integer or p/q, got {value!r}") from None
    if b <= 0:
        raise click.BadParameter("must be positive")
    return b


def _common(fn):
    opts = [
        click.option("--degree", type=int, help="Number of distinct principal curvatures."),
        click.option("--m1", type=click.IntRange(min=1)),
        click.option("--m2", type=click.IntRange(min=1), help="Defaults to m1."),
        click.option("--r", "r", type=click.IntRange(min=2), help="Harmonicity order."),
        click.option("--c", "c", type=click.Choice(["1", "0", "-1"]), default="1",
                     help="Sign of the ambient curvature."),
        click.option("--b", "b", callback=_rational, help="Multiplicity ratio m2/m1 (integer or p/q)."),
        click.option("--grid", type=click.IntRange(min=16), default=criterion.DEFAULT_GRID, show_default=True),
        click.option("--eps", type=click.FloatRange(min=0, min_open=True), default=criterion.DEFAULT_EPS,
                     show_default=True),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
        click.option("--output", "-o", type=click.Path(dir_okay=False, writable=True)),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _run(command: str, kw: dict, body: Callable[[RunConfig], list[ResultRecord]]) -> None:
    cfg = RunConfig(
        command=command,
        degree=kw.get("degree"),
        m1=kw.get("m1"),
        m2=kw.get("m2"),
        r=kw.get("r"),
        c=int(kw.get("c", "1")),
        b=kw.get("b"),
        grid=kw.get("grid", criterion.DEFAULT_GRID),
        eps=kw.get("eps", criterion.DEFAULT_EPS),
        format=kw.get("fmt", "json"),
        output=kw.get("output"),
    )
    if cfg.c != 1 and command in ("classify", "roots", "scan"):
        # No proper r-harmonic CMC hypersurface with constant |A|^2 exists when c <= 0.
        emit([ResultRecord(cfg.echo(), {"count": 0}, "nonexistence for c <= 0")], cfg)
        return
    try:
        records = body(cfg)
    except (VerificationError, DiscretizationError) as exc:
        raise NumericalFailure(str(exc)) from exc
    except UnsupportedError as exc:
        raise Unsupported(str(exc)) from exc
    except (PreconditionError, DomainError) as exc:
        raise click.UsageError(str(exc)) from exc
    except ArithmeticError as exc:
        raise NumericalFailure(f"{type(exc).__name__}: {exc}") from exc
    emit(records, cfg)


@click.group()
@click.version_option(__version__, prog_name="polyharm")
def cli():
    """Proper r-harmonic isoparametric hypersurfaces: criteria, thresholds, verification."""


@cli.command("invariants")
@_common
@click.option("--s", "s_values", type=float, multiple=True, help="Family parameter (repeatable).")
def invariants_cmd(s_values, **kw):
    """Principal curvatures, alpha and |A|^2 of members M_s."""
    _run("invariants", kw, lambda cfg: cmd_invariants(cfg, s_values))


@cli.command("roots")
@_common
def roots_cmd(**kw):
    """Roots of the reduced polynomial in its natural variable."""
    _run("roots", kw, cmd_roots)


@cli.command("classify")
@_common
def classify_cmd(**kw):
    """All proper r-harmonic members of a family."""
    _run("classify", kw, cmd_classify)


@cli.command("thresholds")
@_common
@click.option("--confirm", type=click.IntRange(min=2), help="Cross-check by brute force up to this r.")
def thresholds_cmd(confirm, **kw):
    """Critical orders r*, r** for degree 4."""
    _run("thresholds", kw, lambda cfg: cmd_thresholds(cfg, confirm))


@cli.command("bounds")
@_common
def bounds_cmd(**kw):
    """Closed-form upper bounds for r*, r**."""
    _run("bounds", kw, cmd_bounds)


@cli.command("scan")
@_common
def scan_cmd(**kw):
    """Grid scan of T_r(s) with sign-change brackets."""
    _run("scan", kw, cmd_scan)


@cli.command("verify-geom")
@_common
@click.option("--kind", type=click.Choice(["sphere", "torus"]), default="sphere", show_default=True)
@click.option("--m", "m", type=click.IntRange(min=1), help="Sphere dimension.")
@click.option("--s", "s", type=float, help="Torus parameter, radii (sin s, cos s).")
@click.option("--h", "h", type=click.FloatRange(min=0, min_open=True), default=1e-3, show_default=True)
def verify_geom_cmd(kind, m, s, h, **kw):
    """Finite-difference check of the curvature formulas on a chart."""
    _run("verify-geom", kw, lambda cfg: cmd_verify_geom(cfg, kind, m, s, h))


@cli.command("table")
@_common
def table_cmd(**kw):
    """Headline numbers: thresholds, critical orders, bounds."""
    _run("table", kw, cmd_table)


@cli.command("sweep")
@_common
@click.option("--r-range", help="LO:HI inclusive, with --degree and --m1.")
@click.option("--b-list", help="Comma-separated ratios, e.g. 1,8/7,2.")
def sweep_cmd(r_range, b_list, **kw):
    """Counts over a range of r, or thresholds over a list of b."""
    _run("sweep", kw, lambda cfg: cmd_sweep(cfg, r_range, b_list))


def main(argv: list[str] | None = None) -> None:
    cli.main(args=argv, prog_name="polyharm")


if __name__ == "__main__":
    main(sys.argv[1:])
