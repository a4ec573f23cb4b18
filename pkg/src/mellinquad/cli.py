"""Command-line front end.

Subcommands::

    integrate FUNC   one lattice sum with its error and a-priori bound
    table N          recompute one of the six reference tables (N = 1..6)
    rate-scan FUNC   errors, C and rate over a sigma sweep
    transform FUNC   numeric Mellin transform against the closed form
    classify FUNC    decay verdict for the errors over a sigma sweep

Exit status: 0 on success, 2 for invalid input, 3 for numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from .corpus import CORPUS_NAMES, CorpusEntry, branch_point, exp_decay, lookup, sinc_power, sobolev_example
from .error_rates import (
    Bandlimited,
    ExponentialRate,
    PolynomialRate,
    bound_sobolev_dist,
    classify_decay,
    rate_diagnostics,
)
from .mellin_core import DistanceGrid, dist_infinity, mellin_transform_numeric
from .numerics import DEFAULT_PRECISION, MIN_PRECISION, ConvergenceError, DomainError, HPReal, format_real, to_mpf
from .quadrature import (
    TruncationPlan,
    extend_gamma_left,
    plan_branch_point,
    plan_from_envelope,
    plan_gamma,
    plan_sinc_power,
    remainder_empirical,
)

TABLE_MIN_PRECISION = {5: 280}
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    """Invalid command-line configuration."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    function: Optional[str] = None
    table: Optional[int] = None
    c: Optional[float] = None
    sigma: Optional[str] = None
    sigma_range: Optional[str] = None
    precision_bits: int = DEFAULT_PRECISION
    tol: float = 1e-20
    output_format: str = "text"
    output_path: Optional[str] = None
    ell: int = 12
    a: Optional[str] = None
    k_max: int = 64
    t: float = 0.0
    left_tail: Optional[str] = None


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------


def parse_number(text: str) -> Fraction:
    """Exact rational from ``"0.25"``, ``"5/8"`` or ``"3"``."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a number: {text!r}") from exc


def parse_sigma_range(text: str) -> list:
    """``start:end:step`` (additive) or ``start:end:xF`` (multiplicative)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"sigma range must be start:end:step or start:end:xF, got {text!r}")
    start, end = parse_number(parts[0]), parse_number(parts[1])
    if start <= 0 or end < start:
        raise InputError("sigma range needs 0 < start <= end")
    values = []
    if parts[2].startswith("x"):
        factor = parse_number(parts[2][1:])
        if factor <= 1:
            raise InputError("multiplicative sigma step must exceed 1")
        s = start
        while s <= end:
            values.append(s)
            s *= factor
    else:
        step = parse_number(parts[2])
        if step <= 0:
            raise InputError("sigma step must be positive")
        s = start
        while s <= end:
            values.append(s)
            s += step
    return values


def sigma_text(s: Fraction) -> str:
    return str(s.numerator) if s.denominator == 1 else f"{float(s):.2f}"


def fmt(x, spec: str) -> str:
    if x is None:
        return ""
    if isinstance(x, HPReal):
        return format_real(x.mpf, spec)
    return format_real(mpmath.mpf(x), spec)


# ---------------------------------------------------------------------------
# per-function error measurement
# ---------------------------------------------------------------------------


def default_plan(entry: CorpusEntry, c, sigma, cfg: RunConfig) -> TruncationPlan:
    key = entry.name.partition(":")[0]
    if key == "sinc_power":
        return plan_sinc_power(int(entry.name.partition(":")[2]), sigma, cfg.ell)
    if key == "branch":
        return plan_branch_point(entry.spec.metadata.strip_halfwidth, sigma)
    if key == "expdecay" and c == entry.c:
        plan = plan_gamma(sigma)
        if cfg.left_tail == "converged":
            plan = extend_gamma_left(plan, sigma, cfg.precision_bits)
        return plan
    return plan_from_envelope(entry.spec, c, sigma, 2.0 ** -cfg.precision_bits)


def measure_error(entry: CorpusEntry, c, sigma, cfg: RunConfig):
    """``(plan, E)``; the closed-form remainder is used where one exists."""
    if entry.closed_form_remainder is not None and c == entry.c:
        return None, entry.closed_form_remainder(sigma, cfg.precision_bits)
    plan = default_plan(entry, c, sigma, cfg)
    return plan, remainder_empirical(entry.spec, entry.exact_integral, c, sigma, plan, cfg.precision_bits)


def sobolev_bound(entry: CorpusEntry, c, sigma, precision: int) -> Optional[HPReal]:
    """A-priori remainder bound from the Sobolev order, when it is certified."""
    order = entry.spec.metadata.sobolev_order
    if order is None or order <= 1 or entry.spec.transform_tail is None:
        return None
    with mp.workprec(precision):
        band = 2 * mpmath.pi * to_mpf(sigma, precision)
    d = dist_infinity(entry.spec, c, band, DistanceGrid(alpha=order), precision)
    if not d.tail_certified:
        return None
    return bound_sobolev_dist(order, sigma, d.value, precision)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


@dataclass
class Table:
    title: str
    header: list
    rows: list


def table_sinc(cfg: RunConfig) -> Table:
    entry = sinc_power(4, cfg.precision_bits)
    rows = []
    for j in range(1, 17):
        s = Fraction(j, 2)
        plan = plan_sinc_power(4, s, cfg.ell)
        E = remainder_empirical(entry.spec, entry.exact_integral, 0, s, plan, cfg.precision_bits)
        rows.append([f"{float(s):.2f}", str(plan.n_pos), fmt(E, ".6e")])
    return Table("sinc power m = 4", ["sigma", "K", "E"], rows)


BRANCH_ROWS = {Fraction(1, 2): range(2, 16), Fraction(5, 8): range(2, 13), Fraction(1): range(2, 11)}


def table_branch(cfg: RunConfig, default_a: Fraction) -> Table:
    a = parse_number(cfg.a) if cfg.a is not None else default_a
    if a <= 0:
        raise InputError("--a must be positive")
    entry = branch_point(a, cfg.precision_bits)
    sigmas = parse_sigma_range(cfg.sigma_range) if cfg.sigma_range else list(BRANCH_ROWS.get(a, range(2, 11)))
    rows = []
    for s in sigmas:
        plan = plan_branch_point(a, s)
        E = remainder_empirical(entry.spec, entry.exact_integral, 0, s, plan, cfg.precision_bits)
        d = rate_diagnostics(E, s, a=a, precision=cfg.precision_bits)
        rows.append([sigma_text(Fraction(s)), str(plan.n_pos), fmt(E, ".3e"), fmt(d.c_exp, ".3e"), fmt(d.rate, ".6f")])
    return Table(f"branch point a = {a}, J_a = {mpmath.nstr(entry.exact_integral.mpf, 40)}", ["sigma", "K", "E", "C", "rate"], rows)


def table_gamma(cfg: RunConfig, sigmas, left_tail: str, sigma_format=sigma_text) -> Table:
    entry = exp_decay(cfg.precision_bits)
    rows = []
    for s in sigmas:
        plan = plan_gamma(s)
        used = extend_gamma_left(plan, s, cfg.precision_bits) if left_tail == "converged" else plan
        E = remainder_empirical(entry.spec, entry.exact_integral, entry.c, s, used, cfg.precision_bits)
        with mp.workprec(cfg.precision_bits):
            a = mpmath.pi / 2
        d = rate_diagnostics(E, s, a=a, precision=cfg.precision_bits)
        rows.append([sigma_format(Fraction(s)), str(plan.n_neg), str(plan.n_pos), fmt(E, ".3e"), fmt(d.c_exp, ".3f"), fmt(d.rate, ".6f")])
    return Table(f"e^-r at c = 1/2 (left tail: {left_tail})", ["sigma", "N", "K", "E", "C", "rate"], rows)


def table_sobolev(cfg: RunConfig) -> Table:
    entry = sobolev_example(cfg.precision_bits)
    sigmas = parse_sigma_range(cfg.sigma_range) if cfg.sigma_range else [Fraction(2**j) for j in range(1, 14)]
    rows = []
    for s in sigmas:
        R = entry.closed_form_remainder(s, cfg.precision_bits)
        bound = sobolev_bound(entry, 0, s, cfg.precision_bits)
        with mp.workprec(cfg.precision_bits):
            over = bound.mpf / R.mpf
            C = R.mpf * to_mpf(s, cfg.precision_bits) ** 4
        rows.append([sigma_text(Fraction(s)), fmt(R, ".6e"), fmt(bound, ".6e"), fmt(over, ".12f"), fmt(C, ".12f")])
    return Table("Sobolev example, C -> 1/60", ["sigma", "R", "upper bound", "overestimation", "C"], rows)


def build_table(n: int, cfg: RunConfig) -> Table:
    need = TABLE_MIN_PRECISION.get(n, MIN_PRECISION)
    if cfg.precision_bits < need:
        raise InputError(f"table {n} needs at least {need} bits of precision, got {cfg.precision_bits}")
    if n == 1:
        return table_sinc(cfg)
    if n == 2:
        return table_branch(cfg, Fraction(1, 2))
    if n == 3:
        return table_branch(cfg, Fraction(1))
    if n == 4:
        sigmas = parse_sigma_range(cfg.sigma_range) if cfg.sigma_range else [Fraction(j, 4) for j in range(1, 9)]
        return table_gamma(cfg, sigmas, cfg.left_tail or "plan", lambda s: f"{float(s):.2f}")
    if n == 5:
        sigmas = parse_sigma_range(cfg.sigma_range) if cfg.sigma_range else [Fraction(j) for j in range(2, 16)]
        return table_gamma(cfg, sigmas, cfg.left_tail or "converged")
    if n == 6:
        return table_sobolev(cfg)
    raise InputError(f"no table {n}; choose 1..6")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def render(table: Table, output_format: str) -> str:
    if output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.header)
        writer.writerows(table.rows)
        return buf.getvalue()
    widths = [max(len(str(h)), *(len(r[i]) for r in table.rows)) if table.rows else len(h) for i, h in enumerate(table.header)]
    lines = [f"# {table.title}"]
    lines.append("  ".join(h.rjust(w) for h, w in zip(table.header, widths)))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in table.rows)
    return "\n".join(lines) + "\n"


def describe_verdict(sc) -> tuple:
    v = sc.verdict
    if isinstance(v, Bandlimited):
        return "Bandlimited", v.T
    if isinstance(v, ExponentialRate):
        return "ExponentialRate", v.a
    if isinstance(v, PolynomialRate):
        return "PolynomialRate", v.r_plus_alpha
    raise AssertionError(v)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _entry(cfg: RunConfig) -> CorpusEntry:
    if cfg.function is None:
        raise InputError("a function name is required")
    try:
        return lookup(cfg.function, cfg.precision_bits)
    except DomainError as exc:
        raise InputError(str(exc)) from exc


def _sigmas(cfg: RunConfig) -> list:
    if cfg.sigma_range:
        return parse_sigma_range(cfg.sigma_range)
    if cfg.sigma:
        s = parse_number(cfg.sigma)
        if s <= 0:
            raise InputError("sigma must be positive")
        return [s]
    raise InputError("give --sigma or --sigma-range")


def cmd_integrate(cfg: RunConfig) -> Table:
    entry = _entry(cfg)
    c = entry.c if cfg.c is None else cfg.c
    rows = []
    for s in _sigmas(cfg):
        plan = default_plan(entry, c, s, cfg)
        E = remainder_empirical(entry.spec, entry.exact_integral, c, s, plan, cfg.precision_bits)
        with mp.workprec(cfg.precision_bits):
            value = entry.exact_integral.mpf - E.mpf
        bound = sobolev_bound(entry, c, s, cfg.precision_bits) if c == entry.c else None
        if bound is None:
            bound = plan.truncation_bound
        rows.append([sigma_text(s), str(plan.n_neg), str(plan.n_pos), fmt(value, ".20e"), fmt(E, ".6e"), fmt(bound, ".6e")])
    return Table(f"{entry.name} at c = {c}", ["sigma", "N", "K", "value", "E", "bound"], rows)


def _rate_rows(entry: CorpusEntry, c, cfg: RunConfig):
    a = parse_number(cfg.a) if cfg.a is not None else entry.spec.metadata.strip_halfwidth
    alpha = entry.spec.metadata.sobolev_order
    out = []
    for s in _sigmas(cfg):
        plan, E = measure_error(entry, c, s, cfg)
        out.append((s, plan, E, a, alpha))
    return out


def cmd_rate_scan(cfg: RunConfig) -> Table:
    entry = _entry(cfg)
    c = entry.c if cfg.c is None else cfg.c
    rows = []
    for s, plan, E, a, alpha in _rate_rows(entry, c, cfg):
        N, K = (str(plan.n_neg), str(plan.n_pos)) if plan else ("", "")
        if E.mpf == 0:
            rows.append([sigma_text(s), N, K, fmt(E, ".6e"), "", "", ""])
            continue
        d = rate_diagnostics(E, s, a=a, alpha=alpha, precision=cfg.precision_bits)
        rows.append([sigma_text(s), N, K, fmt(E, ".6e"), fmt(d.c_exp, ".6e"), fmt(d.c_poly, ".6e"), fmt(d.rate, ".6f")])
    return Table(f"{entry.name} at c = {c}", ["sigma", "N", "K", "E", "C_exp", "C_poly", "rate"], rows)


def cmd_classify(cfg: RunConfig) -> Table:
    entry = _entry(cfg)
    c = entry.c if cfg.c is None else cfg.c
    samples = [(s, E) for s, _, E, _, _ in _rate_rows(entry, c, cfg)]
    try:
        sc = classify_decay(samples, cfg.precision_bits)
    except DomainError as exc:
        raise InputError(str(exc)) from exc
    name, param = describe_verdict(sc)
    alt = ""
    if sc.alternative is not None:
        alt = describe_verdict(type(sc)(sc.alternative, 0.0))[0]
    return Table(f"{entry.name} decay", ["verdict", "parameter", "residual", "alternative"], [[name, f"{param:.4f}", f"{sc.confidence:.3e}", alt]])


def cmd_transform(cfg: RunConfig) -> Table:
    entry = _entry(cfg)
    c = entry.c if cfg.c is None else cfg.c
    num = mellin_transform_numeric(entry.spec, c, cfg.t, tol=cfg.tol, precision=cfg.precision_bits)
    row = [f"{c:g}", f"{cfg.t:g}", fmt(num.re, ".20e"), fmt(num.im, ".20e")]
    if entry.spec.closed_form_transform is not None:
        ref = entry.spec.transform(c, cfg.t, cfg.precision_bits)
        with mp.workprec(cfg.precision_bits):
            diff = abs(num.mpc - ref)
        row += [fmt(ref.real, ".20e"), fmt(ref.imag, ".20e"), fmt(diff, ".3e")]
    else:
        row += ["", "", ""]
    return Table(f"Mellin transform of {entry.name}", ["c", "t", "re", "im", "closed_re", "closed_im", "abs_diff"], [row])


def run(cfg: RunConfig) -> int:
    """Execute one configuration; returns the process exit status."""
    try:
        if cfg.precision_bits < MIN_PRECISION:
            raise InputError(f"precision must be at least {MIN_PRECISION} bits")
        if cfg.command == "table":
            table = build_table(cfg.table, cfg)
        elif cfg.command == "integrate":
            table = cmd_integrate(cfg)
        elif cfg.command == "rate-scan":
            table = cmd_rate_scan(cfg)
        elif cfg.command == "classify":
            table = cmd_classify(cfg)
        elif cfg.command == "transform":
            table = cmd_transform(cfg)
        else:
            raise InputError(f"unknown command {cfg.command!r}")
        text = render(table, cfg.output_format)
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=float, help="line abscissa (default: the function's own)")
    common.add_argument("--sigma", help="lattice density sigma")
    common.add_argument("--sigma-range", help="start:end:step or start:end:xF")
    common.add_argument("--precision-bits", type=int, default=None, help=f"working precision (default {DEFAULT_PRECISION})")
    common.add_argument("--tol", type=float, default=1e-20, help="absolute tolerance of the numeric transform")
    common.add_argument("--format", choices=("text", "csv"), default="text")
    common.add_argument("--out", help="write output to this file")
    common.add_argument("--ell", type=int, default=12, help="sinc-power truncation target 10^-ell")
    common.add_argument("--a", help="branch-point parameter, e.g. 1/2")
    common.add_argument("--k-max", type=int, default=64)
    common.add_argument("--left-tail", choices=("plan", "converged"), help="left truncation of the e^-r sums")

    parser = argparse.ArgumentParser(prog="mellinquad", description="Mellin-Poisson quadrature on the half-line.")
    sub = parser.add_subparsers(dest="command", required=True)
    names = ", ".join(CORPUS_NAMES)
    for cmd in ("integrate", "rate-scan", "classify"):
        p = sub.add_parser(cmd, parents=[common])
        p.add_argument("function", help=names)
    p = sub.add_parser("transform", parents=[common])
    p.add_argument("function", help=names)
    p.add_argument("--t", type=float, default=0.0, help="imaginary coordinate")
    p = sub.add_parser("table", parents=[common])
    p.add_argument("table", type=int, choices=range(1, 7))
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    prec = ns.precision_bits
    if prec is None:
        prec = max(DEFAULT_PRECISION, TABLE_MIN_PRECISION.get(getattr(ns, "table", None), 0))
    return RunConfig(
        command=ns.command,
        function=getattr(ns, "function", None),
        table=getattr(ns, "table", None),
        c=ns.c,
        sigma=ns.sigma,
        sigma_range=ns.sigma_range,
        precision_bits=prec,
        tol=ns.tol,
        output_format=ns.format,
        output_path=ns.out,
        ell=ns.ell,
        a=ns.a,
        k_max=ns.k_max,
        t=getattr(ns, "t", 0.0),
        left_tail=ns.left_tail,
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
