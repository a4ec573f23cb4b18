"""Reference integrands with known integrals.

Each entry pairs a ``FunctionSpec`` with the abscissa ``c`` it is meant to
be integrated at and the exact value of ``int_0^inf f(r) r^c dr/r``.

========================  ====================================================
name                      integrand
========================  ====================================================
``sinc_power:m``          ``(sin(pi log r) / (pi log r))^(2m)``
``branch:a``              ``sinc_power:4`` times ``sqrt(a^2 + log^2 r)``
``expdecay``              ``e^-r`` at ``c = 1/2`` (integral ``Gamma(1/2)``)
``sobolev``               ``r log^2 r`` below 1, ``log^2 r / r`` above
========================  ====================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import mpmath
import numpy as np
from mpmath import mp

from .mellin_core import FunctionSpec, Regularity
from .numerics import DEFAULT_PRECISION, DomainError, HPReal, check_precision, to_mpf
from .quadrature import accelerated_tail

# Integrals of the branch-point integrand, to 40 decimals.
BRANCH_REFERENCE = {
    Fraction(1, 2): "0.2552373684721620868389158816136888733878",
    Fraction(5, 8): "0.3123770437749010235851625171708586776416",
    Fraction(1, 1): "0.4876105654991947134580915823151850342698",
}

# Lattice spacing used when a branch-point integral has to be computed.
BRANCH_ORACLE_SIGMA = 16


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    spec: FunctionSpec
    c: float
    exact_integral: HPReal
    notes: str = ""
    closed_form_remainder: Optional[Callable] = None
    derived_exact: bool = False


# ---------------------------------------------------------------------------
# sinc powers
# ---------------------------------------------------------------------------


def _sinc_power_log(x, n: int, prec: int):
    """``(sin(pi x)/(pi x))^n`` with the removable point handled by a series."""
    if abs(x) < mpmath.ldexp(1, -prec // 4):
        y2 = (mpmath.pi * x) ** 2
        return (1 - y2 / 6 + y2 * y2 / 120) ** n
    y = mpmath.pi * x
    return (mpmath.sin(y) / y) ** n


def _sinc_power_vec(n: int):
    def vec(x):
        x = np.asarray(x, dtype=np.float64)
        # sin(pi x) from the exactly reduced argument keeps full relative accuracy
        red = np.remainder(x, 2.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.sin(np.pi * red) / (np.pi * x)
        v = np.where(x == 0, 1.0, v)
        return v**n

    return vec


def cardinal_bspline(n: int, x):
    """Centred cardinal B-spline of order ``n`` (support ``[-n/2, n/2]``)."""
    x = mpmath.mpf(x)
    half = mpmath.mpf(n) / 2
    if abs(x) >= half:
        return mpmath.mpf(0)
    total = mpmath.mpf(0)
    for j in range(n + 1):
        u = x + half - j
        if u > 0:
            total += (-1) ** j * math.comb(n, j) * u ** (n - 1)
    return total / math.factorial(n - 1)


def sinc_power_integral(m: int) -> Fraction:
    """Exact ``int (sin(pi x)/(pi x))^(2m) dx`` as a fraction.

    The integral is the transform at ``v = 0``, i.e. the centred cardinal
    B-spline of order ``2m`` at its midpoint.
    """
    n = 2 * m
    total = sum((-1) ** j * math.comb(n, j) * (m - j) ** (n - 1) for j in range(m))
    return Fraction(total, math.factorial(n - 1))


def _check_c_zero(c, what):
    if c != 0:
        raise DomainError(f"{what} is only defined on the line c = 0")


@lru_cache(maxsize=None)
def sinc_power(m: int, precision: int = DEFAULT_PRECISION) -> CorpusEntry:
    m = int(m)
    if m < 1:
        raise DomainError(f"sinc power needs m >= 1, got {m}")
    n = 2 * m
    band = 2 * math.pi * m

    def log_evaluator(x, prec):
        return _sinc_power_log(x, n, prec)

    def evaluator(r, prec):
        return _sinc_power_log(mpmath.log(r), n, prec)

    def transform(c, v, prec):
        _check_c_zero(c, "the transform of a sinc power")
        return mpmath.mpc(cardinal_bspline(n, v / (2 * mpmath.pi)))

    def envelope(r, c):
        _check_c_zero(float(c), "the sinc-power envelope")
        x = abs(float(mpmath.log(r)))
        return min(1.0, (math.pi * x) ** -n) if x > 0 else 1.0

    def tail(c, V, alpha):
        if c != 0:
            return None
        if V >= band:
            return 0.0
        return band**alpha * float(cardinal_bspline(n, 0))

    spec = FunctionSpec(
        evaluator=evaluator,
        closed_form_transform=transform,
        decay_envelope=envelope,
        metadata=Regularity(bandwidth=band),
        name=f"sinc_power:{m}",
        log_evaluator=log_evaluator,
        vector_log_evaluator=_sinc_power_vec(n),
        transform_tail=tail,
    )
    exact = sinc_power_integral(m)
    return CorpusEntry(
        name=spec.name,
        spec=spec,
        c=0.0,
        exact_integral=HPReal(exact, precision),
        notes=f"exact integral {exact}; Mellin-bandlimited to [-{n}pi, {n}pi]",
    )


# ---------------------------------------------------------------------------
# branch point
# ---------------------------------------------------------------------------


def _as_fraction(a) -> Optional[Fraction]:
    try:
        return Fraction(str(a)) if not isinstance(a, Fraction) else a
    except (ValueError, TypeError):
        return None


def branch_point_spec(a) -> FunctionSpec:
    a_f = float(a)
    if not a_f > 0:
        raise DomainError(f"branch point needs a > 0, got {a}")
    base_vec = _sinc_power_vec(8)

    def log_evaluator(x, prec):
        aa = to_mpf(a, prec)
        return _sinc_power_log(x, 8, prec) * mpmath.sqrt(aa * aa + x * x)

    def evaluator(r, prec):
        return log_evaluator(mpmath.log(r), prec)

    def vec(x):
        return base_vec(x) * np.sqrt(a_f * a_f + x * x)

    def envelope(r, c):
        _check_c_zero(float(c), "the branch-point envelope")
        x = abs(float(mpmath.log(r)))
        s = min(1.0, (math.pi * x) ** -8) if x > 0 else 1.0
        return s * math.sqrt(a_f * a_f + x * x)

    return FunctionSpec(
        evaluator=evaluator,
        decay_envelope=envelope,
        metadata=Regularity(strip_halfwidth=a_f),
        name=f"branch:{a}",
        log_evaluator=log_evaluator,
        vector_log_evaluator=vec,
    )


def branch_point_integral(a, sigma=BRANCH_ORACLE_SIGMA, precision: int = DEFAULT_PRECISION) -> HPReal:
    """Self-convergence value of the branch-point integral.

    The lattice sum at integer spacing ``sigma`` is evaluated with a short
    explicit head and a block-Richardson tail (the numerator
    ``sin^8(pi k / sigma)`` repeats every ``sigma`` terms).  The remaining
    error is the quadrature remainder, ``O(e^(-2 pi a sigma))``.
    """
    sigma = int(sigma)
    if sigma < 1:
        raise DomainError("oracle spacing must be a positive integer")
    spec = branch_point_spec(a)
    work = precision + 32
    with mp.workprec(work):
        s = mpmath.mpf(sigma)

        def term(k):
            return spec.log_evaluator(mpmath.mpf(k) / s, work)

        head_len = 4 * sigma
        head = mpmath.fsum(term(k) for k in range(1, head_len + 1))
        tail = accelerated_tail(term, head_len + 1, period=sigma, precision=work)
        value = (spec.log_evaluator(mpmath.mpf(0), work) + 2 * (head + tail)) / s
    return HPReal(value, precision)


def branch_point(a, precision: int = DEFAULT_PRECISION) -> CorpusEntry:
    spec = branch_point_spec(a)
    frac = _as_fraction(a)
    if frac in BRANCH_REFERENCE:
        exact = HPReal(BRANCH_REFERENCE[frac], precision)
        derived, notes = False, "exact integral from a 40-digit reference constant"
    else:
        exact = branch_point_integral(a, precision=precision)
        derived = True
        notes = f"exact integral derived by self-convergence at sigma = {BRANCH_ORACLE_SIGMA}"
    return CorpusEntry(name=spec.name, spec=spec, c=0.0, exact_integral=exact, notes=notes, derived_exact=derived)


# ---------------------------------------------------------------------------
# e^-r
# ---------------------------------------------------------------------------


def exp_decay(precision: int = DEFAULT_PRECISION) -> CorpusEntry:
    def evaluator(r, prec):
        return mpmath.exp(-r)

    def log_evaluator(x, prec):
        return mpmath.exp(-mpmath.exp(x))

    def vec(x):
        with np.errstate(over="ignore"):
            return np.exp(-np.exp(x))

    def transform(c, v, prec):
        if c <= 0:
            raise DomainError("the transform of e^-r needs c > 0")
        return mpmath.gamma(mpmath.mpc(c, v))

    def envelope(r, c):
        c = float(c)
        if c <= 0:
            raise DomainError("e^-r r^c is integrable against dr/r only for c > 0")
        if r <= 1:
            return float(r) ** c
        return float(mpmath.exp(c * mpmath.log(r) - r))

    spec = FunctionSpec(
        evaluator=evaluator,
        closed_form_transform=transform,
        decay_envelope=envelope,
        metadata=Regularity(strip_halfwidth=math.pi / 2),
        name="expdecay",
        log_evaluator=log_evaluator,
        vector_log_evaluator=vec,
    )
    with mp.workprec(precision):
        exact = HPReal(mpmath.sqrt(mpmath.pi), precision)
    return CorpusEntry(name="expdecay", spec=spec, c=0.5, exact_integral=exact, notes="integral Gamma(1/2) = sqrt(pi)")


# ---------------------------------------------------------------------------
# Mellin-Sobolev example
# ---------------------------------------------------------------------------


def sobolev_remainder(sigma, precision: int = DEFAULT_PRECISION) -> HPReal:
    """Closed-form quadrature remainder of the ``sobolev`` entry at ``c = 0``."""
    precision = check_precision(precision)
    # the two terms cancel to about log2(sigma^4) bits
    work = precision + 8 * max(8, int(math.log2(max(float(sigma), 1.0))) + 8)
    with mp.workprec(work):
        s = to_mpf(sigma, work)
        q = mpmath.exp(-1 / s)
        value = 4 - 2 / s**3 * (q * q + q) / (-mpmath.expm1(-1 / s)) ** 3
    return HPReal(value, precision)


def sobolev_example(precision: int = DEFAULT_PRECISION) -> CorpusEntry:
    def log_evaluator(x, prec):
        return x * x * mpmath.exp(-abs(x))

    def evaluator(r, prec):
        lr = mpmath.log(r)
        return r * lr * lr if r < 1 else lr * lr / r

    def vec(x):
        return x * x * np.exp(-np.abs(x))

    def transform(c, v, prec):
        if abs(c) >= 1:
            raise DomainError("the transform of the Sobolev example needs |c| < 1")
        if c == 0:
            w = v * v
            return mpmath.mpc(4 * (1 - 3 * w) / (1 + w) ** 3)
        s = mpmath.mpc(c, v)
        return 2 / (1 + s) ** 3 + 2 / (1 - s) ** 3

    def vector_transform(c, v):
        s = c + 1j * v
        return 2 / (1 + s) ** 3 + 2 / (1 - s) ** 3

    def envelope(r, c):
        c = float(c)
        x = float(mpmath.log(r))
        return x * x * math.exp(-(abs(x) - c * x)) if abs(x) < 700 else 0.0

    def tail(c, V, alpha):
        # at c = 0: |v^4 M(iv)| = 4 v^4 (3v^2 - 1)/(1 + v^2)^3 < 12
        if c == 0 and alpha <= 4 and V >= 1:
            return 12.0 * V ** (alpha - 4)
        # otherwise 2/|1 +- s|^3 <= 2/|v|^3 each
        if abs(c) < 1 and alpha <= 3 and V >= 1:
            return 4.0 * V ** (alpha - 3)
        return None

    spec = FunctionSpec(
        evaluator=evaluator,
        closed_form_transform=transform,
        decay_envelope=envelope,
        metadata=Regularity(sobolev_order=4.0, breakpoints=(0.0,)),
        name="sobolev",
        log_evaluator=log_evaluator,
        vector_log_evaluator=vec,
        transform_tail=tail,
        vector_transform=vector_transform,
    )
    return CorpusEntry(
        name="sobolev",
        spec=spec,
        c=0.0,
        exact_integral=HPReal(4, precision),
        notes="integral 4; transform 4(1-3v^2)/(1+v^2)^3 on c = 0",
        closed_form_remainder=sobolev_remainder,
    )


# ---------------------------------------------------------------------------
# lookup
# ---------------------------------------------------------------------------

CORPUS_NAMES = ("sinc_power:m", "branch:a", "expdecay", "sobolev")


def lookup(name: str, precision: int = DEFAULT_PRECISION) -> CorpusEntry:
    """Resolve ``sinc_power:m``, ``branch:a``, ``expdecay`` or ``sobolev``."""
    key, _, arg = name.partition(":")
    if key == "sinc_power" and arg:
        try:
            return sinc_power(int(arg), precision)
        except ValueError:
            pass
    elif key == "branch" and arg:
        frac = _as_fraction(arg)
        if frac is not None and frac > 0:
            return branch_point(frac if frac in BRANCH_REFERENCE else arg, precision)
    elif key == "expdecay" and not arg:
        return exp_decay(precision)
    elif key == "sobolev" and not arg:
        return sobolev_example(precision)
    raise DomainError(f"unknown corpus function {name!r}; expected one of {', '.join(CORPUS_NAMES)}")
