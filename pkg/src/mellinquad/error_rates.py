"""A-priori remainder bounds, rate diagnostics and decay classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import mpmath
import numpy as np
from mpmath import mp

from .mellin_core import GUARD_BITS, FunctionSpec, mellin_translate
from .numerics import (
    DEFAULT_PRECISION,
    DomainError,
    HPReal,
    check_precision,
    hp,
    moebius,
    to_mpf,
    zeta,
)
from .quadrature import TruncationPlan, remainder_empirical


def bound_sobolev_dist(alpha, sigma, dist, precision: int = DEFAULT_PRECISION) -> HPReal:
    """``2 zeta(alpha) dist / (2 pi sigma)^alpha``.

    ``dist`` is ``sup_{|v| >= 2 pi sigma} |v^alpha M(c+iv)|``, the distance
    of the ``alpha``-th Mellin derivative from the band ``[-2 pi sigma, 2 pi sigma]``.
    """
    precision = check_precision(precision)
    if not float(alpha) > 1:
        raise DomainError(f"the bound needs alpha > 1, got {alpha}")
    if not float(sigma) > 0:
        raise DomainError("sigma must be positive")
    work = precision + GUARD_BITS
    with mp.workprec(work):
        al = to_mpf(alpha, work)
        d = to_mpf(dist, work)
        if d < 0:
            raise DomainError("distance must be nonnegative")
        value = 2 * zeta(al, work).mpf * d / (2 * mpmath.pi * to_mpf(sigma, work)) ** al
    return HPReal(value, precision)


# ---------------------------------------------------------------------------
# Rate diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateDiagnostics:
    """One row of a convergence study.

    ``c_exp = E e^(2 pi a sigma)`` and ``rate = -log|E| / sigma`` when the
    strip half-width ``a`` is known; ``c_poly = E sigma^alpha`` for a
    polynomial rate of order ``alpha``.
    """

    sigma: HPReal
    error: HPReal
    c_exp: Optional[HPReal]
    rate: HPReal
    c_poly: Optional[HPReal] = None


def rate_diagnostics(E, sigma, a=None, alpha=None, precision: int = DEFAULT_PRECISION) -> RateDiagnostics:
    precision = check_precision(precision)
    with mp.workprec(precision):
        e = E.mpf if isinstance(E, HPReal) else to_mpf(E, precision)
        s = to_mpf(sigma, precision)
        if not s > 0:
            raise DomainError("sigma must be positive")
        if e == 0:
            raise DomainError("rate is undefined for a zero error")
        rate = -mpmath.log(abs(e)) / s
        c_exp = None
        if a is not None:
            c_exp = HPReal(e * mpmath.exp(2 * mpmath.pi * to_mpf(a, precision) * s), precision)
        c_poly = None
        if alpha is not None:
            c_poly = HPReal(e * s ** to_mpf(alpha, precision), precision)
    return RateDiagnostics(HPReal(s, precision), HPReal(e, precision), c_exp, HPReal(rate, precision), c_poly)


# ---------------------------------------------------------------------------
# Moebius inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InversionResult:
    value: object
    bound: HPReal
    terms: int


def moebius_invert(remainders: Sequence, n: int, precision: int = DEFAULT_PRECISION) -> InversionResult:
    """Recover ``M[f_{c+}](i 2 pi n sigma)`` from remainders at multiples of sigma.

    ``remainders[k-1]`` holds ``R_{c, k sigma}``.  The result is
    ``-1/2 sum_{k <= k_max/n} mu(k) R_{c, n k sigma}``; ``bound`` is
    ``1/2 sum |R_{c, n k sigma}|`` over the same terms, which bounds the
    magnitude of the recovered sample.
    """
    precision = check_precision(precision)
    n = int(n)
    if n < 1:
        raise DomainError("n must be a positive integer")
    k_max = len(remainders)
    if k_max < n:
        raise DomainError(f"need remainders up to index {n}, got {k_max}")
    work = precision + GUARD_BITS
    terms = k_max // n
    with mp.workprec(work):
        vals = []
        for r in remainders:
            if isinstance(r, HPReal):
                vals.append(r.mpf)
            elif hasattr(r, "mpc"):
                vals.append(r.mpc)
            else:
                vals.append(mpmath.mpmathify(r))
        total = mpmath.fsum(moebius(k) * vals[n * k - 1] for k in range(1, terms + 1))
        bound = mpmath.fsum(abs(vals[n * k - 1]) for k in range(1, terms + 1)) / 2
        value = -total / 2
    return InversionResult(hp(value, precision), HPReal(bound, precision), terms)


# ---------------------------------------------------------------------------
# Translated remainder scan
# ---------------------------------------------------------------------------


def translation_grid(sigma, h_count: int, precision: int = DEFAULT_PRECISION) -> list:
    """Log-equispaced ``h`` in ``[e^(-1/(2 sigma)), e^(1/(2 sigma))]``.

    Endpoints and ``h = 1`` are always included, so an even ``h_count``
    yields ``h_count + 1`` points; ``h_count = 1`` gives just ``{1}``.
    """
    h_count = int(h_count)
    if h_count < 1:
        raise DomainError("h_count must be positive")
    with mp.workprec(precision):
        if h_count == 1:
            return [mpmath.mpf(1)]
        half = 1 / (2 * to_mpf(sigma, precision))
        steps = h_count - 1 if h_count % 2 else h_count
        return [mpmath.exp(-half + 2 * half * j / steps) for j in range(steps + 1)]


def remainder_translated_sup(
    f: FunctionSpec,
    exact_map: Union[Callable, object],
    c,
    sigma,
    plan: TruncationPlan,
    h_count: int,
    precision: int = DEFAULT_PRECISION,
) -> HPReal:
    """``max_h |exact(h) - Q_sigma[tau_h^c f]|`` over :func:`translation_grid`.

    ``exact_map`` is either a callable ``h -> exact integral`` or a constant
    (the integral is translation invariant, so a constant is the usual
    choice).
    """
    precision = check_precision(precision)
    best = mpmath.mpf(0)
    for h in translation_grid(sigma, h_count, precision + GUARD_BITS):
        exact = exact_map(h) if callable(exact_map) else exact_map
        fh = f if h == 1 else mellin_translate(f, h, c)
        err = remainder_empirical(fh, exact, c, sigma, plan, precision)
        best = max(best, abs(err.mpf if isinstance(err, HPReal) else err.mpc))
    return HPReal(best, precision)


# ---------------------------------------------------------------------------
# Decay classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bandlimited:
    """Error at the noise floor for every sample; ``T`` bounds the bandwidth."""

    T: float


@dataclass(frozen=True)
class ExponentialRate:
    a: float


@dataclass(frozen=True)
class PolynomialRate:
    r_plus_alpha: float


@dataclass(frozen=True)
class SpaceClass:
    """Fitted decay verdict.

    ``confidence`` is the RMS residual of the chosen model in ``log|E|``
    (0 for a bandlimited verdict); ``alternative`` holds the other model
    when the two fits were too close to separate.
    """

    verdict: Union[Bandlimited, ExponentialRate, PolynomialRate]
    confidence: float
    log_constant: Optional[float] = None
    alternative: Optional[Union[ExponentialRate, PolynomialRate]] = None


# Fits count as distinct only when one residual beats the other by this factor.
MODEL_MARGIN = 0.9
# Errors varying by at most this factor form a plateau.
PLATEAU_RATIO = 2.0


def _fit(xs, ys):
    A = np.vstack([np.ones_like(xs), xs]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - A @ coef
    return coef[0], coef[1], float(np.sqrt(np.mean(resid**2)))


def _floor_start(errs, zero_tol) -> int:
    """Index from which every error is numerically zero or on a plateau."""
    i = len(errs) - 1
    lo = hi = errs[i]
    while i > 0:
        e = errs[i - 1]
        nlo, nhi = min(lo, e), max(hi, e)
        if not (nhi <= zero_tol or (nlo > 0 and nhi / nlo <= PLATEAU_RATIO)):
            break
        lo, hi, i = nlo, nhi, i - 1
    return i


def classify_decay(samples: Sequence, precision: int = DEFAULT_PRECISION, zero_tol=None) -> SpaceClass:
    """Decide between bandlimited, exponential and polynomial remainder decay.

    ``samples`` are ``(sigma, E)`` pairs with at least four distinct,
    increasing ``sigma``.  Rates are asymptotic statements, so only the
    upper half of the sweep (at least four samples) is examined.  If there
    every ``|E|`` is below ``zero_tol`` (default: a quarter of the decimal
    digits carried by ``precision``) or the errors sit on a plateau, the
    rule is exact up to truncation and the verdict is ``Bandlimited``, with
    ``T = 2 pi sigma`` at the start of the floor; an exactly zero error in
    the window gives the same verdict.  Otherwise ``log|E|`` is
    fitted against ``sigma`` (slope ``-2 pi a``) and against ``log sigma``
    (slope ``-(r + alpha)``), and the model with the clearly smaller
    residual wins; near-ties go to the exponential model with the
    polynomial fit reported alongside.
    """
    pts = [(float(s), mpmath.mpf(e.mpf if isinstance(e, HPReal) else e)) for s, e in samples]
    if len(pts) < 4:
        raise DomainError("classification needs at least 4 samples")
    sig = [s for s, _ in pts]
    if any(b <= a for a, b in zip(sig, sig[1:])) or sig[0] <= 0:
        raise DomainError("sigma values must be positive and strictly increasing")
    errs = [abs(e) for _, e in pts]
    if all(e == errs[0] for e in errs):
        raise DomainError("degenerate fit: all errors are equal")
    if zero_tol is None:
        zero_tol = mpmath.mpf(10) ** -(precision * math.log10(2) / 4)
    keep = max(4, (len(pts) + 1) // 2)
    first = len(pts) - keep
    floor = _floor_start(errs, zero_tol)
    if floor <= first:
        return SpaceClass(Bandlimited(2 * math.pi * sig[floor]), 0.0)
    xs = np.array(sig[first:])
    tail = errs[first:]
    if min(tail) == 0:
        # an exactly vanishing error only arises when the rule is exact
        return SpaceClass(Bandlimited(2 * math.pi * sig[first + tail.index(0)]), 0.0)
    ys = np.array([float(mpmath.log(e)) for e in tail])
    c_exp, slope_exp, res_exp = _fit(xs, ys)
    c_poly, slope_poly, res_poly = _fit(np.log(xs), ys)
    exp_model = ExponentialRate(float(-slope_exp / (2 * math.pi)))
    poly_model = PolynomialRate(float(-slope_poly))
    c_exp, c_poly = float(c_exp), float(c_poly)
    if res_poly < MODEL_MARGIN * res_exp:
        return SpaceClass(poly_model, res_poly, c_poly)
    if res_exp < MODEL_MARGIN * res_poly:
        return SpaceClass(exp_model, res_exp, c_exp)
    return SpaceClass(exp_model, res_exp, c_exp, alternative=poly_model)
