"""Exponentially spaced trapezoidal quadrature on the half-line.

For a spacing parameter ``sigma > 0`` the rule is

    int_0^inf f(r) r^c dr/r  ~  (1/sigma) sum_k f(e^(k/sigma)) e^(kc/sigma),

truncated to ``-N <= k <= K``.  Its remainder equals minus the sum of the
Mellin transform over the shifted lattice ``c + 2 pi i k sigma``, ``k != 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
from mpmath import mp

from .mellin_core import GUARD_BITS, FunctionSpec, UncertifiedTailWarning
from .numerics import (
    DEFAULT_PRECISION,
    ConvergenceError,
    DomainError,
    HPReal,
    check_precision,
    hp,
    to_mpf,
)

# Largest |k / sigma| (as a power of e) the lattice may reach.
MAX_LOG_ABSCISSA = 2.0**60
# Largest start index, in blocks, handed to Richardson extrapolation.
TAIL_BLOCK_OFFSET = 128


@dataclass(frozen=True)
class TruncationPlan:
    """Retained lattice indices ``-n_neg <= k <= n_pos``."""

    n_neg: int
    n_pos: int
    truncation_bound: Optional[float] = None

    def __post_init__(self):
        if self.n_neg < 0 or self.n_pos < 0:
            raise DomainError("truncation indices must be nonnegative")

    @classmethod
    def symmetric(cls, K: int, truncation_bound: Optional[float] = None) -> TruncationPlan:
        return cls(K, K, truncation_bound)


@dataclass(frozen=True)
class QuadratureResult:
    value: object
    plan: TruncationPlan
    sigma: float
    c: float
    truncation_bound: Optional[float] = None


def _check_sigma(sigma):
    if not float(sigma) > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")


def quad_sum(f: FunctionSpec, c, sigma, plan: TruncationPlan, precision: int = DEFAULT_PRECISION) -> QuadratureResult:
    """``(1/sigma) sum_{k=-N}^{K} f(e^(k/sigma)) e^(kc/sigma)``, ascending in ``k``."""
    precision = check_precision(precision)
    _check_sigma(sigma)
    if f.is_zero:
        return QuadratureResult(HPReal(0, precision), plan, float(sigma), float(c), plan.truncation_bound)
    reach = max(plan.n_neg, plan.n_pos) / float(sigma)
    if reach > MAX_LOG_ABSCISSA:
        raise OverflowError(f"lattice point e^{reach:g} exceeds the supported exponent range")
    work = precision + GUARD_BITS
    with mp.workprec(work):
        s = to_mpf(sigma, work)
        cc = to_mpf(c, work)
        total = mpmath.mpf(0)
        for k in range(-plan.n_neg, plan.n_pos + 1):
            x = k / s
            term = f.at_log(x, work)
            if cc:
                term *= mpmath.exp(cc * x)
            total += term
        value = total / s
    return QuadratureResult(hp(value, precision), plan, float(sigma), float(c), plan.truncation_bound)


# ---------------------------------------------------------------------------
# Planners
# ---------------------------------------------------------------------------


def plan_sinc_power(m: int, sigma, ell: int) -> TruncationPlan:
    """Symmetric plan keeping the tail of a sinc power below ``10^-ell``.

    ``K = ceil((sigma/pi) (2 * 10^ell / ((2m-1) pi))^(1/(2m-1)))``; the
    returned bound is ``(2/((2m-1) pi)) (sigma/(K pi))^(2m-1)``.
    """
    m, ell = int(m), int(ell)
    if m < 1 or ell < 1:
        raise DomainError("plan_sinc_power needs m >= 1 and ell >= 1")
    _check_sigma(sigma)
    with mp.workprec(128):
        s = to_mpf(sigma, 128)
        p = 2 * m - 1
        K = int(mpmath.ceil(s / mpmath.pi * (2 * mpmath.mpf(10) ** ell / (p * mpmath.pi)) ** (mpmath.mpf(1) / p)))
        bound = 2 / (p * mpmath.pi) * (s / (K * mpmath.pi)) ** p
    return TruncationPlan(K, K, float(bound))


def _branch_lhs(s, a, K):
    q = s / K
    return q**6 / 3 + a * a / 8 * q**8


def plan_branch_point(a, sigma) -> TruncationPlan:
    """Smallest symmetric ``K >= ceil(sigma)`` whose tail estimate meets
    ``(1/3)(sigma/K)^6 + (a^2/8)(sigma/K)^8 <= (pi^8/10) e^(-2 pi a sigma)``.

    Doubling brackets the answer, bisection pins it down.
    """
    if not float(a) > 0:
        raise DomainError(f"plan_branch_point needs a > 0, got {a}")
    _check_sigma(sigma)
    with mp.workprec(128):
        s, aa = to_mpf(sigma, 128), to_mpf(a, 128)
        rhs = mpmath.pi**8 / 10 * mpmath.exp(-2 * mpmath.pi * aa * s)

        def ok(K):
            return _branch_lhs(s, aa, K) <= rhs

        lo = max(1, int(mpmath.ceil(s)))
        if ok(lo):
            K = lo
        else:
            hi = lo * 2
            while not ok(hi):
                lo, hi = hi, hi * 2
            while hi - lo > 1:
                mid = (lo + hi) // 2
                lo, hi = (lo, mid) if ok(mid) else (mid, hi)
            K = hi
        bound = _branch_lhs(s, aa, K) / mpmath.pi**8
    return TruncationPlan(K, K, float(bound))


def plan_gamma(sigma) -> TruncationPlan:
    """Asymmetric plan for ``e^-r`` at ``c = 1/2``.

    ``N = ceil(2 pi^2 sigma^2 + 2 sigma log(15/4))``,
    ``K = ceil(sigma log(N / (2 sigma)))``.  The attached bound sums the
    two omitted tails:

    * left, ``k < -N``: ``e^-r <= 1`` gives
      ``e^(-(N+1)/(2 sigma)) / (sigma (1 - e^(-1/(2 sigma))))``;
    * right, ``k > K``: with ``q = e^(K/sigma)`` the integral comparison
      gives ``Gamma(1/2, q) <= e^-q / sqrt(q)``.
    """
    _check_sigma(sigma)
    with mp.workprec(128):
        s = to_mpf(sigma, 128)
        N = int(mpmath.ceil(2 * mpmath.pi**2 * s**2 + 2 * s * mpmath.log(mpmath.mpf(15) / 4)))
        K = int(mpmath.ceil(s * mpmath.log(N / (2 * s))))
        left = mpmath.exp(-(N + 1) / (2 * s)) / (s * -mpmath.expm1(-1 / (2 * s)))
        q = mpmath.exp(K / s)
        right = mpmath.exp(-q) / mpmath.sqrt(q)
    return TruncationPlan(N, K, float(left + right))


def extend_gamma_left(plan: TruncationPlan, sigma, precision: int = DEFAULT_PRECISION) -> TruncationPlan:
    """Widen the left end of a gamma plan until its omitted tail is below ``2^-precision``.

    The right end and the right tail bound are kept, so the truncation
    error of the result is essentially the right tail alone.
    """
    _check_sigma(sigma)
    with mp.workprec(128):
        s = to_mpf(sigma, 128)
        target = mpmath.ldexp(1, -int(precision))
        scale = s * -mpmath.expm1(-1 / (2 * s))
        # e^(-(N+1)/(2 sigma)) / scale <= target
        N = int(mpmath.ceil(-2 * s * mpmath.log(target * scale))) - 1
        N = max(N, plan.n_neg)
        q = mpmath.exp(plan.n_pos / s)
        bound = mpmath.exp(-(N + 1) / (2 * s)) / scale + mpmath.exp(-q) / mpmath.sqrt(q)
    return TruncationPlan(N, plan.n_pos, float(bound))


def plan_from_envelope(f: FunctionSpec, c, sigma, tol: float) -> TruncationPlan:
    """Generic plan from the decay envelope: each omitted tail below ``tol/2``.

    The omitted sum ``(1/sigma) sum_{k>K} env(k/sigma)`` is bounded by
    ``int_{K/sigma}^inf env(x) dx``, valid because the envelope is
    nonincreasing on each tail.
    """
    _check_sigma(sigma)
    if f.decay_envelope is None:
        raise DomainError(f"{f.name}: no decay envelope to plan from")
    s = float(sigma)
    c = float(c)

    def tail(side, X):
        with mp.workprec(64):
            return float(mpmath.quad(lambda x: f.envelope_at_log(side * float(x), c), [X, X + 1, X + 8, mpmath.inf]))

    indices = []
    for side in (-1, 1):
        X = 1.0
        while tail(side, X) > tol / 2:
            X *= 2
            if X > MAX_LOG_ABSCISSA:
                raise ConvergenceError(f"{f.name}: envelope tail does not fall below {tol:g}")
        lo, hi = 0.0, X
        for _ in range(60):
            mid = (lo + hi) / 2
            lo, hi = (lo, mid) if tail(side, mid) <= tol / 2 else (mid, hi)
        indices.append(math.ceil(hi * s))
    bound = tail(-1, indices[0] / s) + tail(1, indices[1] / s)
    return TruncationPlan(indices[0], indices[1], bound)


# ---------------------------------------------------------------------------
# Remainder
# ---------------------------------------------------------------------------


def accelerated_tail(term: Callable, start: int, period: int = 1, precision: int = DEFAULT_PRECISION):
    """``sum_{k >= start} term(k)`` by Richardson extrapolation over blocks.

    Terms are grouped in blocks of ``period`` consecutive indices so that an
    oscillating factor with that period does not spoil the extrapolation;
    the block sums are then smooth in the block index.  Extrapolation in
    the block index degrades once ``start`` is hundreds of blocks out, so the
    block length is stretched to keep ``start`` within ``TAIL_BLOCK_OFFSET``
    blocks.  ``term`` returns raw mpmath numbers.  The result is an estimate,
    not a certified bound.
    """
    period = int(period)
    if period < 1:
        raise DomainError("period must be a positive integer")
    length = period * max(1, -(-abs(int(start)) // (TAIL_BLOCK_OFFSET * period)))
    with mp.workprec(precision):

        def block(j):
            base = start + int(j) * length
            return mpmath.fsum(term(base + i) for i in range(length))

        return mpmath.nsum(block, [0, mpmath.inf], method="richardson")


def _transform_terms(f: FunctionSpec, c, sigma, work):
    """Generator of paired lattice samples ``M(c + 2 pi i k sigma) + M(c - 2 pi i k sigma)``."""
    cc = to_mpf(c, work)
    step = 2 * mpmath.pi * to_mpf(sigma, work)

    def pair(k):
        v = k * step
        if f.real_valued:
            return 2 * mpmath.re(f.closed_form_transform(cc, v, work))
        return f.closed_form_transform(cc, v, work) + f.closed_form_transform(cc, -v, work)

    return pair


def transform_tail_bound(f: FunctionSpec, c, sigma, k_max: int) -> Optional[float]:
    """Certified bound on ``sum_{|k| > k_max} |M(c + 2 pi i k sigma)|``, or None."""
    if f.is_zero:
        return 0.0
    V = 2 * math.pi * float(sigma) * (k_max + 1)
    band = f.metadata.bandwidth
    if band is not None and V > band:
        return 0.0
    if f.transform_tail is None:
        return None
    # |M(v)| <= B |v|^-alpha beyond V; sum over k > k_max by integral comparison
    for alpha in (4.0, 3.0, 2.0):
        B = f.transform_tail(float(c), V, alpha)
        if B is not None:
            step = 2 * math.pi * float(sigma)
            n = k_max + 1
            return 2 * B / step**alpha * (n**-alpha + n ** (1 - alpha) / (alpha - 1))
    return None


def remainder_from_transform(
    f: FunctionSpec,
    c,
    sigma,
    k_max: int,
    precision: int = DEFAULT_PRECISION,
    tail: Optional[str] = None,
):
    """``-sum_{0 < |k| <= k_max} M(c + 2 pi i k sigma)`` with ``+-k`` paired.

    ``tail="richardson"`` adds an extrapolated estimate of the terms beyond
    ``k_max``.  Without it, an ``UncertifiedTailWarning`` is raised when no
    bound on the omitted terms is available.
    """
    precision = check_precision(precision)
    _check_sigma(sigma)
    k_max = int(k_max)
    if k_max < 1:
        raise DomainError("k_max must be a positive integer")
    if f.is_zero:
        return HPReal(0, precision)
    if f.closed_form_transform is None:
        raise DomainError(f"{f.name} has no closed-form Mellin transform")
    if tail not in (None, "richardson"):
        raise DomainError(f"unknown tail treatment {tail!r}")
    work = precision + GUARD_BITS
    with mp.workprec(work):
        pair = _transform_terms(f, c, sigma, work)
        total = mpmath.fsum(pair(k) for k in range(1, k_max + 1))
        if tail == "richardson":
            total += accelerated_tail(pair, k_max + 1, precision=work)
        elif transform_tail_bound(f, c, sigma, k_max) is None:
            warnings.warn(
                f"{f.name}: transform series tail beyond k = {k_max} is uncertified",
                UncertifiedTailWarning,
                stacklevel=2,
            )
        value = -total
    return hp(value, precision)


def remainder_empirical(f: FunctionSpec, exact, c, sigma, plan: TruncationPlan, precision: int = DEFAULT_PRECISION):
    """``exact - quad_sum``: quadrature remainder plus truncation error."""
    precision = check_precision(precision)
    res = quad_sum(f, c, sigma, plan, precision + GUARD_BITS)
    with mp.workprec(precision + GUARD_BITS):
        ex = exact.mpf if isinstance(exact, HPReal) else to_mpf(exact, precision + GUARD_BITS)
        value = ex - (res.value.mpc if hasattr(res.value, "mpc") else res.value.mpf)
    return hp(value, precision)


def poisson_identity_residual(
    f: FunctionSpec,
    c,
    sigma,
    plan: TruncationPlan,
    k_max: int,
    precision: int = DEFAULT_PRECISION,
    period: Optional[int] = None,
) -> HPReal:
    """``|(1/sigma) sum_k f(e^(k/sigma)) e^(kc/sigma) - sum_k M(c + 2 pi i k sigma)|``.

    Both sides are truncated (lattice side to ``plan``, transform side to
    ``|k| <= k_max``).  When ``period`` is given, the omitted tails of both
    series are added back by block-Richardson extrapolation with that block
    length on the lattice side; this is what lets slowly decaying integrands
    reach residuals near the working precision.
    """
    precision = check_precision(precision)
    _check_sigma(sigma)
    if f.is_zero:
        return HPReal(0, precision)
    if f.closed_form_transform is None:
        raise DomainError(f"{f.name} has no closed-form Mellin transform")
    work = precision + GUARD_BITS
    lattice = quad_sum(f, c, sigma, plan, work).value
    lattice = lattice.mpc if hasattr(lattice, "mpc") else lattice.mpf
    with mp.workprec(work):
        s, cc = to_mpf(sigma, work), to_mpf(c, work)
        pair = _transform_terms(f, c, sigma, work)
        spectral = f.closed_form_transform(cc, mpmath.mpf(0), work)
        spectral += mpmath.fsum(pair(k) for k in range(1, int(k_max) + 1))
        if period is not None:

            def right(k):
                x = k / s
                return f.at_log(x, work) * mpmath.exp(cc * x) / s

            def left(k):
                return right(-k)

            lattice += accelerated_tail(right, plan.n_pos + 1, period, work)
            lattice += accelerated_tail(left, plan.n_neg + 1, period, work)
            if transform_tail_bound(f, c, sigma, int(k_max)) != 0.0:
                spectral += accelerated_tail(pair, int(k_max) + 1, precision=work)
        if not f.real_valued:
            spectral = mpmath.mpc(spectral)
        else:
            spectral = mpmath.re(spectral)
        residual = abs(lattice - spectral)
    return HPReal(residual, precision)
