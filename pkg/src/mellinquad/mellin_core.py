"""Integrand descriptors and Mellin calculus.

A ``FunctionSpec`` bundles pointwise values of ``f`` on ``(0, inf)`` with
whatever else is known about it: a closed-form Mellin transform, a decay
envelope for truncation decisions, and regularity hints.  Most numerical
work happens in the logarithmic coordinate ``x = log r``, where the Mellin
transform becomes a Fourier-type integral over the real line.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
import numpy as np
from mpmath import mp

from .numerics import (
    DEFAULT_PRECISION,
    MIN_PRECISION,
    ConvergenceError,
    DomainError,
    HPComplex,
    HPReal,
    check_precision,
    hp,
    to_mpf,
)

GUARD_BITS = 24


class UncertifiedTailWarning(UserWarning):
    """A supremum or series tail could not be certified by an envelope."""


@dataclass(frozen=True)
class Regularity:
    """Regularity hints attached to an integrand.

    ``strip_halfwidth`` is the half-width ``a`` of the largest strip of
    polar analyticity, ``sobolev_order`` the exponent ``r + alpha`` with
    ``|v^(r+alpha) M(c+iv)|`` bounded, ``bandwidth`` the Mellin bandwidth
    ``T``.  ``breakpoints`` lists points ``log r`` where ``f`` is not smooth;
    the numeric transform splits its integration there.
    """

    strip_halfwidth: Optional[float] = None
    sobolev_order: Optional[float] = None
    bandwidth: Optional[float] = None
    breakpoints: tuple = ()


@dataclass(frozen=True)
class MellinPoint:
    c: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and math.isfinite(self.t)):
            raise DomainError("MellinPoint coordinates must be finite")

    @property
    def s(self):
        return mpmath.mpc(self.c, self.t)


@dataclass(frozen=True)
class FunctionSpec:
    """Descriptor of an integrand ``f : (0, inf) -> R or C``.

    evaluator(r, prec)
        ``f(r)`` for an mpf ``r > 0``; called inside ``workprec(prec)``.
    closed_form_transform(c, v, prec)
        ``M_c[f](c + iv)`` as an mpc, when known analytically.
    decay_envelope(r, c)
        nonnegative float bounding ``|f(r)| r^c``; must be nonincreasing as
        ``log r -> +-inf``.  ``r`` is an mpf and may be astronomically large.
    log_evaluator(x, prec)
        ``f(e^x)``; avoids the exp/log round trip for integrands that are
        naturally written in ``log r``.
    vector_log_evaluator(x)
        float64 version of ``log_evaluator`` on numpy arrays; used only
        where the integrand is small enough for double precision to be
        harmless.
    vector_transform(c, v)
        float64 ``M_c[f](c + iv)`` on a numpy array ``v``; only used to
        locate maxima before they are refined at full precision.
    transform_tail(c, V, alpha)
        bound on ``sup_{|v| >= V} |v|^alpha |M_c[f](c+iv)|``, or None where
        no bound is known for that ``c`` and ``alpha``.
    """

    evaluator: Callable
    closed_form_transform: Optional[Callable] = None
    decay_envelope: Optional[Callable] = None
    metadata: Regularity = field(default_factory=Regularity)
    name: str = "f"
    log_evaluator: Optional[Callable] = None
    vector_log_evaluator: Optional[Callable] = None
    transform_tail: Optional[Callable] = None
    vector_transform: Optional[Callable] = None
    real_valued: bool = True
    is_zero: bool = False

    def __call__(self, r, prec: int = DEFAULT_PRECISION):
        with mp.workprec(prec):
            return hp(self.evaluator(to_mpf(r, prec), prec), prec)

    def at_log(self, x, prec: int):
        """Raw ``f(e^x)``; caller sets the working precision."""
        if self.log_evaluator is not None:
            return self.log_evaluator(x, prec)
        return self.evaluator(mpmath.exp(x), prec)

    def envelope_at_log(self, x, c) -> float:
        if self.decay_envelope is None:
            raise DomainError(f"{self.name} has no decay envelope")
        with mp.workprec(64):
            return float(self.decay_envelope(mpmath.exp(mpmath.mpf(x)), c))

    def transform(self, c, v, prec: int = DEFAULT_PRECISION):
        """Closed-form ``M_c[f](c+iv)`` as a raw mpc."""
        if self.is_zero:
            return mpmath.mpc(0)
        if self.closed_form_transform is None:
            raise DomainError(f"{self.name} has no closed-form Mellin transform")
        with mp.workprec(prec):
            return mpmath.mpc(self.closed_form_transform(to_mpf(c, prec), to_mpf(v, prec), prec))


def zero_function() -> FunctionSpec:
    return FunctionSpec(
        evaluator=lambda r, prec: mpmath.mpf(0),
        closed_form_transform=lambda c, v, prec: mpmath.mpc(0),
        decay_envelope=lambda r, c: 0.0,
        log_evaluator=lambda x, prec: mpmath.mpf(0),
        vector_log_evaluator=lambda x: np.zeros_like(x),
        transform_tail=lambda c, V, alpha: 0.0,
        metadata=Regularity(bandwidth=0.0),
        name="zero",
        is_zero=True,
    )


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


def mellin_translate(f: FunctionSpec, h, c) -> FunctionSpec:
    """Mellin translation ``(tau_h^c f)(x) = h^c f(hx)``.

    The transform picks up the factor ``h^(c - s)``, which on the line
    ``s = c + it`` is the unimodular ``h^(-it)``.
    """
    h0 = float(h)
    if not h0 > 0:
        raise DomainError(f"translation parameter must be positive, got {h}")
    if f.is_zero:
        return f
    c0 = float(c)
    logh = math.log(h0)

    def evaluator(r, prec):
        hh = to_mpf(h, prec)
        return hh**c0 * f.evaluator(hh * r, prec)

    def log_evaluator(x, prec):
        hh = to_mpf(h, prec)
        return hh**c0 * f.at_log(x + mpmath.log(hh), prec)

    vec = None
    if f.vector_log_evaluator is not None:
        fv = f.vector_log_evaluator

        def vec(x):
            return h0**c0 * fv(x + logh)

    cft = None
    if f.closed_form_transform is not None:

        def cft(c, v, prec):
            hh = to_mpf(h, prec)
            return hh ** (c0 - mpmath.mpc(c, v)) * f.closed_form_transform(c, v, prec)

    env = None
    if f.decay_envelope is not None:

        def env(r, c):
            return h0 ** (c0 - float(c)) * f.decay_envelope(r * h0, c)

    tail = None
    if f.transform_tail is not None:

        def tail(c, V, alpha):
            b = f.transform_tail(c, V, alpha)
            return None if b is None else h0 ** (c0 - float(c)) * b

    meta = dataclasses.replace(f.metadata, breakpoints=tuple(b - logh for b in f.metadata.breakpoints))
    return FunctionSpec(
        evaluator=evaluator,
        closed_form_transform=cft,
        decay_envelope=env,
        metadata=meta,
        name=f"tau[{h}]{f.name}",
        log_evaluator=log_evaluator,
        vector_log_evaluator=vec,
        transform_tail=tail,
        real_valued=f.real_valued,
    )


def _mellin_part(f: FunctionSpec, c, sign: int) -> FunctionSpec:
    c0 = float(c)
    label = "+" if sign > 0 else "-"

    def evaluator(r, prec):
        cc = to_mpf(c, prec)
        return (r**cc * f.evaluator(r, prec) + sign * r**-cc * f.evaluator(1 / r, prec)) / 2

    def log_evaluator(x, prec):
        cc = to_mpf(c, prec)
        return (mpmath.exp(cc * x) * f.at_log(x, prec) + sign * mpmath.exp(-cc * x) * f.at_log(-x, prec)) / 2

    cft = None
    if f.closed_form_transform is not None:

        def cft(c, v, prec):
            cc = to_mpf(c0, prec)
            s = mpmath.mpc(c, v)
            a, b = s + cc, cc - s
            return (
                f.closed_form_transform(a.real, a.imag, prec)
                + sign * f.closed_form_transform(b.real, b.imag, prec)
            ) / 2

    env = None
    if f.decay_envelope is not None:

        def env(r, c):
            c = float(c)
            return 0.5 * (f.decay_envelope(r, c0 + c) + f.decay_envelope(1 / r, c0 - c))

    tail = None
    if f.transform_tail is not None:

        def tail(c, V, alpha):
            c = float(c)
            parts = (f.transform_tail(c0 + c, V, alpha), f.transform_tail(c0 - c, V, alpha))
            if None in parts:
                return None
            return 0.5 * (parts[0] + parts[1])

    bps = sorted(set(f.metadata.breakpoints) | {-b for b in f.metadata.breakpoints})
    return FunctionSpec(
        evaluator=evaluator,
        closed_form_transform=cft,
        decay_envelope=env,
        metadata=Regularity(breakpoints=tuple(bps)),
        name=f"{f.name}_{{{c}{label}}}",
        log_evaluator=log_evaluator,
        transform_tail=tail,
        real_valued=f.real_valued,
        is_zero=f.is_zero,
    )


def mellin_even_part(f: FunctionSpec, c) -> FunctionSpec:
    """c-Mellin-even part ``(x^c f(x) + x^-c f(1/x)) / 2``.

    Regularity hints are dropped (breakpoints are kept, mirrored); a
    closed-form transform carries over as ``(M(s + c) + M(c - s)) / 2``.
    """
    return _mellin_part(f, c, +1)


def mellin_odd_part(f: FunctionSpec, c) -> FunctionSpec:
    """c-Mellin-odd part ``(x^c f(x) - x^-c f(1/x)) / 2``."""
    return _mellin_part(f, c, -1)


# ---------------------------------------------------------------------------
# Numeric Mellin transform
# ---------------------------------------------------------------------------

# Tail certification uses env(X) * max(1, X) as a stand-in for the integral
# of the envelope beyond X, which is valid for envelopes decaying at least
# like x^-2 or exponentially.
_FLOAT_EPS = 2.0**-50


def _outer_radius(f: FunctionSpec, c: float, side: int, bound: float, extra=lambda x: 1.0) -> float:
    x = 1.0
    for _ in range(80):
        if f.envelope_at_log(side * x, c) * max(1.0, x) * extra(x) <= bound:
            return x
        x *= 2.0
    raise ConvergenceError(f"envelope of {f.name} does not decay fast enough for tolerance {bound:g}")


def _window(f, c, tol, window):
    if window is not None:
        lo, hi = float(window[0]), float(window[1])
        if not lo < hi:
            raise DomainError("truncation window must satisfy lo < hi")
        return lo, hi
    if f.decay_envelope is None:
        raise DomainError(f"{f.name}: no decay envelope and no truncation window given")
    return -_outer_radius(f, c, -1, tol / 8), _outer_radius(f, c, +1, tol / 8)


def _trapezoid_line(F, Fvec, lo, hi, hp_lo, hp_hi, tol, h0=1.0, max_refinements=20):
    """Equispaced trapezoid on [lo, hi] with step halving.

    ``F`` is evaluated at full precision inside [hp_lo, hp_hi]; outside,
    ``Fvec`` (float64, vectorised) is used when given.
    """

    def level_sum(h, k_start, k_step):
        k_lo = math.ceil(lo / h)
        k_hi = math.floor(hi / h)
        first = k_lo + ((k_start - k_lo) % k_step)
        total = mpmath.mpf(0)
        if Fvec is None:
            for k in range(first, k_hi + 1, k_step):
                total += F(mpmath.mpf(k) * h)
            return total
        hk_lo = max(first, math.ceil(hp_lo / h))
        hk_hi = min(k_hi, math.floor(hp_hi / h))
        hk_lo = hk_lo + ((first - hk_lo) % k_step)
        hk_hi = hk_hi - ((hk_hi - first) % k_step)
        for k in range(hk_lo, hk_hi + 1, k_step):
            total += F(mpmath.mpf(k) * h)
        # far field in double precision, in ascending k order per side
        for a, b in ((first, hk_lo - k_step), (hk_hi + k_step, k_hi)):
            if b < a:
                continue
            ks = np.arange(a, b + 1, k_step, dtype=np.float64)
            for chunk in np.array_split(ks, max(1, len(ks) // 1_000_000 + 1)):
                vals = Fvec(chunk * h)
                total += mpmath.mpmathify(complex(np.sum(vals))) if np.iscomplexobj(vals) else mpmath.mpf(float(np.sum(vals)))
        return total

    h = mpmath.mpf(h0)
    T = h * level_sum(float(h), 0, 1)
    for level in range(1, max_refinements + 1):
        h /= 2
        new = T / 2 + h * level_sum(float(h), 1, 2)
        if level >= 2 and abs(new - T) < tol / 2:
            return new
        T = new
    raise ConvergenceError(f"trapezoid did not reach tolerance {tol:g} in {max_refinements} refinements")


def _piece_integral(F, piece, scale, tol, f, c):
    """Integral of F over one piece between breakpoints, via an exponential map."""
    a, b = piece
    if a == -math.inf and b == math.inf:
        raise AssertionError("piece must be bounded on one side")
    probe = [F(mpmath.mpf(x)) for x in _probe_points(a, b)]
    S = 1.0 + max(float(abs(v)) for v in probe)
    y_lo = math.log(tol / (16 * S))
    if a == -math.inf or b == math.inf:
        side = 1 if b == math.inf else -1
        base = a if side > 0 else b
        far = _outer_radius(f, c, side, tol / 16) if f.decay_envelope is not None else None
        if far is None:
            raise DomainError(f"{f.name}: no decay envelope for an unbounded piece")
        y_hi = math.log(max(far - side * base, 1.0)) + 1.0
        mid = y_lo
        base_mp = mpmath.mpf(base)

        def G(y):
            e = mpmath.exp(y)
            return F(base_mp + side * e) * e

        lo, hi = y_lo, y_hi
    else:
        half = (b - a) / 2
        mid = (a + b) / 2
        Y = 0.5 * math.log(64 * half * S / tol) + 1.0
        mid_mp, half_mp = mpmath.mpf(mid), mpmath.mpf(half)

        def G(y):
            th = mpmath.tanh(y)
            return F(mid_mp + half_mp * th) * half_mp * (1 - th * th)

        lo, hi = -Y, Y
    return _trapezoid_line(G, None, lo, hi, lo, hi, tol / 2, h0=0.5)


def _probe_points(a, b):
    if a == -math.inf:
        return [b - d for d in (1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0)]
    if b == math.inf:
        return [a + d for d in (1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0)]
    return [a + (b - a) * q for q in (1e-6, 0.25, 0.5, 0.75, 1 - 1e-6)]


def mellin_transform_numeric(f: FunctionSpec, c, t, tol=1e-20, precision: int = DEFAULT_PRECISION, window=None) -> HPComplex:
    """``M_c[f](c+it)`` by log-substitution and the trapezoid rule on the line.

    With ``u = e^x`` the transform is ``int F(x) dx``, ``F(x) = f(e^x) e^((c+it)x)``,
    which is integrated by the equispaced trapezoid rule with step halving
    until successive levels agree to ``tol / 2``.  The lattice is truncated
    where the decay envelope puts the tail below ``tol / 8`` (or to the
    caller's ``window``).  Where ``f`` has breakpoints, each smooth piece is
    mapped to the line by ``x = b +- e^y`` (or a tanh map between two
    breakpoints) before the same trapezoid procedure is applied.
    """
    precision = check_precision(precision)
    tol = float(tol)
    if f.is_zero:
        return HPComplex(0, 0, precision)
    work = precision + GUARD_BITS
    c_f, t_f = float(c), float(t)
    with mp.workprec(work):
        cc, tt = to_mpf(c, work), to_mpf(t, work)
        s = mpmath.mpc(cc, tt)
        if tt == 0:

            def F(x):
                return f.at_log(x, work) * mpmath.exp(cc * x)

        else:

            def F(x):
                return f.at_log(x, work) * mpmath.exp(s * x)

        bps = sorted(float(b) for b in f.metadata.breakpoints)
        if bps and window is None:
            edges = [-math.inf, *bps, math.inf]
            pieces = list(zip(edges[:-1], edges[1:]))
            piece_tol = tol / len(pieces)
            total = mpmath.fsum(_piece_integral(F, p, 1.0, piece_tol, f, c_f) for p in pieces)
        else:
            lo, hi = _window(f, c_f, tol, window)
            Fvec = None
            hp_lo, hp_hi = lo, hi
            if f.vector_log_evaluator is not None and f.decay_envelope is not None:
                spread = 1.0 + abs(t_f) + abs(c_f)
                budget = tol / 16

                def extra(x):
                    return x * spread * _FLOAT_EPS * 4

                hp_hi = min(hi, _outer_radius(f, c_f, +1, budget, extra))
                hp_lo = max(lo, -_outer_radius(f, c_f, -1, budget, extra))
                fv = f.vector_log_evaluator
                if t_f == 0:

                    def Fvec(x):
                        with np.errstate(all="ignore"):
                            v = fv(x) * np.exp(c_f * x)
                        return np.nan_to_num(v)

                else:

                    def Fvec(x):
                        with np.errstate(all="ignore"):
                            v = fv(x) * np.exp(c_f * x) * np.exp(1j * (t_f * x))
                        return np.nan_to_num(v)

            total = _trapezoid_line(F, Fvec, lo, hi, hp_lo, hp_hi, tol)
        total = mpmath.mpc(total)
    return HPComplex.from_mpc(total, precision)


# ---------------------------------------------------------------------------
# Distance from Mellin-Paley-Wiener spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistanceGrid:
    """Sampling of ``[sigma, v_max]``: ``samples`` log-spaced abscissae.

    ``v_max`` defaults to ``1e4 * sigma``; ``alpha`` is the weight exponent.
    """

    samples: int = 4096
    v_max: Optional[float] = None
    alpha: float = 0.0
    numeric_tol: float = 1e-12


@dataclass(frozen=True)
class DistanceResult:
    value: HPReal
    sampled_max: HPReal
    argmax: float
    tail_certified: bool


def _golden_max(g, a, b, prec):
    invphi = (mpmath.sqrt(5) - 1) / 2
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    g1, g2 = g(x1), g(x2)
    for _ in range(int(prec * 0.75) + 20):
        if g1 < g2:
            a, x1, g1 = x1, x2, g2
            x2 = a + invphi * (b - a)
            g2 = g(x2)
        else:
            b, x2, g2 = x2, x1, g1
            x1 = b - invphi * (b - a)
            g1 = g(x1)
        if b - a <= abs(b) * mpmath.ldexp(1, -prec // 2 - 4):
            break
    return (x1, g1) if g1 >= g2 else (x2, g2)


def dist_infinity(f: FunctionSpec, c, sigma, grid: DistanceGrid = DistanceGrid(), precision: int = DEFAULT_PRECISION) -> DistanceResult:
    """``sup_{|v| >= sigma} |v|^alpha |M_c[f](c+iv)|`` from samples.

    The samples are scanned in float64 when ``f`` has a vector transform
    and at 64 bits otherwise; the best one and its neighbours are
    re-evaluated at full precision and polished by golden-section search.
    If ``f`` carries a ``transform_tail`` bound, the part of the supremum
    beyond ``v_max`` is certified and folded into ``value`` (which
    is then an upper bound that is exact whenever the tail bound is sharp);
    otherwise an ``UncertifiedTailWarning`` is emitted.
    """
    precision = check_precision(precision)
    sig = float(sigma)
    if not sig > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    alpha = float(grid.alpha)
    if alpha < 0:
        raise DomainError("weight exponent alpha must be >= 0")
    if f.is_zero:
        z = HPReal(0, precision)
        return DistanceResult(z, z, sig, True)
    v_max = grid.v_max if grid.v_max is not None else 1e4 * sig
    if v_max <= sig:
        raise DomainError("v_max must exceed sigma")
    n = max(2, int(grid.samples))
    signs = (1,) if f.real_valued else (1, -1)

    def weighted_at(prec):
        al = to_mpf(alpha, prec)
        cc = to_mpf(c, prec)
        if f.closed_form_transform is not None:

            def M(v):
                return f.closed_form_transform(cc, v, prec)

        else:

            def M(v):
                return mellin_transform_numeric(f, c, v, tol=grid.numeric_tol, precision=max(prec, MIN_PRECISION)).mpc

        def weighted(v):
            return max(abs(v) ** al * abs(M(sg * v)) for sg in signs)

        return weighted

    # locate the maximum on a cheap 64-bit scan, then refine at full precision
    if f.vector_transform is not None:
        vs = sig * (v_max / sig) ** (np.arange(n) / (n - 1))
        with np.errstate(all="ignore"):
            vals = np.max([vs**alpha * np.abs(f.vector_transform(float(c), sg * vs)) for sg in signs], axis=0)
        j = int(np.argmax(np.nan_to_num(vals)))
    else:
        with mp.workprec(64):
            coarse = weighted_at(64)
            q = (mpmath.mpf(v_max) / sig) ** (mpmath.mpf(1) / (n - 1))
            v, vals = mpmath.mpf(sig), []
            for _ in range(n):
                vals.append(coarse(v))
                v *= q
            j = max(range(n), key=lambda i: vals[i])
    work = precision + 16
    with mp.workprec(work):
        weighted = weighted_at(work)
        lo, ratio = to_mpf(sig, work), to_mpf(v_max, work) / to_mpf(sig, work)

        def node(i):
            return lo * ratio ** (mpmath.mpf(i) / (n - 1))

        best_v, best = max(((node(i), weighted(node(i))) for i in {max(j - 1, 0), j, min(j + 1, n - 1)}), key=lambda p: p[1])
        if best > 0:
            pv, pval = _golden_max(weighted, node(max(j - 1, 0)), node(min(j + 1, n - 1)), work)
            if pval > best:
                best_v, best = pv, pval
        sampled = +best
        tail = f.transform_tail(float(c), v_max, alpha) if f.transform_tail is not None else None
        certified = tail is not None
        value = sampled
        if certified:
            value = max(sampled, mpmath.mpf(tail))
        else:
            warnings.warn(
                f"{f.name}: no transform tail bound, supremum beyond v={v_max:g} is uncertified",
                UncertifiedTailWarning,
                stacklevel=2,
            )
    return DistanceResult(HPReal(value, precision), HPReal(sampled, precision), float(best_v), certified)
