"""Configurable-precision scalars, the Riemann zeta function and the Moebius function.

``HPReal`` and ``HPComplex`` are thin immutable carriers around mpmath values
that remember the precision (in bits) they were created at.  Arithmetic
between carriers runs at the larger of the two precisions.  Hot loops elsewhere
in the package work on raw mpmath numbers inside ``mpmath.workprec`` and wrap
only their results.
"""

from __future__ import annotations

import math
from numbers import Number

import mpmath
from mpmath import mp

DEFAULT_PRECISION = 256
MIN_PRECISION = 64


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConvergenceError(ArithmeticError):
    """An iterative procedure failed to reach its tolerance."""


def check_precision(precision: int) -> int:
    precision = int(precision)
    if precision < MIN_PRECISION:
        raise DomainError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")
    return precision


def to_mpf(x, precision: int = DEFAULT_PRECISION):
    """Convert ``x`` (int, float, str, Fraction, mpf, HPReal) to an mpf.

    Strings are parsed at ``precision`` so that decimal literals such as the
    40-digit reference constants keep all their digits.
    """
    if isinstance(x, HPReal):
        return x.mpf
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, (int, float)):
        with mp.workprec(precision):
            return mpmath.mpf(x.numerator) / x.denominator
    with mp.workprec(precision):
        return mpmath.mpf(x)


def _operand(other, precision):
    if isinstance(other, HPReal):
        return other.mpf, other.prec
    if isinstance(other, HPComplex):
        return other.mpc, other.prec
    if isinstance(other, (mpmath.mpc, complex)):
        return mpmath.mpc(other), precision
    if isinstance(other, (Number, mpmath.mpf, str)):
        return to_mpf(other, precision), precision
    return None, None


class HPReal:
    """Real scalar at a fixed binary precision."""

    __slots__ = ("_v", "_prec")

    def __init__(self, value=0, prec: int = DEFAULT_PRECISION):
        prec = check_precision(prec)
        if isinstance(value, HPComplex):
            raise TypeError("cannot make HPReal from HPComplex")
        with mp.workprec(prec):
            self._v = +to_mpf(value, prec)
        self._prec = prec

    @property
    def prec(self) -> int:
        return self._prec

    @property
    def mpf(self):
        return self._v

    def __setattr__(self, name, value):
        if hasattr(self, "_prec"):
            raise AttributeError("HPReal is immutable")
        object.__setattr__(self, name, value)

    def _binary(self, other, op, reflected=False):
        v, p = _operand(other, self._prec)
        if v is None:
            return NotImplemented
        prec = max(self._prec, p)
        with mp.workprec(prec):
            r = op(v, self._v) if reflected else op(self._v, v)
        if isinstance(r, mpmath.mpc):
            return HPComplex(r.real, r.imag, prec)
        return HPReal(r, prec)

    def __add__(self, o):
        return self._binary(o, lambda a, b: a + b)

    def __radd__(self, o):
        return self._binary(o, lambda a, b: a + b, True)

    def __sub__(self, o):
        return self._binary(o, lambda a, b: a - b)

    def __rsub__(self, o):
        return self._binary(o, lambda a, b: a - b, True)

    def __mul__(self, o):
        return self._binary(o, lambda a, b: a * b)

    def __rmul__(self, o):
        return self._binary(o, lambda a, b: a * b, True)

    def __truediv__(self, o):
        return self._binary(o, lambda a, b: a / b)

    def __rtruediv__(self, o):
        return self._binary(o, lambda a, b: a / b, True)

    def __pow__(self, o):
        return self._binary(o, lambda a, b: a**b)

    def __rpow__(self, o):
        return self._binary(o, lambda a, b: a**b, True)

    def __neg__(self):
        return HPReal(-self._v, self._prec)

    def __pos__(self):
        return self

    def __abs__(self):
        return HPReal(abs(self._v), self._prec)

    def _cmp_value(self, other):
        v, _ = _operand(other, self._prec)
        if v is None or isinstance(v, mpmath.mpc):
            return None
        return v

    def __eq__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is None else self._v == v

    def __lt__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is None else self._v < v

    def __le__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is None else self._v <= v

    def __gt__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is None else self._v > v

    def __ge__(self, other):
        v = self._cmp_value(other)
        return NotImplemented if v is None else self._v >= v

    def __hash__(self):
        return hash(self._v)

    def __float__(self):
        return float(self._v)

    def __bool__(self):
        return bool(self._v)

    def _unary(self, fn):
        with mp.workprec(self._prec):
            return HPReal(fn(self._v), self._prec)

    def exp(self) -> HPReal:
        return self._unary(mpmath.exp)

    def log(self) -> HPReal:
        if self._v <= 0:
            raise DomainError("log of a nonpositive number")
        return self._unary(mpmath.log)

    def sin(self) -> HPReal:
        return self._unary(mpmath.sin)

    def cos(self) -> HPReal:
        return self._unary(mpmath.cos)

    def sqrt(self) -> HPReal:
        if self._v < 0:
            raise DomainError("sqrt of a negative number")
        return self._unary(mpmath.sqrt)

    def __repr__(self):
        digits = max(1, int(self._prec * math.log10(2)))
        return f"HPReal('{mpmath.nstr(self._v, digits)}', prec={self._prec})"

    def __str__(self):
        return mpmath.nstr(self._v, 17)

    def __format__(self, spec):
        if not spec:
            return str(self)
        return format_real(self._v, spec)


class HPComplex:
    """Complex scalar whose real and imaginary parts share one precision."""

    __slots__ = ("_re", "_im")

    def __init__(self, re=0, im=0, prec: int = DEFAULT_PRECISION):
        if isinstance(re, HPReal) and isinstance(im, HPReal):
            prec = max(re.prec, im.prec)
        self._re = HPReal(re, prec)
        self._im = HPReal(im, prec)

    @classmethod
    def from_mpc(cls, z, prec: int = DEFAULT_PRECISION) -> HPComplex:
        if not isinstance(z, mpmath.mpc):
            with mp.workprec(prec):
                z = mpmath.mpc(z)
        return cls(z.real, z.imag, prec)

    @property
    def re(self) -> HPReal:
        return self._re

    @property
    def im(self) -> HPReal:
        return self._im

    @property
    def real(self) -> HPReal:
        return self._re

    @property
    def imag(self) -> HPReal:
        return self._im

    @property
    def prec(self) -> int:
        return self._re.prec

    @property
    def mpc(self):
        with mp.workprec(self.prec):
            return mpmath.mpc(self._re.mpf, self._im.mpf)

    def _binary(self, other, op, reflected=False):
        v, p = _operand(other, self.prec)
        if v is None:
            return NotImplemented
        prec = max(self.prec, p)
        with mp.workprec(prec):
            r = op(v, self.mpc) if reflected else op(self.mpc, v)
        return HPComplex.from_mpc(r, prec)

    def __add__(self, o):
        return self._binary(o, lambda a, b: a + b)

    def __radd__(self, o):
        return self._binary(o, lambda a, b: a + b, True)

    def __sub__(self, o):
        return self._binary(o, lambda a, b: a - b)

    def __rsub__(self, o):
        return self._binary(o, lambda a, b: a - b, True)

    def __mul__(self, o):
        return self._binary(o, lambda a, b: a * b)

    def __rmul__(self, o):
        return self._binary(o, lambda a, b: a * b, True)

    def __truediv__(self, o):
        return self._binary(o, lambda a, b: a / b)

    def __rtruediv__(self, o):
        return self._binary(o, lambda a, b: a / b, True)

    def __neg__(self):
        return HPComplex(-self._re, -self._im)

    def __abs__(self) -> HPReal:
        with mp.workprec(self.prec):
            return HPReal(abs(self.mpc), self.prec)

    def conjugate(self) -> HPComplex:
        return HPComplex(self._re, -self._im)

    def __eq__(self, other):
        v, _ = _operand(other, self.prec)
        if v is None:
            return NotImplemented
        return self.mpc == v

    def __hash__(self):
        return hash(self.mpc)

    def __complex__(self):
        return complex(self.mpc)

    def __repr__(self):
        return f"HPComplex({self._re!r}, {self._im!r})"

    def __str__(self):
        return mpmath.nstr(self.mpc, 17)


def hp(value, prec: int = DEFAULT_PRECISION):
    """Wrap an mpmath result in the matching carrier type."""
    if isinstance(value, (HPReal, HPComplex)):
        return value
    if isinstance(value, (mpmath.mpc, complex)):
        return HPComplex.from_mpc(value, prec)
    return HPReal(value, prec)


def format_real(x, spec: str) -> str:
    """Format an mpf with a Python float format spec, beyond double range too.

    E-formats asking for more digits than a double carries are rendered
    from the full-precision value.
    """
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    digits = 6
    if "." in spec:
        digits = int(spec.split(".")[1].rstrip("eEgGf") or 6)
    wide = spec.endswith("e") and digits > 15
    if x == 0 or (not wide and 1e-300 < abs(x) < 1e300):
        return format(float(x), spec)
    # only e-formats make sense outside the double range
    with mpmath.workprec(max(mpmath.mp.prec, x.context.prec, int(digits * 3.33) + 16)):
        s = mpmath.nstr(x, digits + 1, min_fixed=1, max_fixed=0, strip_zeros=False)
    mant, _, ex = s.partition("e")
    return f"{mant}e{int(ex or 0):+03d}"


# ---------------------------------------------------------------------------
# Riemann zeta for real argument > 1
# ---------------------------------------------------------------------------


def zeta(alpha, precision: int = DEFAULT_PRECISION) -> HPReal:
    """Riemann zeta function for real ``alpha > 1``.

    Direct summation over ``k < M`` followed by the Euler-Maclaurin tail
    ``M^(1-a)/(a-1) + M^-a/2 + sum_j B_2j/(2j)! (a)_(2j-1) M^(-a-2j+1)``.
    Correction terms are added until the next one falls below the error
    target ``2^-(precision-8)``; ``M`` grows with the precision so that the
    asymptotic series reaches that target well before it starts to diverge.
    """
    precision = check_precision(precision)
    a = to_mpf(alpha, precision + 32)
    if a <= 1:
        raise DomainError(f"zeta needs alpha > 1, got {alpha}")
    work = precision + 32
    with mp.workprec(work):
        a = +a
        target = mpmath.ldexp(1, -(precision + 4))
        M = max(16, precision // 4)
        head = mpmath.fsum(mpmath.power(k, -a) for k in range(1, M))
        Mf = mpmath.mpf(M)
        tail = Mf ** (1 - a) / (a - 1) + Mf**-a / 2
        rising = a  # (a)_(2j-1)
        Mpow = Mf ** (-a - 1)
        for j in range(1, 4 * M):
            term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * Mpow
            tail += term
            if abs(term) < target:
                break
            rising *= (a + 2 * j - 1) * (a + 2 * j)
            Mpow /= Mf * Mf
        else:  # pragma: no cover - M is chosen so this cannot happen
            raise ConvergenceError("Euler-Maclaurin tail did not converge")
        result = head + tail
    return HPReal(result, precision)


# ---------------------------------------------------------------------------
# Moebius function
# ---------------------------------------------------------------------------


def moebius(k: int) -> int:
    """Moebius function by trial division.

    1 for k = 1, (-1)^n for a product of n distinct primes, 0 when a prime
    square divides k.
    """
    k = int(k)
    if k < 1:
        raise DomainError(f"moebius needs k >= 1, got {k}")
    sign = 1
    p = 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            sign = -sign
        p += 1 if p == 2 else 2
    if k > 1:
        sign = -sign
    return sign
