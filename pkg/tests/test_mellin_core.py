import math
import random
import warnings

import mpmath
import pytest
from mpmath import mp

from mellinquad.corpus import exp_decay, sinc_power, sobolev_example
from mellinquad.mellin_core import (
    DistanceGrid,
    FunctionSpec,
    MellinPoint,
    UncertifiedTailWarning,
    dist_infinity,
    mellin_even_part,
    mellin_odd_part,
    mellin_transform_numeric,
    mellin_translate,
    zero_function,
)
from mellinquad.numerics import DomainError

P = 256
TOL = 1e-20


def val(f, r, prec=P):
    return f(r, prec).mpf


def close(a, b, bits=240):
    with mp.workprec(P + 32):
        return abs(a - b) <= mpmath.ldexp(1, -bits) * max(1, abs(b))


def test_mellin_point_as_complex():
    assert MellinPoint(0.5, 2.0).s == mpmath.mpc(0.5, 2.0)


def test_identity_translation():
    f = exp_decay().spec
    g = mellin_translate(f, 1, 0.5)
    for r in (0.1, 1, 7):
        assert close(val(g, r), val(f, r))


def test_translation_by_four():
    g = mellin_translate(exp_decay().spec, 4, 0.5)
    with mp.workprec(P):
        assert close(val(g, 1), 2 * mpmath.exp(-4))


@pytest.mark.parametrize("h", [0, -1])
def test_translation_rejects_nonpositive_h(h):
    with pytest.raises(DomainError):
        mellin_translate(exp_decay().spec, h, 0.5)


def test_translation_preserves_norm():
    g = sobolev_example().spec
    norm = mellin_transform_numeric(mellin_translate(g, 2, 0), 0, 0, tol=TOL, precision=P)
    with mp.workprec(P):
        assert abs(norm.mpc - 4) < 10 * TOL


@pytest.mark.parametrize("h", [0.5, 2])
@pytest.mark.parametrize("t", [0, 3, 10])
def test_translation_keeps_transform_modulus(h, t):
    g = sobolev_example().spec
    moved = mellin_translate(g, h, 0)
    with mp.workprec(P):
        assert close(abs(moved.transform(0, t, P)), abs(g.transform(0, t, P)))


def test_translated_transform_numeric_matches_phase_factor():
    f = exp_decay().spec
    moved = mellin_translate(f, 2, 0.5)
    num = mellin_transform_numeric(moved, 0.5, 3, tol=TOL, precision=P)
    with mp.workprec(P):
        ref = mpmath.mpf(2) ** mpmath.mpc(0, -3) * mpmath.gamma(mpmath.mpc(0.5, 3))
        assert abs(num.mpc - ref) < 10 * TOL


def test_even_part_of_symmetric_function_is_itself():
    f8 = sinc_power(4).spec
    even = mellin_even_part(f8, 0)
    rng = random.Random(3)
    for _ in range(20):
        r = mpmath.mpf(rng.uniform(0.05, 20))
        assert close(val(even, r), val(f8, r))


def test_even_and_odd_parts_at_e():
    f = exp_decay().spec
    with mp.workprec(P):
        e = mpmath.e
        plus = (mpmath.exp(-e) + mpmath.exp(-1 / e)) / 2
        minus = (mpmath.exp(-e) - mpmath.exp(-1 / e)) / 2
        assert close(val(mellin_even_part(f, 0), e), plus)
        assert close(val(mellin_odd_part(f, 0), e), minus)


def test_parts_recompose():
    f = exp_decay().spec
    even, odd = mellin_even_part(f, 0.5), mellin_odd_part(f, 0.5)
    rng = random.Random(11)
    for _ in range(100):
        x = mpmath.mpf(rng.uniform(0.01, 30))
        with mp.workprec(P):
            back = x**-0.5 * (val(even, x) + val(odd, x))
        assert close(back, val(f, x), bits=230)


@pytest.mark.parametrize("entry", [exp_decay(), sobolev_example(), sinc_power(3)], ids=lambda e: e.name)
@pytest.mark.parametrize("c", [0, 0.5, -0.3])
def test_odd_part_vanishes_at_one(entry, c):
    assert val(mellin_odd_part(entry.spec, c), 1) == 0


def test_odd_part_of_symmetric_function_is_zero():
    odd = mellin_odd_part(sinc_power(4).spec, 0)
    for r in (0.2, 0.9, 1.7, 13):
        assert abs(val(odd, r)) < mpmath.ldexp(1, -250)


def test_odd_part_transform_vanishes_at_zero():
    odd = mellin_odd_part(exp_decay().spec, 0.5)
    num = mellin_transform_numeric(odd, 0, 0, tol=TOL, precision=P)
    assert abs(num.mpc) < TOL


ORACLE_CASES = [(entry, v) for entry in (sobolev_example(), exp_decay(), sinc_power(2), sinc_power(4)) for v in (0, 1, -1, 5, -5, 20, -20)]


@pytest.mark.parametrize("entry, v", ORACLE_CASES, ids=[f"{e.name}-{v}" for e, v in ORACLE_CASES])
def test_numeric_transform_matches_closed_form(entry, v):
    num = mellin_transform_numeric(entry.spec, entry.c, v, tol=TOL, precision=P)
    ref = entry.spec.transform(entry.c, v, P)
    with mp.workprec(P):
        assert abs(num.mpc - ref) < 10 * TOL


def test_closed_form_of_g_at_zero():
    assert sobolev_example().spec.transform(0, 0, P) == 4


def test_numeric_transform_needs_envelope_or_window():
    bare = FunctionSpec(evaluator=lambda r, prec: mpmath.exp(-r), name="bare")
    with pytest.raises(DomainError):
        mellin_transform_numeric(bare, 0.5, 0)
    num = mellin_transform_numeric(bare, 0.5, 0, tol=1e-15, precision=128, window=(-80.0, 5.0))
    with mp.workprec(128):
        assert abs(num.mpc - mpmath.sqrt(mpmath.pi)) < 1e-14


def test_zero_function_is_exactly_zero():
    z = zero_function()
    assert mellin_transform_numeric(z, 0.3, 2).mpc == 0
    assert dist_infinity(z, 0, 1).value.mpf == 0
    assert val(z, 5) == 0


def test_distance_gives_table_bound_for_g():
    g = sobolev_example().spec
    with mp.workprec(P):
        band = 4 * mpmath.pi
    d = dist_infinity(g, 0, band, DistanceGrid(alpha=4), P)
    assert d.tail_certified
    with mp.workprec(P):
        bound = 2 * mpmath.zeta(4) * d.value.mpf / (2 * mpmath.pi * 2) ** 4
    assert f"{float(bound):.6e}" == "1.041667e-03"


def test_distance_vanishes_beyond_band():
    f8 = sinc_power(4).spec
    d = dist_infinity(f8, 0, 8 * math.pi + 1, DistanceGrid(), P)
    assert d.value.mpf == 0


def test_distance_near_zero_band_is_transform_peak():
    d = dist_infinity(sobolev_example().spec, 0, 1e-9, DistanceGrid(v_max=10.0), P)
    assert d.tail_certified
    assert float(d.value) == pytest.approx(4, abs=1e-12)


@pytest.mark.parametrize("alpha", [0, 2, 4])
def test_distance_nonincreasing_in_sigma(alpha):
    g = sobolev_example().spec
    values = [dist_infinity(g, 0, s, DistanceGrid(alpha=alpha), P).value for s in (0.25 * j for j in range(1, 11))]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_distance_warns_without_tail_bound():
    f = exp_decay()
    spec = FunctionSpec(
        evaluator=f.spec.evaluator,
        closed_form_transform=f.spec.closed_form_transform,
        decay_envelope=f.spec.decay_envelope,
        name="no-tail",
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        d = dist_infinity(spec, 0.5, 1, DistanceGrid(samples=64), 64)
    assert not d.tail_certified
    assert any(issubclass(w.category, UncertifiedTailWarning) for w in caught)


def test_distance_rejects_bad_sigma():
    with pytest.raises(DomainError):
        dist_infinity(sobolev_example().spec, 0, 0)
