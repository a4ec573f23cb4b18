import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from mellinquad.corpus import branch_point, exp_decay, sinc_power, sobolev_example
from mellinquad.error_rates import (
    Bandlimited,
    ExponentialRate,
    PolynomialRate,
    bound_sobolev_dist,
    classify_decay,
    moebius_invert,
    rate_diagnostics,
    remainder_translated_sup,
    translation_grid,
)
from mellinquad.mellin_core import DistanceGrid, dist_infinity
from mellinquad.numerics import DomainError
from mellinquad.quadrature import (
    extend_gamma_left,
    plan_branch_point,
    plan_from_envelope,
    plan_gamma,
    plan_sinc_power,
    remainder_empirical,
)

P = 256


def e6(x):
    return f"{float(x):.6e}"


@pytest.mark.parametrize("sigma, expected", [(2, "1.041667e-03"), (8192, "3.700743e-18")])
def test_bound_for_g(sigma, expected):
    assert e6(bound_sobolev_dist(4, sigma, 12, P)) == expected


def test_bound_is_zero_for_zero_distance():
    assert bound_sobolev_dist(4, 3, 0).mpf == 0


@pytest.mark.parametrize("alpha", [1, 0.5])
def test_bound_needs_alpha_above_one(alpha):
    with pytest.raises(DomainError):
        bound_sobolev_dist(alpha, 2, 1)


def test_bound_dominates_and_tightens_for_g():
    g = sobolev_example()
    ratios = []
    for j in range(1, 14):
        s = 2**j
        with mp.workprec(P):
            band = 2 * mpmath.pi * s
        d = dist_infinity(g.spec, 0, band, DistanceGrid(alpha=4), P)
        bound = bound_sobolev_dist(4, s, d.value, P)
        R = g.closed_form_remainder(s, P)
        with mp.workprec(P):
            ratios.append(bound.mpf / abs(R.mpf))
    assert all(r >= 1 for r in ratios)
    assert all(b < a for a, b in zip(ratios, ratios[1:]))


def test_rate_diagnostics_branch_row():
    entry = branch_point(Fraction(1, 2), P)
    E = remainder_empirical(entry.spec, entry.exact_integral, 0, 5, plan_branch_point(Fraction(1, 2), 5), P)
    assert f"{float(E):.3e}" == "1.453e-07"
    d = rate_diagnostics(E, 5, a=Fraction(1, 2))
    assert f"{float(d.c_exp):.3e}" == "9.641e-01"
    assert f"{float(d.rate):.6f}" == "3.148914"


def test_rate_diagnostics_gamma_row():
    f = exp_decay(280)
    plan = extend_gamma_left(plan_gamma(6), 6, 280)
    E = remainder_empirical(f.spec, f.exact_integral, 0.5, 6, plan, 280)
    assert f"{float(E):.3e}" == "-1.680e-26"
    d = rate_diagnostics(E, 6, precision=280)
    assert f"{float(d.rate):.6f}" == "9.891425"
    assert d.c_exp is None


def test_rate_diagnostics_exact_exponential():
    with mp.workprec(P):
        E = mpmath.exp(-2 * mpmath.pi * mpmath.mpf(0.75) * 3)
    d = rate_diagnostics(E, 3, a=0.75, alpha=2, precision=P)
    with mp.workprec(P):
        assert abs(d.c_exp.mpf - 1) < mpmath.ldexp(1, -240)
        assert abs(d.rate.mpf - 1.5 * mpmath.pi) < mpmath.ldexp(1, -240)
        assert abs(d.c_poly.mpf - E * 9) < mpmath.ldexp(1, -240)


def test_rate_undefined_for_zero_error():
    with pytest.raises(DomainError):
        rate_diagnostics(0, 2)


@settings(max_examples=40, deadline=None)
@given(st.floats(-200, 200).filter(lambda x: abs(x) > 1e-3), st.floats(0.1, 50), st.floats(0.05, 3))
def test_rate_identity(log_e, sigma, a):
    E = math.copysign(1, log_e) * mpmath.exp(-abs(log_e))
    d = rate_diagnostics(E, sigma, a=a, precision=P)
    with mp.workprec(P):
        lhs = d.rate.mpf + mpmath.log(abs(d.c_exp.mpf)) / d.sigma.mpf
        assert abs(lhs - 2 * mpmath.pi * mpmath.mpf(a)) < mpmath.ldexp(1, -230)


@pytest.fixture(scope="module")
def g_remainders():
    g = sobolev_example()
    return [g.closed_form_remainder(3 * k, P) for k in range(1, 65)]


@pytest.mark.parametrize("n", [1, 2])
def test_moebius_inversion_recovers_transform(g_remainders, n):
    g = sobolev_example().spec
    inv = moebius_invert(g_remainders, n, P)
    exact = mpmath.re(g.transform(0, 2 * math.pi * 3 * n, P))
    assert inv.terms == 64 // n
    assert abs(float(inv.value) - float(exact)) < 0.01 * abs(float(exact))
    assert abs(inv.value.mpf) <= inv.bound.mpf


def test_moebius_inversion_single_term(g_remainders):
    one = moebius_invert(g_remainders[:1], 1, P)
    three = moebius_invert(g_remainders[:3], 1, P)
    with mp.workprec(P):
        assert one.value.mpf == -g_remainders[0].mpf / 2
        change = abs(three.value.mpf - one.value.mpf)
        assert change < (abs(g_remainders[1].mpf) + abs(g_remainders[2].mpf)) / 2


def test_moebius_inversion_of_zero_remainders():
    assert moebius_invert([0] * 16, 1).value.mpf == 0


def test_moebius_inversion_needs_coverage():
    with pytest.raises(DomainError):
        moebius_invert([1, 2, 3], 4)


def test_translation_grid_shape():
    grid = translation_grid(4, 9, P)
    assert len(grid) == 9
    with mp.workprec(P):
        assert abs(grid[0] - mpmath.exp(-mpmath.mpf(1) / 8)) < mpmath.ldexp(1, -250)
        assert abs(grid[-1] - mpmath.exp(mpmath.mpf(1) / 8)) < mpmath.ldexp(1, -250)
        assert abs(grid[4] - 1) < mpmath.ldexp(1, -250)
    assert len(translation_grid(4, 4)) == 5
    assert translation_grid(4, 1) == [1]


def test_translated_sup_between_remainder_and_bound():
    g = sobolev_example()
    plan = plan_from_envelope(g.spec, 0, 4, 2.0**-P)
    sup = remainder_translated_sup(g.spec, g.exact_integral, 0, 4, plan, 9, P)
    R = abs(g.closed_form_remainder(4, P).mpf)
    bound = bound_sobolev_dist(4, 4, 12, P).mpf
    assert R * (1 - mpmath.mpf(10) ** -40) <= sup.mpf <= bound


def test_translated_sup_single_point():
    g = sobolev_example()
    plan = plan_from_envelope(g.spec, 0, 2, 1e-40)
    sup = remainder_translated_sup(g.spec, g.exact_integral, 0, 2, plan, 1, P)
    E = remainder_empirical(g.spec, g.exact_integral, 0, 2, plan, P)
    assert sup.mpf == abs(E.mpf)


def test_translated_sup_stays_exact_on_bandlimited():
    f8 = sinc_power(4)
    plan = plan_sinc_power(4, 4, 12)
    sup = remainder_translated_sup(f8.spec, f8.exact_integral, 0, 4, plan, 5, P)
    # the translated tails shift by at most half a lattice step
    assert float(sup) <= 2 * plan.truncation_bound


@pytest.fixture(scope="module")
def table6_errors():
    g = sobolev_example()
    return [(2**j, g.closed_form_remainder(2**j, P)) for j in range(1, 14)]


@pytest.fixture(scope="module")
def table2_errors():
    entry = branch_point(Fraction(1, 2), P)
    out = []
    for s in range(2, 16):
        plan = plan_branch_point(Fraction(1, 2), s)
        out.append((s, remainder_empirical(entry.spec, entry.exact_integral, 0, s, plan, P)))
    return out


@pytest.fixture(scope="module")
def table1_errors():
    f8 = sinc_power(4)
    out = []
    for j in range(1, 17):
        s = Fraction(j, 2)
        out.append((s, remainder_empirical(f8.spec, f8.exact_integral, 0, s, plan_sinc_power(4, s, 12), P)))
    return out


def test_classify_polynomial(table6_errors):
    sc = classify_decay(table6_errors, P)
    assert isinstance(sc.verdict, PolynomialRate)
    assert sc.verdict.r_plus_alpha == pytest.approx(4, abs=0.05)


def test_classify_exponential(table2_errors):
    sc = classify_decay(table2_errors, P)
    assert isinstance(sc.verdict, ExponentialRate)
    assert sc.verdict.a == pytest.approx(0.5, abs=0.05)


def test_classify_bandlimited_plateau(table1_errors):
    plateau = [(s, e) for s, e in table1_errors if s >= 4]
    assert isinstance(classify_decay(plateau, P).verdict, Bandlimited)
    full = classify_decay(table1_errors, P).verdict
    assert isinstance(full, Bandlimited)
    assert full.T == pytest.approx(8 * math.pi)


def test_classify_exact_zeros_are_bandlimited():
    samples = [(s, 0) for s in (1, 2, 3, 4)]
    samples[0] = (1, mpmath.mpf("1e-3"))
    assert isinstance(classify_decay(samples, P).verdict, Bandlimited)


def _parameter(verdict):
    return next(iter(vars(verdict).values()))


# scales that keep every fitted error above the absolute zero threshold
@pytest.mark.parametrize("scale", [1e-3, -7.5, 1e12])
def test_classify_is_scale_equivariant(table6_errors, table2_errors, scale):
    for samples in (table6_errors, table2_errors):
        base = classify_decay(samples, P)
        scaled = classify_decay([(s, e.mpf * scale) for s, e in samples], P)
        assert type(scaled.verdict) is type(base.verdict)
        assert _parameter(scaled.verdict) == pytest.approx(_parameter(base.verdict), rel=1e-9)
        assert scaled.log_constant == pytest.approx(base.log_constant + math.log(abs(scale)), abs=1e-9)


def test_classify_rejects_degenerate_input():
    with pytest.raises(DomainError):
        classify_decay([(s, 1e-5) for s in (1, 2, 3, 4)])
    with pytest.raises(DomainError):
        classify_decay([(1, 1e-2), (2, 1e-3), (3, 1e-4)])
    with pytest.raises(DomainError):
        classify_decay([(1, 1e-2), (3, 1e-3), (2, 1e-4), (4, 1e-5)])
