import math

import numpy as np
import pytest

from vacuum_brownian import analytic, quadrature
from vacuum_brownian.noise import SpectralDensity
from vacuum_brownian.quadrature import QuadratureError


def test_integrate_1d_polynomial_exact():
    r = quadrature.integrate_1d(lambda x: 3 * x * x, 0.0, 2.0)
    assert r.value == pytest.approx(8.0, rel=1e-15)
    assert r.abs_error_estimate <= 1e-11
    assert r.evaluations > 0


def test_integrate_1d_empty_interval_and_bad_input():
    assert quadrature.integrate_1d(math.exp, 1.0, 1.0).value == 0.0
    with pytest.raises(ValueError):
        quadrature.integrate_1d(math.exp, 1.0, 0.0)
    with pytest.raises(ValueError):
        quadrature.integrate_1d(math.exp, 0.0, 1.0, tol=-1.0)


def test_integrate_1d_kink_points():
    r = quadrature.integrate_1d(lambda x: abs(x - 0.3), 0.0, 1.0, points=[0.3])
    assert r.value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-14)


def test_integrate_1d_cancelling_integrand():
    # int_0^{2pi} sin(x) (1 + x) dx = -2pi; the default tolerance is relative to int |f|
    r = quadrature.integrate_1d(lambda x: math.sin(x) * (1 + x), 0.0, 2 * math.pi)
    assert r.value == pytest.approx(-2 * math.pi, rel=1e-12)


def test_integrate_1d_reports_failure():
    # integrable singularity with an unreachable tolerance
    with pytest.raises(QuadratureError) as info:
        quadrature.integrate_1d(lambda x: 1 / math.sqrt(abs(math.sin(40 * x))) if x else 0.0, 0.0, 7.0, tol=1e-300)
    assert math.isfinite(info.value.best_estimate)


def test_integrate_2d_separable():
    r = quadrature.integrate_2d(lambda x, y: x * math.exp(y), (0.0, 2.0), (0.0, 1.0))
    assert r.value == pytest.approx(2.0 * (math.e - 1), rel=1e-13)


def test_integrate_2d_tolerance_is_met():
    # int_0^1 int_0^1 x y sin(x y^2) dy dx = (1 - sin 1) / 2
    r = quadrature.integrate_2d(lambda x, y: x * y * math.sin(x * y * y), (0.0, 1.0), (0.0, 1.0), tol=1e-9)
    assert abs(r.value - 0.5 * (1 - math.sin(1.0))) <= 1e-9


@pytest.mark.parametrize("gamma,m,cutoff", [(1.0, 1.0, 1.0), (0.3, 2.0, 10.0), (5.0, 0.1, 0.2)])
def test_charge_oracle_agrees_with_closed_form(gamma, m, cutoff):
    r = quadrature.v2_charge_quad(gamma, m, cutoff)
    assert r.value == pytest.approx(analytic.v2_charge(gamma, m, cutoff), rel=1e-12)


def test_mirror_routes_agree_and_swap_invariant():
    G = 0.1
    m = 1 / (math.pi * G)
    mq = quadrature.v2_mirror_quad(G, m, 1.0)
    swapped = quadrature.v2_mirror_double_quad(G, m, 1.0, swap=True)
    assert mq.spectral.value == pytest.approx(mq.double.value, rel=1e-12)
    assert swapped.value == pytest.approx(mq.double.value, rel=1e-12)
    assert mq.value == pytest.approx(9.432758854960e-04, rel=1e-11)


def test_mirror_zero_plasma_frequency():
    assert quadrature.v2_mirror_quad(1.0, 1.0, 0.0).value == 0.0


def test_mirror_scaling_with_plasma_frequency():
    # with Gamma fixed, <v^2> depends on Gamma alone
    G = 0.5
    vals = []
    for wp in (0.5, 1.0, 4.0):
        m = wp / (math.pi * G)
        vals.append(quadrature.v2_mirror_quad(G * wp, m, wp).value)
    assert vals[0] == pytest.approx(vals[1], rel=1e-11)
    assert vals[2] == pytest.approx(vals[1], rel=1e-11)


def test_equilibrium_quad_reduces_to_charge():
    s = SpectralDensity.charge_ohmic(q=math.sqrt(2.0), cutoff=3.0)
    r = quadrature.v2_equilibrium_quad(s, 1.0, 1.0)
    assert r.value == pytest.approx(analytic.v2_charge(1.0, 1.0, 3.0), rel=1e-12)


def test_msd_quad_short_time_is_ballistic():
    s = SpectralDensity.charge_ohmic(q=math.sqrt(2.0), cutoff=1.0)
    v2 = analytic.v2_charge(1.0, 1.0, 1.0)
    t = 1e-3
    r = quadrature.msd_quad(t, s, 1.0, 1.0, v2_0=v2, z2_0=0.25)
    assert r.value - 0.25 == pytest.approx(v2 * t * t, rel=2e-3)
    assert quadrature.msd_quad(0.0, s, 1.0, 1.0, z2_0=0.25).value == 0.25


def test_msd_quad_saturates_for_spectrum_vanishing_at_zero():
    # S(0) = 0: no zero-frequency power, so <z^2> grows slower than linearly
    s = SpectralDensity.charge_ohmic(q=math.sqrt(2.0), cutoff=1.0)
    z = [quadrature.msd_quad(t, s, 1.0, 1.0).value for t in (50.0, 100.0, 200.0)]
    assert z[1] - z[0] < 0.5 * (z[0] / 50.0) * 50.0
    assert z[2] > z[1] > z[0]


def test_msd_quad_white_noise_limit():
    # a flat spectrum on a wide band recovers 2 v2/gamma (t - (1 - e^{-gamma t})/gamma)
    class Flat:
        omega_max = 400.0
        kinks = None

        def __call__(self, w):
            return 1.0

    gamma, t = 1.0, 5.0
    v2 = quadrature.v2_equilibrium_quad(Flat(), gamma, 1.0).value
    r = quadrature.msd_quad(t, Flat(), gamma, 1.0, v2_0=v2)
    expect = analytic.MsdCurve(gamma, math.pi / 2).__call__(t)
    assert r.value == pytest.approx(expect, rel=2e-2)
    assert np.isfinite(r.abs_error_estimate)
