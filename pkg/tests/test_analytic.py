import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vacuum_brownian import analytic
from vacuum_brownian.analytic import DomainError, MsdCurve
from vacuum_brownian.params import InvalidParameterError

# brute-force values of (1/(2 pi^2 m^2)) int int w w' / ((w + w')^2 + gamma^2)
# with omega_p = 1, m = 1/(pi Gamma); independent iterated quadrature
MIRROR_QUAD = {
    0.01: 9.653196210736e-06,
    0.1: 9.432758854960e-04,
    1.0: 4.778681280775e-02,
    3.0: 1.0395519813354e-01,
}

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_rr_force_charge_values():
    assert analytic.rr_force_charge(0.0, 2.0) == 0.0
    assert analytic.rr_force_charge(0.5, 1.0) == pytest.approx(-0.5 * 0.5 / 0.75, rel=1e-15)
    # linear regime reproduces the damping rate q^2/2
    assert analytic.rr_force_charge(1e-8, 2.0) / 1e-8 == pytest.approx(-2.0, rel=1e-12)


def test_rr_force_charge_domain():
    with pytest.raises(DomainError):
        analytic.rr_force_charge(1.0, 1.0)
    with pytest.raises(DomainError):
        analytic.rr_force_charge(np.array([0.1, -1.2]), 1.0)


def test_rr_force_mirror_reference_velocity():
    assert analytic.rr_force_mirror(0.05, 1.0, v0=0.05) == 0.0
    assert analytic.rr_force_mirror(0.01, 2.0) == pytest.approx(-4.0 / math.pi * 0.01, rel=1e-15)
    with pytest.raises(DomainError):
        analytic.rr_force_mirror(0.2, 1.0)
    with pytest.raises(DomainError):
        analytic.rr_force_mirror(0.0, 1.0, v0=0.11)


def test_v2_charge_at_cutoff_equal_gamma():
    # cutoff = gamma gives gamma ln 2 / (2 pi m)
    assert analytic.v2_charge(0.5, 1.0, 0.5) == pytest.approx(0.5 * math.log(2) / (2 * math.pi), rel=1e-15)


def test_v2_charge_zero_cutoff_and_errors():
    assert analytic.v2_charge(1.0, 1.0, 0.0) == 0.0
    with pytest.raises(InvalidParameterError):
        analytic.v2_charge(1.0, 0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        analytic.v2_charge(1.0, 1.0, -1.0)


@settings(max_examples=200, deadline=None)
@given(gamma=positive, m=positive, cutoff=positive)
def test_fdt_matches_charge_everywhere(gamma, m, cutoff):
    assert analytic.v2_fdt(gamma, m, cutoff) == analytic.v2_charge(gamma, m, cutoff)


@settings(max_examples=100, deadline=None)
@given(gamma=positive, m=positive, c1=positive, c2=positive)
def test_v2_charge_monotone_in_cutoff(gamma, m, c1, c2):
    lo, hi = sorted((c1, c2))
    assert analytic.v2_charge(gamma, m, lo) <= analytic.v2_charge(gamma, m, hi)


@pytest.mark.parametrize("G", sorted(MIRROR_QUAD))
def test_mirror_derived_form_matches_quadrature(G):
    assert analytic.v2_mirror_exact(G, form="derived") == pytest.approx(MIRROR_QUAD[G], rel=1e-10)


def test_mirror_printed_form_deviation_is_recorded():
    # the quoted Gamma^4 logarithm is off; pin the size of the gap so a
    # silent change to either form is caught
    rel = {G: analytic.v2_mirror_exact(G) / q - 1 for G, q in MIRROR_QUAD.items()}
    assert rel[0.01] == pytest.approx(-3.377e-4, rel=1e-3)
    assert rel[1.0] == pytest.approx(1.4033, rel=1e-3)
    assert abs(rel[3.0]) > 100


def test_mirror_forms_share_small_ratio_limit():
    for G in (1e-6, 1e-4, 1e-3):
        lead = analytic.v2_mirror_leading(G)
        for form in analytic.MIRROR_FORMS:
            assert analytic.v2_mirror_exact(G, form) == pytest.approx(lead, rel=20 * G)


def test_mirror_exact_rejects_bad_input():
    with pytest.raises(DomainError):
        analytic.v2_mirror_exact(0.0)
    with pytest.raises(DomainError):
        analytic.v2_mirror_exact(-1.0)
    with pytest.raises(ValueError):
        analytic.v2_mirror_exact(0.1, form="other")


def test_arctan_gap_identity():
    for G in (1e-3, 0.3, 1.0, 7.0):
        direct = math.atan(2 / G) - math.atan(1 / G)
        assert analytic._arctan_gap(G) == pytest.approx(direct, rel=1e-13)


def test_small_gamma_estimate_relation():
    # gamma_m/(4 pi m) = Gamma^2/4 with omega_p = 1; the exact limit carries ln 4 - 1
    G = 1e-3
    m = 1 / (math.pi * G)
    small = analytic.v2_mirror_small_gamma(G, m)
    assert small == pytest.approx(G * G / 4, rel=1e-14)
    assert analytic.v2_mirror_leading(G) / small == pytest.approx(math.log(4) - 1, rel=1e-14)
    # equilibrium kinetic energy of that estimate
    assert 0.5 * m * small == pytest.approx(G / (8 * math.pi), rel=1e-14)


def test_fdt_mirror_leading_and_ratio():
    G = 1e-4
    m = 1 / (math.pi * G)
    fdt = analytic.v2_fdt(G, m, 1.0)
    assert fdt == pytest.approx(analytic.v2_fdt_mirror_leading(G, m, G), rel=1e-3)
    ratio = fdt / analytic.v2_mirror_exact(G, "derived") / math.log(1 / G)
    # the ratio grows like 4 ln(1/Gamma) / (ln 4 - 1)
    assert ratio == pytest.approx(4 / (math.log(4) - 1), rel=1e-2)


def test_susceptibility_shape():
    re, im = analytic.fdt_susceptibility(np.array([0.0, 1.0, 1e6]), 1.0, 2.0)
    assert re[0] == 0.5 and im[0] == 0.0
    assert re[1] == pytest.approx(0.25) and im[1] == pytest.approx(0.25)
    assert im[2] == pytest.approx(0.5e-6, rel=1e-6)
    with pytest.raises(DomainError):
        analytic.fdt_susceptibility(-1.0, 1.0, 1.0)


def test_fdt_value_is_integral_of_dissipative_part():
    from scipy.integrate import quad

    g, m, cut = 0.7, 1.3, 4.0
    val = quad(lambda w: analytic.fdt_susceptibility(w, g, m)[1] / math.pi, 0, cut, epsabs=0, epsrel=1e-13)[0]
    assert analytic.v2_fdt(g, m, cut) == pytest.approx(val, rel=1e-12)


def test_msd_limits():
    c = MsdCurve(gamma=2.0, v2_eq=0.3, z2_0=0.1)
    assert c(0.0) == 0.1
    t = 1e-6
    assert c(t) - 0.1 == pytest.approx(0.3 * t * t, rel=1e-5)
    t = 1e4
    assert c(t) - 0.1 == pytest.approx(c.diffusive_slope * t, rel=1e-4)
    assert c.diffusive_slope == 0.3


def test_msd_series_branch_is_continuous():
    c = MsdCurve(gamma=1.0, v2_eq=1.0)
    below = c(1e-4 * (1 - 1e-9))
    above = c(1e-4 * (1 + 1e-9))
    assert above > below
    assert above == pytest.approx(below, rel=1e-8)
    with pytest.raises(DomainError):
        c(-1.0)


@settings(max_examples=100, deadline=None)
@given(gamma=positive, v2=positive, t1=st.floats(0, 1e3), t2=st.floats(0, 1e3))
def test_msd_monotone(gamma, v2, t1, t2):
    c = MsdCurve(gamma, v2)
    lo, hi = sorted((t1, t2))
    assert c(lo) <= c(hi) * (1 + 1e-12)
