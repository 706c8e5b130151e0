import math

import pytest

from vacuum_brownian.params import (
    HBAR,
    InvalidParameterError,
    Kind,
    ParticleParams,
    derive_constants,
    estimate_si,
    length_to_natural,
    length_to_si,
    mass_to_natural,
    mass_to_si,
    order_of_magnitude,
    universal_diffusion_time,
)


def test_charge_damping_rate():
    p = ParticleParams.charge(q=1.0, mass=1.0)
    d = derive_constants(p)
    assert d.gamma == 0.5
    assert d.gamma_ratio is None
    assert d.relaxation_time == 2.0
    assert p.effective_cutoff == 0.5


def test_mirror_damping_and_ratio():
    p = ParticleParams.mirror(omega_p=2.0, mass=3.0)
    d = derive_constants(p)
    assert d.gamma == pytest.approx(4.0 / (3.0 * math.pi), rel=1e-15)
    assert d.gamma_ratio == pytest.approx(2.0 / (3.0 * math.pi), rel=1e-15)
    # Gamma = gamma_m / omega_p by construction
    assert d.gamma_ratio == pytest.approx(d.gamma / 2.0, rel=1e-15)
    assert p.effective_cutoff == 2.0


def test_mirror_from_ratio_roundtrip():
    for G in (1e-6, 1e-3, 0.5, 3.0):
        d = derive_constants(ParticleParams.mirror_from_ratio(G, omega_p=1.7))
        assert d.gamma_ratio == pytest.approx(G, rel=1e-14)


def test_charge_from_gamma_roundtrip():
    p = ParticleParams.charge_from_gamma(0.25, mass=2.0, cutoff=1.0)
    assert derive_constants(p).gamma == pytest.approx(0.25, rel=1e-15)
    assert p.effective_cutoff == 1.0


def test_small_ratio_flag():
    assert derive_constants(ParticleParams.mirror_from_ratio(1e-3)).small_ratio_valid
    assert not derive_constants(ParticleParams.mirror_from_ratio(0.5)).small_ratio_valid
    assert not derive_constants(ParticleParams.charge(1.0, 1.0)).small_ratio_valid


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind=Kind.CHARGE, mass=0.0, coupling=1.0),
        dict(kind=Kind.CHARGE, mass=-1.0, coupling=1.0),
        dict(kind=Kind.CHARGE, mass=1.0, coupling=0.0),
        dict(kind=Kind.CHARGE, mass=1.0, coupling=float("nan")),
        dict(kind=Kind.CHARGE, mass=float("inf"), coupling=1.0),
        dict(kind=Kind.CHARGE, mass=1.0, coupling=1.0, cutoff=0.0),
        dict(kind=Kind.MIRROR, mass=1.0, coupling=1.0, cutoff=2.0),
        dict(kind=Kind.MIRROR, mass=1.0, coupling=1.0, v0=0.2),
        dict(kind=Kind.CHARGE, mass=1.0, coupling=1.0, z2_0=-1.0),
    ],
)
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(InvalidParameterError):
        ParticleParams(**kwargs)


def test_reference_velocity_semantics():
    assert ParticleParams.mirror(1.0, 1.0, v0=0.05).reference_velocity == 0.05
    # for the charge v0 is only an initial condition
    assert ParticleParams.charge(1.0, 1.0, v0=0.05).reference_velocity == 0.0


def test_unit_conversions_roundtrip():
    assert mass_to_si(mass_to_natural(1e-3)) == pytest.approx(1e-3, rel=1e-15)
    assert length_to_si(length_to_natural(1e-2)) == pytest.approx(1e-2, rel=1e-15)
    # electron mass ~ 7.76e20 s^-1 in natural units
    assert mass_to_natural(9.1093837e-31) == pytest.approx(7.763e20, rel=1e-3)


def test_order_of_magnitude():
    assert order_of_magnitude(3.7e-33) == -32
    assert order_of_magnitude(9.5e26) == 27
    assert order_of_magnitude(1.0) == 0


def test_universal_diffusion_time_is_independent_of_coupling():
    t1 = estimate_si(ParticleParams(Kind.MIRROR, 1e-3, 1e16), 1e-2).diffusion_time_s
    t2 = estimate_si(ParticleParams(Kind.MIRROR, 1e-3, 1e10), 1e-2).diffusion_time_s
    t3 = estimate_si(ParticleParams(Kind.CHARGE, 1e-3, 1e4), 1e-2).diffusion_time_s
    assert t1 == t2 == t3 == universal_diffusion_time(1e-3, 1e-2)
    assert t1 == pytest.approx(1e-4 * 1e-3 / HBAR, rel=1e-15)


def test_estimate_si_mirror_relaxation():
    est = estimate_si(ParticleParams(Kind.MIRROR, 1e-5, 1e16), 1e-2)
    m_nat = mass_to_natural(1e-5)
    assert est.relaxation_time_s == pytest.approx(math.pi * m_nat / 1e32, rel=1e-14)
    assert est.gamma_ratio == pytest.approx(1e16 / (math.pi * m_nat), rel=1e-14)
    assert est.kind is Kind.MIRROR


@pytest.mark.parametrize("s", [4.0, 0.25, 16.0])
def test_charge_coupling_scaling_is_exact(s):
    # powers of two keep sqrt(s) and every product exact
    base = derive_constants(ParticleParams.charge(q=1.3, mass=0.7)).gamma
    scaled = derive_constants(ParticleParams.charge(q=math.sqrt(s) * 1.3, mass=0.7)).gamma
    assert scaled == s * base


@pytest.mark.parametrize("s", [2.0, 0.5, 8.0])
def test_mass_scaling_is_exact(s):
    for p, ps in [
        (ParticleParams.charge(1.3, 0.7), ParticleParams.charge(1.3, 0.7 * s)),
        (ParticleParams.mirror(1.3, 0.7), ParticleParams.mirror(1.3, 0.7 * s)),
    ]:
        assert derive_constants(ps).gamma == derive_constants(p).gamma / s


@pytest.mark.parametrize("s", [3.0, 0.1, 7.7])
def test_scaling_general_factor(s):
    base = derive_constants(ParticleParams.mirror(2.0, 0.9)).gamma
    assert derive_constants(ParticleParams.mirror(2.0, 0.9 * s)).gamma == pytest.approx(base / s, rel=2e-16)
