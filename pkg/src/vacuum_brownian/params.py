"""Physical parameters of the two Brownian particles and their unit conversions.

Everything inside the package works in natural units (hbar = c = 1) with an
arbitrary time unit; frequencies, couplings and masses then all carry
dimensions of inverse time. SI conversion lives only in this module.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import constants

HBAR = constants.hbar
C_LIGHT = constants.c

#: Operational meaning of "non-relativistic" for velocities (fraction of c).
MAX_VELOCITY = 0.1
#: Below this the small-ratio shortcut for the mirror is trusted.
SMALL_RATIO_LIMIT = 1e-2


class InvalidParameterError(ValueError):
    """A physical parameter violates its domain."""


class Kind(str, enum.Enum):
    CHARGE = "charge"
    MIRROR = "mirror"


@dataclass(frozen=True)
class ParticleParams:
    """Parameters of a scalar charge or an imperfect mirror.

    ``coupling`` is the charge strength ``q`` for a charge and the plasma
    frequency ``omega_p`` for a mirror. ``v0`` is the initial velocity of a
    charge; for a mirror it is the velocity of the frame the mirror was
    moving in before the noise is switched on, which its drag relaxes
    towards. ``z2_0`` is the initial position variance added to the
    mean-square displacement.
    """

    kind: Kind
    mass: float
    coupling: float
    cutoff: float | None = None
    v0: float = 0.0
    z2_0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        for name in ("mass", "coupling"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
        if self.cutoff is not None:
            if self.kind is Kind.MIRROR:
                raise InvalidParameterError("a mirror's cutoff is its plasma frequency; do not pass cutoff")
            if not (math.isfinite(self.cutoff) and self.cutoff > 0):
                raise InvalidParameterError(f"cutoff must be positive, got {self.cutoff!r}")
        if not abs(self.v0) <= MAX_VELOCITY:
            raise InvalidParameterError(f"|v0| must be <= {MAX_VELOCITY} (non-relativistic), got {self.v0!r}")
        if not (math.isfinite(self.z2_0) and self.z2_0 >= 0):
            raise InvalidParameterError(f"z2_0 must be non-negative, got {self.z2_0!r}")

    @classmethod
    def charge(cls, q, mass, cutoff=None, v0=0.0, z2_0=0.0) -> ParticleParams:
        return cls(Kind.CHARGE, mass, q, cutoff=cutoff, v0=v0, z2_0=z2_0)

    @classmethod
    def mirror(cls, omega_p, mass, v0=0.0, z2_0=0.0) -> ParticleParams:
        return cls(Kind.MIRROR, mass, omega_p, v0=v0, z2_0=z2_0)

    @classmethod
    def mirror_from_ratio(cls, gamma_ratio, omega_p=1.0, v0=0.0, z2_0=0.0) -> ParticleParams:
        """Mirror with a prescribed ``Gamma = omega_p / (pi m)``."""
        if not gamma_ratio > 0:
            raise InvalidParameterError(f"gamma_ratio must be positive, got {gamma_ratio!r}")
        return cls.mirror(omega_p, omega_p / (math.pi * gamma_ratio), v0=v0, z2_0=z2_0)

    @classmethod
    def charge_from_gamma(cls, gamma, mass=1.0, cutoff=None, v0=0.0, z2_0=0.0) -> ParticleParams:
        """Charge whose relaxation rate ``q**2 / 2m`` equals ``gamma``."""
        if not gamma > 0:
            raise InvalidParameterError(f"gamma must be positive, got {gamma!r}")
        return cls.charge(math.sqrt(2.0 * mass * gamma), mass, cutoff=cutoff, v0=v0, z2_0=z2_0)

    @property
    def is_charge(self) -> bool:
        return self.kind is Kind.CHARGE

    @property
    def reference_velocity(self) -> float:
        """Velocity the drag relaxes towards: 0 for a charge, ``v0`` for a mirror."""
        return 0.0 if self.is_charge else self.v0

    @property
    def effective_cutoff(self) -> float:
        """UV cutoff: ``cutoff`` (default ``gamma_c``) for a charge, ``omega_p`` for a mirror."""
        if self.is_charge:
            return self.cutoff if self.cutoff is not None else derive_constants(self).gamma
        return self.coupling


@dataclass(frozen=True)
class DerivedConstants:
    gamma: float
    gamma_ratio: float | None = None

    @property
    def relaxation_time(self) -> float:
        return 1.0 / self.gamma

    @property
    def small_ratio_valid(self) -> bool:
        return self.gamma_ratio is not None and self.gamma_ratio < SMALL_RATIO_LIMIT


def derive_constants(p: ParticleParams) -> DerivedConstants:
    """Relaxation rate (and for a mirror the dimensionless ratio Gamma)."""
    if p.is_charge:
        return DerivedConstants(gamma=p.coupling**2 / (2.0 * p.mass))
    gamma = p.coupling**2 / (math.pi * p.mass)
    return DerivedConstants(gamma=gamma, gamma_ratio=p.coupling / (math.pi * p.mass))


# -- SI conversion ------------------------------------------------------------
# With time measured in seconds, a mass M [kg] becomes the frequency M c^2 / hbar.


def mass_to_natural(mass_kg: float) -> float:
    return mass_kg * C_LIGHT**2 / HBAR


def mass_to_si(mass_natural: float) -> float:
    return mass_natural * HBAR / C_LIGHT**2


def length_to_natural(meters: float) -> float:
    """Length in light-seconds."""
    return meters / C_LIGHT


def length_to_si(light_seconds: float) -> float:
    return light_seconds * C_LIGHT


def order_of_magnitude(x: float) -> int:
    return round(math.log10(x))


@dataclass(frozen=True)
class SiEstimates:
    """Headline numbers in SI units. ``gamma_ratio`` is None for a charge."""

    kind: Kind
    mass_kg: float
    relaxation_time_s: float
    diffusion_time_s: float
    distance_m: float
    gamma_ratio: float | None
    illustrative: bool

    def orders(self) -> dict:
        out = {
            "relaxation_time_s": order_of_magnitude(self.relaxation_time_s),
            "diffusion_time_s": order_of_magnitude(self.diffusion_time_s),
        }
        if self.gamma_ratio is not None:
            out["gamma_ratio"] = order_of_magnitude(self.gamma_ratio)
        return out


def universal_diffusion_time(mass_kg: float, distance_m: float) -> float:
    """Time for <z^2> ~ (hbar/m) t to reach ``distance_m**2``."""
    if not (mass_kg > 0 and distance_m > 0):
        raise InvalidParameterError("mass and distance must be positive")
    return distance_m**2 * mass_kg / HBAR


def estimate_si(p: ParticleParams, distance: float) -> SiEstimates:
    """Order-of-magnitude estimates for a particle given in SI units.

    Here ``p.mass`` is in kg and ``p.coupling`` in s^-1 (the plasma
    frequency, or the charge strength expressed as a frequency). The charge
    numbers are illustrative only: the factor relating ``q`` to the
    electronic charge is not modelled.
    """
    natural = ParticleParams(p.kind, mass_to_natural(p.mass), p.coupling, cutoff=p.cutoff)
    derived = derive_constants(natural)
    return SiEstimates(
        kind=p.kind,
        mass_kg=p.mass,
        relaxation_time_s=derived.relaxation_time,
        diffusion_time_s=universal_diffusion_time(p.mass, distance),
        distance_m=distance,
        gamma_ratio=derived.gamma_ratio,
        illustrative=p.is_charge,
    )
