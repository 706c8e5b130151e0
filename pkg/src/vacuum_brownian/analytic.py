"""Closed-form results: radiation reaction, equilibrium <v^2>, FDT, MSD."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import MAX_VELOCITY, InvalidParameterError

MIRROR_FORMS = ("printed", "derived")


class DomainError(ValueError):
    """Argument outside the domain where a closed form applies."""


def _positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise InvalidParameterError(f"{name} must be positive, got {value!r}")


def rr_force_charge(v, q):
    """Radiation reaction on the scalar charge, -(q^2/2) v / (1 - v^2)."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) >= 1):
        raise DomainError("charge velocity must satisfy |v| < 1")
    out = -0.5 * q**2 * v / (1.0 - v * v)
    return float(out) if out.ndim == 0 else out


def rr_force_mirror(v, omega_p, v0=0.0):
    """Velocity-referenced mirror drag, -(omega_p^2/pi) (v - v0)."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) > MAX_VELOCITY) or abs(v0) > MAX_VELOCITY:
        raise DomainError(f"mirror velocities must satisfy |v|, |v0| <= {MAX_VELOCITY}")
    out = -(omega_p**2 / math.pi) * (v - v0)
    return float(out) if out.ndim == 0 else out


def v2_charge(gamma, m, cutoff):
    """Equilibrium <v^2> of the charge with UV cutoff ``cutoff``."""
    _positive(gamma=gamma, m=m)
    if cutoff < 0:
        raise InvalidParameterError("cutoff must be non-negative")
    return gamma / (2.0 * math.pi * m) * math.log1p((cutoff / gamma) ** 2)


def _arctan_gap(G):
    # arctan(2/G) - arctan(1/G) == arctan(G) - arctan(G/2) == arctan(G / (2 + G^2)) for G > 0
    return math.atan(G / (2.0 + G * G))


def v2_mirror_exact(gamma_ratio, form="printed"):
    """Equilibrium <v^2> of the imperfect mirror as a function of Gamma alone.

    ``form="printed"`` evaluates the commonly quoted expression term for term.
    It does not match the double integral it claims to evaluate; the
    discrepancy is in the Gamma^4 logarithm. ``form="derived"`` is the
    closed form obtained by integrating the piecewise-cubic spectrum, which
    agrees with brute-force quadrature to rounding. Both share the same
    small-Gamma limit (Gamma^2/4)(ln 4 - 1).
    """
    if form not in MIRROR_FORMS:
        raise ValueError(f"form must be one of {MIRROR_FORMS}, got {form!r}")
    G = float(gamma_ratio)
    if not G > 0:
        raise DomainError(f"Gamma must be positive, got {gamma_ratio!r}")
    G2 = G * G
    # ln((4 + G^2) / (1 + G^2)) without losing the small-G tail
    log_ratio = math.log(4.0) + math.log1p(G2 / 4.0) - math.log1p(G2)
    # ln(G^4 + 4 G^2) = ln(4 G^2) + ln(1 + G^2/4)
    log_num = math.log(4.0 * G2) + math.log1p(G2 / 4.0)
    if form == "printed":
        quartic = G2 * (log_num - math.log1p(G2))
    else:
        quartic = 0.5 * G2 * (log_num - 2.0 * math.log1p(G2))
    return G2 / 12.0 * (3.0 * log_ratio + quartic - 1.0) - G / 3.0 * _arctan_gap(G)


def v2_mirror_small_gamma(gamma, m):
    """Leading small-Gamma estimate gamma_m / (4 pi m)."""
    _positive(gamma=gamma, m=m)
    return gamma / (4.0 * math.pi * m)


def v2_mirror_leading(gamma_ratio):
    """(Gamma^2 / 4)(ln 4 - 1), the small-Gamma limit of the exact mirror result."""
    return gamma_ratio**2 / 4.0 * (math.log(4.0) - 1.0)


def fdt_susceptibility(omega, gamma, m):
    """Real and imaginary parts of alpha(omega) = (gamma/m) / (gamma - i omega)."""
    _positive(gamma=gamma, m=m)
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be non-negative")
    denom = gamma * gamma + omega * omega
    re = gamma / m * gamma / denom
    im = gamma / m * omega / denom
    if re.ndim == 0:
        return float(re), float(im)
    return re, im


def v2_fdt(gamma, m, cutoff):
    """Zero-temperature FDT estimate (1/pi) int_0^cutoff alpha''(omega) d omega."""
    _positive(gamma=gamma, m=m)
    if cutoff < 0:
        raise InvalidParameterError("cutoff must be non-negative")
    return gamma / (2.0 * math.pi * m) * math.log1p((cutoff / gamma) ** 2)


def v2_fdt_mirror_leading(gamma, m, gamma_ratio):
    """(gamma_m / pi m) ln(1/Gamma): the FDT mirror value for Gamma << 1."""
    return gamma / (math.pi * m) * math.log(1.0 / gamma_ratio)


@dataclass(frozen=True)
class MsdCurve:
    """<z^2(t)> = 2 v2_eq/gamma [t - (1 - exp(-gamma t))/gamma] + z2_0."""

    gamma: float
    v2_eq: float
    z2_0: float = 0.0

    def __call__(self, t):
        return msd(t, self)

    def ballistic(self, t):
        return self.v2_eq * np.asarray(t, dtype=float) ** 2 + self.z2_0

    @property
    def diffusive_slope(self) -> float:
        return 2.0 * self.v2_eq / self.gamma


def msd(t, curve: MsdCurve):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    g = curve.gamma
    x = g * t
    # t - (1 - e^{-x})/g == (x + expm1(-x)) / g; for tiny x use the series
    # to avoid the cancellation between x and 1 - e^{-x}
    small = x < 1e-4
    bracket = np.where(small, x * x / 2.0 * (1.0 - x / 3.0 + x * x / 12.0), x + np.expm1(-x)) / g
    out = 2.0 * curve.v2_eq / g * bracket + curve.z2_0
    return float(out) if out.ndim == 0 else out
