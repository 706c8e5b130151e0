"""Adaptive 1-D / iterated 2-D quadrature used as the brute-force oracle.

The adaptive engine is QUADPACK's globally adaptive Gauss-Kronrod scheme
(via :func:`scipy.integrate.quad`), capped at 2**14 subintervals. This module
adds the result/error contract, magnitude-aware default tolerances and the
model-specific integrals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

SUBDIVISION_LIMIT = 2**14
DEFAULT_REL_TOL = 1e-12


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value


class QuadratureError(RuntimeError):
    """Adaptive refinement failed to reach the requested tolerance."""

    def __init__(self, message, best_estimate, error_bound):
        super().__init__(f"{message} (best estimate {best_estimate!r} +/- {error_bound!r})")
        self.best_estimate = best_estimate
        self.error_bound = error_bound


class InconsistencyError(RuntimeError):
    """Two independent quadrature routes disagree beyond their error bounds."""


def _magnitude(f, a, b, points):
    # L1 norm rather than |integral|: oscillatory integrands that cancel
    # (covariance at large lag) would otherwise get an unreachable tolerance
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        coarse = integrate.quad(lambda x: abs(f(x)), a, b, points=points, limit=50, epsabs=0.0, epsrel=1e-4)[0]
    return coarse


def integrate_1d(f, a, b, tol=None, points=None) -> QuadResult:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    With ``tol=None`` the tolerance is ``DEFAULT_REL_TOL`` times a coarse
    estimate of the integral of ``|f|``. ``points`` lists interior kinks.
    """
    if not a <= b:
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    if points is not None:
        points = [p for p in points if a < p < b] or None
    if tol is None:
        tol = DEFAULT_REL_TOL * _magnitude(f, a, b, points)
        if tol == 0.0:
            tol = 1e-300
    if not tol > 0:
        raise ValueError("tol must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f, a, b, points=points, limit=SUBDIVISION_LIMIT, epsabs=tol, epsrel=0.0, full_output=1
        )
    value, err, info = out[0], out[1], out[2]
    neval = int(info["neval"])
    if len(out) > 3 and err > tol:
        # ier == 2 (roundoff) with an error below a few ulps of the value is
        # as good as the arithmetic allows; anything else is a real failure
        if not err <= 64 * np.finfo(float).eps * abs(value):
            raise QuadratureError(str(out[3]).splitlines()[0], value, err)
    return QuadResult(float(value), float(err), neval)


def integrate_2d(f, x_range, y_range, tol=None, points_x=None, points_y=None) -> QuadResult:
    """Iterated integral of ``f(x, y)``; the inner tolerance is ``tol / 10`` per unit outer length."""
    (a, b), (c, d) = x_range, y_range
    if a == b or c == d:
        return QuadResult(0.0, 0.0, 0)
    if tol is None:

        def coarse_inner(x):
            return integrate.quad(lambda y: f(x, y), c, d, limit=50, epsrel=1e-4)[0]

        tol = DEFAULT_REL_TOL * _magnitude(coarse_inner, a, b, points_x) or 1e-300
    inner_tol = tol / 10.0 / (b - a)
    evals = 0
    inner_err = 0.0

    def inner(x):
        nonlocal evals, inner_err
        r = integrate_1d(lambda y: f(x, y), c, d, tol=inner_tol, points=points_y)
        evals += r.evaluations
        inner_err = max(inner_err, r.abs_error_estimate)
        return r.value

    outer = integrate_1d(inner, a, b, tol=tol, points=points_x)
    err = outer.abs_error_estimate + inner_err * (b - a)
    return QuadResult(outer.value, err, evals)


# -- oracles for the closed forms ----------------------------------------------


def v2_charge_quad(gamma, m, cutoff, tol=None) -> QuadResult:
    """(gamma/(pi m)) int_0^cutoff w dw / (gamma^2 + w^2)."""
    pref = gamma / (math.pi * m)
    r = integrate_1d(lambda w: w / (gamma * gamma + w * w), 0.0, cutoff, tol=None if tol is None else tol / pref)
    return QuadResult(pref * r.value, pref * r.abs_error_estimate, r.evaluations)


@dataclass(frozen=True)
class MirrorQuad:
    """Mirror <v^2> by the double integral and by the one-dimensional spectrum."""

    double: QuadResult
    spectral: QuadResult

    @property
    def value(self) -> float:
        return self.double.value


def v2_mirror_double_quad(gamma, m, omega_p, tol=None, swap=False) -> QuadResult:
    """(1/(2 pi^2 m^2)) int int w w' / ((w + w')^2 + gamma^2) over [0, omega_p]^2."""
    pref = 1.0 / (2.0 * math.pi**2 * m * m)
    g2 = gamma * gamma

    if swap:

        def f(y, x):
            return x * y / ((x + y) ** 2 + g2)
    else:

        def f(x, y):
            return x * y / ((x + y) ** 2 + g2)

    r = integrate_2d(f, (0.0, omega_p), (0.0, omega_p), tol=None if tol is None else tol / pref)
    return QuadResult(pref * r.value, pref * r.abs_error_estimate, r.evaluations)


def v2_equilibrium_quad(spectrum, gamma, m, tol=None) -> QuadResult:
    """(1/m^2) int S(w) / (gamma^2 + w^2) dw over the spectrum's support.

    This is the stationary velocity variance of dv/dt + gamma v = beta/m
    for any one-sided noise spectrum S.
    """
    pref = 1.0 / (m * m)
    g2 = gamma * gamma
    r = integrate_1d(
        lambda w: spectrum(w) / (g2 + w * w),
        0.0,
        spectrum.omega_max,
        tol=None if tol is None else tol / pref,
        points=spectrum.kinks,
    )
    return QuadResult(pref * r.value, pref * r.abs_error_estimate, r.evaluations)


def v2_mirror_quad(gamma, m, omega_p, tol=None) -> MirrorQuad:
    """Both quadrature routes for the mirror, checked against each other."""
    from .noise import SpectralDensity

    if omega_p == 0:
        zero = QuadResult(0.0, 0.0, 0)
        return MirrorQuad(zero, zero)
    double = v2_mirror_double_quad(gamma, m, omega_p, tol=tol)
    spectral = v2_equilibrium_quad(SpectralDensity.mirror_piecewise(omega_p), gamma, m, tol=tol)
    slack = double.abs_error_estimate + spectral.abs_error_estimate
    slack += 1e-13 * abs(double.value)
    if abs(double.value - spectral.value) > slack:
        raise InconsistencyError(
            f"double-integral route {double.value!r} and spectrum route {spectral.value!r} "
            f"differ by more than {slack!r}"
        )
    return MirrorQuad(double, spectral)


def _ramp_transfer(omega, t, gamma):
    """int_0^t h(u) e^{i w u} du for the displacement kernel h(u) = (1 - e^{-gamma u})/gamma."""
    omega = np.asarray(omega, dtype=float)
    # int_0^t e^{i w u} du = t e^{i w t/2} sinc(w t / 2pi), stable at w -> 0
    e1 = t * np.exp(0.5j * omega * t) * np.sinc(omega * t / (2 * np.pi))
    s = 1j * omega - gamma
    e2 = (np.exp(s * t) - 1.0) / s
    return (e1 - e2) / gamma


def msd_quad(t, spectrum, gamma, m, v2_0=0.0, z2_0=0.0, tol=None) -> QuadResult:
    """Exact <(z(t) - z(0))^2> + z2_0 for dv/dt + gamma v = beta/m, colored noise.

    The initial velocity has variance ``v2_0`` and is independent of the
    noise. Unlike the white-noise result, this keeps the memory of the
    noise, so it stays valid when S(w) vanishes at w = 0.
    """
    if t == 0:
        return QuadResult(z2_0, 0.0, 0)
    h1 = -math.expm1(-gamma * t) / gamma
    pref = 1.0 / (m * m)

    def integrand(w):
        return spectrum(w) * abs(_ramp_transfer(w, t, gamma)) ** 2

    r = integrate_1d(integrand, 0.0, spectrum.omega_max, tol=tol, points=spectrum.kinks)
    value = v2_0 * h1 * h1 + pref * r.value + z2_0
    return QuadResult(value, pref * r.abs_error_estimate, r.evaluations)
