"""Oracle suite behind ``vacuum-brownian verify``.

Every check compares two independent routes to the same number and
reports ``metric`` (a relative error or a z-score) against ``tolerance``.
"""

from __future__ import annotations

import math

import numpy as np

from . import analytic, noise, quadrature

MIRROR_RATIOS = (0.01, 0.1, 1.0, 3.0)
CHARGE_POINTS = ((1.0, 1.0, 1.0), (0.5, 1.0, 0.5), (2.0, 3.0, 50.0), (1e-3, 0.2, 7.0))
COVARIANCE_PATHS = 200
COVARIANCE_SAMPLES = 4096


def _rel(a, b):
    return abs(a - b) / abs(b)


def _check(name, metric, tolerance, **detail):
    return {"name": name, "metric": float(metric), "tolerance": float(tolerance), "passed": bool(metric <= tolerance), **detail}


def charge_checks():
    out = []
    for gamma, m, cutoff in CHARGE_POINTS:
        quad = quadrature.v2_charge_quad(gamma, m, cutoff).value
        closed = analytic.v2_charge(gamma, m, cutoff)
        tag = f"gamma={gamma:g},m={m:g},cutoff={cutoff:g}"
        out.append(_check(f"v2_charge[{tag}]", _rel(closed, quad), 1e-10, closed=closed, quadrature=quad))
        fdt = analytic.v2_fdt(gamma, m, cutoff)
        out.append(_check(f"v2_fdt[{tag}]", _rel(fdt, closed), 4 * np.finfo(float).eps, fdt=fdt, langevin=closed))
    return out


def mirror_checks(perturb_exact=0.0, form="printed"):
    out = []
    for G in MIRROR_RATIOS:
        m = 1.0 / (math.pi * G)  # omega_p = 1
        gamma = G
        try:
            q = quadrature.v2_mirror_quad(gamma, m, 1.0)
        except quadrature.InconsistencyError as exc:
            out.append(_check(f"mirror_quadrature_routes[Gamma={G:g}]", math.inf, 0.0, error=str(exc)))
            continue
        out.append(
            _check(
                f"mirror_quadrature_routes[Gamma={G:g}]",
                _rel(q.spectral.value, q.double.value),
                1e-10,
                double=q.double.value,
                spectral=q.spectral.value,
            )
        )
        exact = analytic.v2_mirror_exact(G, form=form) * (1.0 + perturb_exact)
        out.append(
            _check(f"v2_mirror_exact[Gamma={G:g},form={form}]", _rel(exact, q.value), 1e-8, closed=exact, quadrature=q.value)
        )
    G = 1e-3
    exact = analytic.v2_mirror_exact(G, form=form) * (1.0 + perturb_exact)
    out.append(_check(f"v2_mirror_exact_small_ratio[Gamma={G:g}]", _rel(analytic.v2_mirror_leading(G), exact), 1e-2))
    G = 1e-4
    m = 1.0 / (math.pi * G)
    fdt = analytic.v2_fdt(G, m, 1.0)
    out.append(
        _check(f"v2_fdt_mirror_leading[Gamma={G:g}]", _rel(fdt, analytic.v2_fdt_mirror_leading(G, m, G)), 1e-3)
    )
    return out


def spectrum_checks(seed=0):
    out = []
    for omega_p in (1.0, 2.5):
        s = noise.SpectralDensity.mirror_piecewise(omega_p)
        g_int = quadrature.integrate_1d(lambda w: noise.mirror_g(w, omega_p), 0.0, 2 * omega_p, points=[omega_p]).value
        out.append(_check(f"mirror_spectrum_mass[omega_p={omega_p:g}]", _rel(g_int, omega_p**4 / 4), 1e-10))
    for s in (noise.SpectralDensity.charge_ohmic(1.0, 0.5), noise.SpectralDensity.mirror_piecewise(1.0)):
        paths = noise.synthesize_ensemble(s, noise.max_step(s), COVARIANCE_SAMPLES, seed, COVARIANCE_PATHS)
        cov = noise.check_covariance(s, paths)
        out.append(_check(f"noise_covariance[{s.kind}]", float(cov.z_scores.max()), 3.0, lags=int(cov.lags.size)))
    return out


def run_oracle_suite(perturb_exact=0.0, mirror_form="printed", seed=0, threads=None):
    """Run all identities; returns ``{passed, checks, worst}``.

    ``worst`` names the failed check with the largest metric/tolerance
    ratio, or is None when everything passes. ``threads`` is accepted for
    interface symmetry; the suite is serial.
    """
    checks = charge_checks() + mirror_checks(perturb_exact, mirror_form) + spectrum_checks(seed)
    failed = [c for c in checks if not c["passed"]]

    def severity(c):
        return math.inf if c["tolerance"] == 0 else c["metric"] / c["tolerance"]

    worst = max(failed, key=severity)["name"] if failed else None
    return {"passed": not failed, "checks": checks, "worst": worst}
