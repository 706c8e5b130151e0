"""Brownian motion of a scalar charge and an imperfect mirror in the 1+1 dimensional vacuum."""

from .analytic import (
    MsdCurve,
    fdt_susceptibility,
    msd,
    rr_force_charge,
    rr_force_mirror,
    v2_charge,
    v2_fdt,
    v2_fdt_mirror_leading,
    v2_mirror_exact,
    v2_mirror_leading,
    v2_mirror_small_gamma,
)
from .langevin import EnsembleStats, SimConfig, fit_regimes, integrate_trajectory, run_ensemble
from .noise import NoisePath, SpectralDensity, synthesize, synthesize_ensemble, target_covariance
from .params import Kind, ParticleParams, derive_constants, estimate_si

__version__ = "0.1.0"

__all__ = [
    "EnsembleStats",
    "Kind",
    "MsdCurve",
    "NoisePath",
    "ParticleParams",
    "SimConfig",
    "SpectralDensity",
    "derive_constants",
    "estimate_si",
    "fdt_susceptibility",
    "fit_regimes",
    "integrate_trajectory",
    "msd",
    "rr_force_charge",
    "rr_force_mirror",
    "run_ensemble",
    "synthesize",
    "synthesize_ensemble",
    "target_covariance",
    "v2_charge",
    "v2_fdt",
    "v2_fdt_mirror_leading",
    "v2_mirror_exact",
    "v2_mirror_leading",
    "v2_mirror_small_gamma",
]
