"""Stationary Gaussian realisations of the vacuum force beta(t).

Both noise spectra are one-sided, S(w) >= 0 on a bounded support, with
covariance C(tau) = int S(w) cos(w tau) dw:

* charge: S(w) = (q^2 / 2pi) w on [0, cutoff];
* mirror: S(W) = g(W) / (2 pi^2) on [0, 2 omega_p], where g(W) is the
  density of w w' along the line w + w' = W inside [0, omega_p]^2.

Paths are built by harmonic superposition with Gaussian amplitudes,
beta(t) = sum_k sqrt(S(w_k) dw) [a_k cos(w_k t) + b_k sin(w_k t)], so every
finite-dimensional marginal is exactly Gaussian.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature

DEFAULT_OVERSAMPLE = 4
MAX_MODES = 2**18
#: shortest spectral period must span at least 10 samples
STEP_FACTOR = math.pi / 5.0


class InvalidStepError(ValueError):
    pass


class InvalidGridError(ValueError):
    pass


class MismatchedPathsError(ValueError):
    pass


def mirror_g(omega, omega_p):
    """g(W) = int int w w' delta(w + w' - W) over [0, omega_p]^2."""
    W = np.asarray(omega, dtype=float)
    wp = omega_p
    low = W**3 / 6.0
    d = W - wp
    high = W * wp**2 / 2.0 - wp**3 / 3.0 - W * d**2 / 2.0 + d**3 / 3.0
    out = np.where(W <= wp, low, high)
    out = np.where((W < 0) | (W > 2 * wp), 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralDensity:
    """One-sided force spectrum. ``kind`` is "charge" or "mirror"."""

    kind: str
    q: float = 0.0
    cutoff: float = 0.0
    omega_p: float = 0.0

    def __post_init__(self):
        if self.kind == "charge":
            if self.q < 0 or not self.cutoff > 0:
                raise ValueError("charge spectrum needs q >= 0 and cutoff > 0")
        elif self.kind == "mirror":
            if not self.omega_p > 0:
                raise ValueError("mirror spectrum needs omega_p > 0")
        else:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")

    @classmethod
    def charge_ohmic(cls, q, cutoff):
        return cls("charge", q=q, cutoff=cutoff)

    @classmethod
    def mirror_piecewise(cls, omega_p):
        return cls("mirror", omega_p=omega_p)

    @classmethod
    def for_particle(cls, p):
        if p.is_charge:
            return cls.charge_ohmic(p.coupling, p.effective_cutoff)
        return cls.mirror_piecewise(p.coupling)

    @property
    def omega_max(self) -> float:
        return self.cutoff if self.kind == "charge" else 2.0 * self.omega_p

    @property
    def kinks(self):
        return [self.omega_p] if self.kind == "mirror" else None

    @property
    def total_mass(self) -> float:
        """C(0) in closed form."""
        if self.kind == "charge":
            return self.q**2 / (2 * math.pi) * self.cutoff**2 / 2.0
        return self.omega_p**4 / (8.0 * math.pi**2)

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        if self.kind == "charge":
            out = np.where((omega >= 0) & (omega <= self.cutoff), self.q**2 / (2 * math.pi) * omega, 0.0)
        else:
            out = np.asarray(mirror_g(omega, self.omega_p)) / (2.0 * math.pi**2)
        return float(out) if out.ndim == 0 else out


def eval_spectrum(s: SpectralDensity, omega):
    return s(omega)


def target_covariance(s: SpectralDensity, tau, tol=None) -> float:
    """C(tau) = int_support S(w) cos(w tau) dw by adaptive quadrature."""
    r = quadrature.integrate_1d(lambda w: s(w) * math.cos(w * tau), 0.0, s.omega_max, tol=tol, points=s.kinks)
    return r.value


def max_step(s: SpectralDensity) -> float:
    return STEP_FACTOR / s.omega_max


def frequency_grid(s: SpectralDensity, dt, n, oversample=DEFAULT_OVERSAMPLE):
    """Midpoint frequency grid on the support with spacing <= 2pi / (oversample n dt).

    The number of modes is even so that the mirror's kink at omega_p falls
    on a cell boundary.
    """
    if n < 2:
        raise InvalidGridError("need at least 2 samples")
    if dt <= 0 or dt > max_step(s) * (1 + 1e-12):
        raise InvalidStepError(f"dt={dt!r} exceeds pi/(5 omega_max)={max_step(s)!r}")
    target = 2.0 * math.pi / (oversample * n * dt)
    K = math.ceil(s.omega_max / target)
    K += K % 2
    if K > MAX_MODES:
        raise InvalidGridError(f"{K} modes needed, limit is {MAX_MODES}; shorten the path or coarsen dt")
    dw = s.omega_max / K
    omegas = (np.arange(K) + 0.5) * dw
    return omegas, dw


def mode_amplitudes(s: SpectralDensity, omegas, dw):
    return np.sqrt(np.maximum(s(omegas), 0.0) * dw)


def path_seed(master_seed, index) -> int:
    """Independent 64-bit seed for path ``index`` of an ensemble."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def draw_modes(seed, n_modes):
    """(a, b, rng): mode coefficients for one path; rng continues the same stream."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n_modes)
    b = rng.standard_normal(n_modes)
    return a, b, rng


def harmonic_sum(coef_cos, coef_sin, omegas, times):
    """Rows of sum_k c_k cos(w_k t) + s_k sin(w_k t) evaluated at ``times``.

    ``coef_*`` are (P, K) already scaled by the mode amplitudes.
    """
    phase = np.outer(times, omegas)
    return coef_cos @ np.cos(phase).T + coef_sin @ np.sin(phase).T


@dataclass
class NoisePath:
    dt: float
    samples: np.ndarray
    seed: int | None
    spectrum: SpectralDensity | None = field(default=None, repr=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ValueError("a noise path needs at least 2 samples")

    def __len__(self):
        return self.samples.size

    @property
    def times(self):
        return np.arange(self.samples.size) * self.dt

    def reversed(self) -> NoisePath:
        return NoisePath(self.dt, self.samples[::-1].copy(), self.seed, self.spectrum)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "beta"])
            for t, b in zip(self.times, self.samples):
                w.writerow([f"{t:.12g}", f"{b:.12g}"])

    def save(self, path):
        np.savez(path, dt=self.dt, samples=self.samples, seed=-1 if self.seed is None else self.seed)

    @classmethod
    def zeros(cls, dt, n):
        return cls(dt, np.zeros(n), None, None)


def synthesize(s: SpectralDensity, dt, n, seed, oversample=DEFAULT_OVERSAMPLE) -> NoisePath:
    """One stationary Gaussian path of ``n`` samples spaced by ``dt``."""
    omegas, dw = frequency_grid(s, dt, n, oversample)
    amp = mode_amplitudes(s, omegas, dw)
    a, b, _ = draw_modes(seed, omegas.size)
    samples = harmonic_sum((amp * a)[None, :], (amp * b)[None, :], omegas, np.arange(n) * dt)[0]
    return NoisePath(dt, samples, seed, s)


def synthesize_ensemble(s, dt, n, master_seed, n_paths, oversample=DEFAULT_OVERSAMPLE):
    """``n_paths`` independent paths, path i seeded by ``path_seed(master_seed, i)``.

    Path i equals ``synthesize(s, dt, n, path_seed(master_seed, i))`` up to
    rounding; the trigonometric tables are shared across paths.
    """
    omegas, dw = frequency_grid(s, dt, n, oversample)
    amp = mode_amplitudes(s, omegas, dw)
    phase = np.outer(np.arange(n) * dt, omegas)
    cos_t, sin_t = np.cos(phase).T, np.sin(phase).T
    seeds = [path_seed(master_seed, i) for i in range(n_paths)]
    out = []
    for start in range(0, n_paths, 64):
        chunk = seeds[start : start + 64]
        modes = [draw_modes(seed, omegas.size)[:2] for seed in chunk]
        ca = np.array([amp * a for a, _ in modes])
        cb = np.array([amp * b for _, b in modes])
        rows = ca @ cos_t + cb @ sin_t
        out.extend(NoisePath(dt, row, seed, s) for row, seed in zip(rows, chunk))
    return out


def _check_paths(paths):
    if not paths:
        raise MismatchedPathsError("no paths given")
    first = paths[0]
    for p in paths[1:]:
        if p.dt != first.dt or len(p) != len(first) or p.spectrum != first.spectrum:
            raise MismatchedPathsError("paths differ in dt, length or spectrum")


def _lag_products(x, lag):
    return x[: x.size - lag] * x[lag:] if lag else x * x


def empirical_covariance(paths, lag):
    """Cross-path estimate of E[beta(t) beta(t + lag dt)] and its standard error.

    Each path contributes its time-averaged lagged product; the standard
    error comes from the path-to-path scatter. Sums are exactly rounded, so
    the estimate is invariant under time reversal of every path.
    """
    _check_paths(paths)
    n = len(paths[0])
    if not 0 <= lag < n:
        raise ValueError(f"lag must be in [0, {n})")
    per_path = np.array([math.fsum(_lag_products(p.samples, lag)) / (n - lag) for p in paths])
    est = math.fsum(per_path) / per_path.size
    se = float(np.std(per_path, ddof=1) / math.sqrt(per_path.size)) if per_path.size > 1 else float("nan")
    return est, se


def excess_kurtosis(paths):
    """Pooled excess kurtosis with a delete-one-path jackknife standard error."""
    _check_paths(paths)
    x = np.array([p.samples for p in paths])
    m2 = np.mean(x**2, axis=1)
    m4 = np.mean(x**4, axis=1)

    def kurt(m2s, m4s):
        return m4s.mean() / m2s.mean() ** 2 - 3.0

    full = kurt(m2, m4)
    P = x.shape[0]
    s2, s4 = m2.sum(), m4.sum()
    loo = (s4 - m4) / (P - 1) / ((s2 - m2) / (P - 1)) ** 2 - 3.0
    se = math.sqrt((P - 1) / P * np.sum((loo - loo.mean()) ** 2))
    return float(full), se


@dataclass(frozen=True)
class CovarianceCheck:
    lags: np.ndarray
    taus: np.ndarray
    empirical: np.ndarray
    stderr: np.ndarray
    target: np.ndarray

    @property
    def z_scores(self):
        return np.abs(self.empirical - self.target) / self.stderr

    @property
    def passed(self) -> bool:
        return bool(np.all(self.z_scores <= 3.0))


def check_covariance(s, paths, max_tau=None) -> CovarianceCheck:
    """Compare empirical and target covariance at every lag up to ``max_tau`` (default 10/omega_max)."""
    _check_paths(paths)
    dt = paths[0].dt
    if max_tau is None:
        max_tau = 10.0 / s.omega_max
    lags = np.arange(int(math.floor(max_tau / dt + 1e-9)) + 1)
    emp, se = zip(*(empirical_covariance(paths, int(k)) for k in lags))
    target = np.array([target_covariance(s, k * dt) for k in lags])
    return CovarianceCheck(lags, lags * dt, np.array(emp), np.array(se), target)
