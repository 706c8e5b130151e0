"""Langevin dynamics dv/dt + gamma (v - v_ref) = beta(t)/m driven by synthesized vacuum noise.

Velocity is advanced with the exact drag propagator and midpoint-weighted
forcing,

    v_{k+1} - v_ref = (v_k - v_ref) e^{-gamma dt} + (dt/m) e^{-gamma dt/2} beta(t_k + dt/2),

and the displacement by trapezoidal accumulation of v. ``v_ref`` is zero
for a charge and the reference-frame velocity ``v0`` for a mirror.

Ensembles are split into a fixed set of path blocks. Every path draws its
noise from its own seed derived from ``(master_seed, path_index)``, blocks
are processed independently and reduced in block order, so results are
bit-identical for any number of worker threads.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import lfilter

from . import noise
from .params import ParticleParams, derive_constants

MAX_STEP_GAMMA = 0.01
EQUILIBRIUM_GAMMA_T = 10.0
MIN_EQUILIBRIUM_RUN = 20.0
CHUNK_PATHS = 256


class ConfigError(ValueError):
    pass


class StepTooLargeError(ConfigError):
    pass


class InsufficientRangeError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    particle: ParticleParams
    dt: float
    t_end: float
    n_paths: int
    master_seed: int = 0
    record_stride: int = 1
    #: v(0); None means ``particle.v0``
    initial_velocity: float | None = None
    #: standard deviation of a Gaussian spread of v(0) around its mean
    initial_velocity_std: float = 0.0
    oversample: int = noise.DEFAULT_OVERSAMPLE
    n_blocks: int = 20
    require_equilibrium: bool = True

    def __post_init__(self):
        if self.n_paths < 2:
            raise ConfigError("n_paths must be >= 2")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")
        if not (self.dt > 0 and self.t_end > 0):
            raise ConfigError("dt and t_end must be positive")
        if self.n_steps < 1:
            raise ConfigError("t_end must cover at least one step")
        if self.initial_velocity_std < 0:
            raise ConfigError("initial_velocity_std must be non-negative")
        gamma = self.gamma
        if self.dt > MAX_STEP_GAMMA / gamma * (1 + 1e-9):
            raise StepTooLargeError(f"dt={self.dt!r} exceeds {MAX_STEP_GAMMA}/gamma={MAX_STEP_GAMMA / gamma!r}")
        spec_step = noise.max_step(self.spectrum)
        if self.dt > spec_step * (1 + 1e-12):
            raise StepTooLargeError(f"dt={self.dt!r} exceeds pi/(5 omega_max)={spec_step!r}")
        if self.require_equilibrium and self.t_end * gamma < MIN_EQUILIBRIUM_RUN * (1 - 1e-9):
            raise ConfigError(f"t_end must be >= {MIN_EQUILIBRIUM_RUN}/gamma for an equilibrium run")

    @property
    def gamma(self) -> float:
        return derive_constants(self.particle).gamma

    @property
    def spectrum(self) -> noise.SpectralDensity:
        return noise.SpectralDensity.for_particle(self.particle)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def v_init(self) -> float:
        return self.particle.v0 if self.initial_velocity is None else self.initial_velocity

    def noise_grid(self):
        """Frequency grid shared by every path: that of a path sampled at dt/2 over the run."""
        return noise.frequency_grid(self.spectrum, self.dt / 2, 2 * self.n_steps + 1, self.oversample)

    def equilibrium_start(self) -> float:
        return max(0.5 * self.n_steps * self.dt, EQUILIBRIUM_GAMMA_T / self.gamma)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["particle"]["kind"] = self.particle.kind.value
        return d


@dataclass
class Trajectory:
    times: np.ndarray
    v: np.ndarray
    z: np.ndarray


def _propagate(beta_mid, v_init, gamma, m, dt, v_ref):
    """Rows of v and z - z(0) on the step grid for midpoint forces ``beta_mid`` (P x n)."""
    decay = math.exp(-gamma * dt)
    kick = dt / m * math.exp(-0.5 * gamma * dt)
    w0 = np.asarray(v_init, dtype=float) - v_ref
    w = lfilter([1.0], [1.0, -decay], kick * beta_mid, axis=-1, zi=(decay * w0)[:, None])[0]
    v = np.concatenate([w0[:, None], w], axis=1) + v_ref
    dz = np.zeros_like(v)
    np.cumsum(0.5 * dt * (v[:, :-1] + v[:, 1:]), axis=1, out=dz[:, 1:])
    return v, dz


def integrate_trajectory(cfg: SimConfig, path: noise.NoisePath, v0=None, z0=0.0) -> Trajectory:
    """Integrate one trajectory; ``path`` must be sampled at ``cfg.dt / 2``."""
    n = cfg.n_steps
    if not math.isclose(path.dt, cfg.dt / 2, rel_tol=1e-12):
        raise StepTooLargeError(f"noise path spacing {path.dt!r} must be dt/2 = {cfg.dt / 2!r}")
    if len(path) < 2 * n + 1:
        raise ValueError(f"noise path has {len(path)} samples, need {2 * n + 1}")
    v0 = cfg.v_init if v0 is None else v0
    beta_mid = path.samples[1 : 2 * n : 2][None, :]
    v, dz = _propagate(beta_mid, np.array([v0]), cfg.gamma, cfg.particle.mass, cfg.dt, cfg.particle.reference_velocity)
    return Trajectory(np.arange(n + 1) * cfg.dt, v[0], z0 + dz[0])


@dataclass
class Equilibrium:
    mean_v: float
    se_v: float
    mean_v2: float
    se_v2: float
    t_start: float


@dataclass
class EnsembleStats:
    times: np.ndarray
    mean_v: np.ndarray
    se_v: np.ndarray
    mean_v2: np.ndarray
    se_v2: np.ndarray
    mean_z2: np.ndarray
    se_z2: np.ndarray
    n_paths: int
    z2_0: float
    #: per-block mean curves (n_blocks x len(times)) for windowed functionals
    block_v2: np.ndarray = field(repr=False)
    block_z2: np.ndarray = field(repr=False)
    #: per-path averages of v and v^2 over the equilibrium window
    tail_v: np.ndarray = field(repr=False)
    tail_v2: np.ndarray = field(repr=False)
    equilibrium_start: float = float("nan")

    def equilibrium(self) -> Equilibrium:
        """Tail-averaged <v> and <v^2> with path-to-path standard errors."""
        if not np.all(np.isfinite(self.tail_v2)):
            raise InsufficientRangeError("run too short for an equilibrium window")
        n = self.tail_v.size
        return Equilibrium(
            mean_v=float(self.tail_v.mean()),
            se_v=float(self.tail_v.std(ddof=1) / math.sqrt(n)),
            mean_v2=float(self.tail_v2.mean()),
            se_v2=float(self.tail_v2.std(ddof=1) / math.sqrt(n)),
            t_start=self.equilibrium_start,
        )

    def columns(self) -> dict:
        return {
            "t": self.times,
            "mean_v": self.mean_v,
            "se_v": self.se_v,
            "mean_v2": self.mean_v2,
            "se_v2": self.se_v2,
            "mean_z2": self.mean_z2,
            "se_z2": self.se_z2,
        }

    def to_csv(self, path):
        cols = self.columns()
        names = list(cols)
        with open(path, "w", newline="") as fh:
            fh.write(",".join(names) + "\n")
            for row in zip(*cols.values()):
                fh.write(",".join(f"{x:.12g}" for x in row) + "\n")

    def to_dict(self) -> dict:
        def r(x):
            return float(f"{x:.12g}")

        out = {k: [r(x) for x in v] for k, v in self.columns().items()}
        out["n_paths"] = self.n_paths
        out["z2_0"] = r(self.z2_0)
        try:
            eq = self.equilibrium()
            out["equilibrium"] = {k: r(v) for k, v in asdict(eq).items()}
        except InsufficientRangeError:
            out["equilibrium"] = None
        return out

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


def _run_block(cfg: SimConfig, indices, tables, record, window):
    """Sums over one block of paths; a pure function of (cfg, indices)."""
    omegas, amp, cos_t, sin_t = tables
    gamma, m, dt = cfg.gamma, cfg.particle.mass, cfg.dt
    T = record.size
    sums = {k: np.zeros(T) for k in ("v", "v2", "v4", "z2", "z4")}
    tail_v, tail_v2 = [], []
    for start in range(0, len(indices), CHUNK_PATHS):
        chunk = indices[start : start + CHUNK_PATHS]
        a = np.empty((len(chunk), omegas.size))
        b = np.empty_like(a)
        v_init = np.full(len(chunk), cfg.v_init)
        for row, i in enumerate(chunk):
            a[row], b[row], rng = noise.draw_modes(noise.path_seed(cfg.master_seed, int(i)), omegas.size)
            if cfg.initial_velocity_std > 0:
                v_init[row] += cfg.initial_velocity_std * rng.standard_normal()
        beta_mid = (a * amp) @ cos_t + (b * amp) @ sin_t
        v, dz = _propagate(beta_mid, v_init, gamma, m, dt, cfg.particle.reference_velocity)
        v = v[:, record]
        v2 = v * v
        z2 = dz[:, record] ** 2
        sums["v"] += v.sum(axis=0)
        sums["v2"] += v2.sum(axis=0)
        sums["v4"] += (v2 * v2).sum(axis=0)
        sums["z2"] += z2.sum(axis=0)
        sums["z4"] += (z2 * z2).sum(axis=0)
        if window.any():
            tail_v.append(v[:, window].mean(axis=1))
            tail_v2.append(v2[:, window].mean(axis=1))
        else:
            tail_v.append(np.full(len(chunk), np.nan))
            tail_v2.append(np.full(len(chunk), np.nan))
    return sums, np.concatenate(tail_v), np.concatenate(tail_v2)


def run_ensemble(cfg: SimConfig, threads=None) -> EnsembleStats:
    """Simulate ``cfg.n_paths`` independent trajectories and pool their statistics."""
    n = cfg.n_steps
    omegas, dw = cfg.noise_grid()
    amp = noise.mode_amplitudes(cfg.spectrum, omegas, dw)
    mid = (np.arange(n) + 0.5) * cfg.dt
    phase = np.outer(omegas, mid)
    tables = (omegas, amp, np.cos(phase), np.sin(phase))
    del phase

    record = np.arange(0, n + 1, cfg.record_stride)
    times = record * cfg.dt
    t_eq = cfg.equilibrium_start()
    window = times >= t_eq * (1 - 1e-12)

    P = cfg.n_paths
    blocks = np.array_split(np.arange(P), min(cfg.n_blocks, P))
    threads = threads or os.cpu_count() or 1
    if threads == 1:
        results = [_run_block(cfg, blk, tables, record, window) for blk in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda blk: _run_block(cfg, blk, tables, record, window), blocks))

    total = {k: np.zeros(record.size) for k in results[0][0]}
    for sums, _, _ in results:
        for k in total:
            total[k] += sums[k]
    sizes = np.array([blk.size for blk in blocks], dtype=float)

    def mean_se(s1, s2):
        mean = s1 / P
        var = np.maximum(s2 - s1 * mean, 0.0) / (P - 1)
        return mean, np.sqrt(var / P)

    mean_v, se_v = mean_se(total["v"], total["v2"])
    mean_v2, se_v2 = mean_se(total["v2"], total["v4"])
    mean_dz2, se_z2 = mean_se(total["z2"], total["z4"])
    z2_0 = cfg.particle.z2_0
    return EnsembleStats(
        times=times,
        mean_v=mean_v,
        se_v=se_v,
        mean_v2=mean_v2,
        se_v2=se_v2,
        mean_z2=mean_dz2 + z2_0,
        se_z2=se_z2,
        n_paths=P,
        z2_0=z2_0,
        block_v2=np.array([r[0]["v2"] for r in results]) / sizes[:, None],
        block_z2=np.array([r[0]["z2"] for r in results]) / sizes[:, None] + z2_0,
        tail_v=np.concatenate([r[1] for r in results]),
        tail_v2=np.concatenate([r[2] for r in results]),
        equilibrium_start=t_eq,
    )


@dataclass
class RegimeFit:
    """Ballistic t^2 coefficient and diffusive slope of <z^2(t)>."""

    ballistic: float
    se_ballistic: float
    diffusive: float
    se_diffusive: float
    intercept: float
    n_ballistic: int
    n_diffusive: int


def _lstsq_operator(X):
    # rows of the returned matrix map data to coefficients
    return np.linalg.pinv(X)


def fit_regimes(stats: EnsembleStats, gamma, ballistic_max=0.1, diffusive_min=20.0, ballistic_terms=3) -> RegimeFit:
    """Fit <z^2> - z2_0 to A t^2 (+ higher powers) for gamma t <= ballistic_max
    and to B t + c for gamma t >= diffusive_min.

    The ballistic model carries ``ballistic_terms`` powers t^2, t^3, ... so
    that curvature inside the window does not bias A. Standard errors come
    from the scatter of the same fits over independent path blocks.
    """
    t = stats.times
    gt = gamma * t
    bal = (gt > 0) & (gt <= ballistic_max * (1 + 1e-12))
    dif = gt >= diffusive_min * (1 - 1e-12)
    if bal.sum() < ballistic_terms + 1 or dif.sum() < 3:
        raise InsufficientRangeError(
            f"need gamma t to span <= {ballistic_max} and >= {diffusive_min}; "
            f"got {bal.sum()} ballistic and {dif.sum()} diffusive samples"
        )
    tb = t[bal]
    scale = tb.max()
    Xb = np.column_stack([(tb / scale) ** (2 + j) for j in range(ballistic_terms)])
    Ob = _lstsq_operator(Xb)[0] / scale**2
    td = t[dif]
    Xd = np.column_stack([td, np.ones_like(td)])
    Od = _lstsq_operator(Xd)

    y = stats.mean_z2 - stats.z2_0
    blocks = stats.block_z2 - stats.z2_0
    A = float(Ob @ y[bal])
    B, c = (float(x) for x in Od @ y[dif])
    A_blk = blocks[:, bal] @ Ob
    B_blk = blocks[:, dif] @ Od[0]
    G = blocks.shape[0]
    root = math.sqrt(G)
    se_A = float(A_blk.std(ddof=1) / root) if G > 1 else float("nan")
    se_B = float(B_blk.std(ddof=1) / root) if G > 1 else float("nan")
    return RegimeFit(A, se_A, B, se_B, c, int(bal.sum()), int(dif.sum()))
