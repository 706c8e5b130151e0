"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import analytic, noise, quadrature
from .langevin import ConfigError, InsufficientRangeError, SimConfig, fit_regimes, run_ensemble
from .params import InvalidParameterError, Kind, ParticleParams, derive_constants, estimate_si

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

CHARGE_KEYS = {"q", "m", "gamma", "lambda", "v0", "z2-0"}
MIRROR_KEYS = {"omega-p", "m", "gamma-ratio", "v0", "z2-0"}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{x:.12g}"
    return str(x)


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(f"{obj:.12g}") if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def emit(report: dict, as_json: bool):
    if as_json:
        print(json.dumps(_round(report), indent=1))
        return

    def walk(d, indent=""):
        for k, v in d.items():
            if isinstance(v, dict):
                print(f"{indent}{k}:")
                walk(v, indent + "  ")
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                print(f"{indent}{k}:")
                for item in v:
                    print(indent + "  - " + ", ".join(f"{kk}={fmt(vv)}" for kk, vv in item.items()))
            elif isinstance(v, list):
                print(f"{indent}{k}: " + " ".join(fmt(x) for x in v))
            else:
                print(f"{indent}{k}: {fmt(v)}")

    walk(report)


# -- particle parsing ---------------------------------------------------------


def _parse_pairs(items, allowed):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"expected KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip().replace("_", "-")
        if key not in allowed:
            raise UsageError(f"unknown key {key!r}; allowed: {', '.join(sorted(allowed))}")
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"{key} must be a number, got {value!r}") from None
    return out


def build_particle(kind, values) -> ParticleParams:
    v0 = values.get("v0", 0.0)
    z2_0 = values.get("z2-0", 0.0)
    if kind == "charge":
        if "m" not in values:
            raise UsageError("charge needs the mass m")
        cutoff = values.get("lambda")
        if "q" in values:
            return ParticleParams.charge(values["q"], values["m"], cutoff=cutoff, v0=v0, z2_0=z2_0)
        if "gamma" in values:
            return ParticleParams.charge_from_gamma(values["gamma"], values["m"], cutoff=cutoff, v0=v0, z2_0=z2_0)
        raise UsageError("charge needs q or gamma")
    if "gamma-ratio" in values:
        if "m" in values:
            raise UsageError("give either gamma-ratio or m for a mirror, not both")
        return ParticleParams.mirror_from_ratio(values["gamma-ratio"], values.get("omega-p", 1.0), v0=v0, z2_0=z2_0)
    if "m" not in values:
        raise UsageError("mirror needs the mass m (or gamma-ratio)")
    if "omega-p" not in values:
        raise UsageError("mirror needs omega-p")
    return ParticleParams.mirror(values["omega-p"], values["m"], v0=v0, z2_0=z2_0)


def particle_from_args(args, required=True) -> ParticleParams | None:
    if args.charge is not None and args.mirror is not None:
        raise UsageError("choose one of --charge / --mirror")
    if args.charge is not None:
        return build_particle("charge", _parse_pairs(args.charge, CHARGE_KEYS))
    if args.mirror is not None:
        return build_particle("mirror", _parse_pairs(args.mirror, MIRROR_KEYS))
    if required:
        raise UsageError("a particle is required: --charge KEY=VAL ... or --mirror KEY=VAL ...")
    return None


def apply_config(args):
    """Overlay a flat JSON config (keys mirror the flag names) onto ``args``."""
    if not getattr(args, "config", None):
        return
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    kind = cfg.pop("kind", None)
    particle_keys = {k: cfg.pop(k) for k in list(cfg) if k in CHARGE_KEYS | MIRROR_KEYS}
    if kind is not None:
        if kind not in ("charge", "mirror"):
            raise UsageError(f"config kind must be charge or mirror, got {kind!r}")
        pairs = [f"{k}={v}" for k, v in particle_keys.items()]
        args.charge, args.mirror = (pairs, None) if kind == "charge" else (None, pairs)
    elif particle_keys:
        raise UsageError("config gives particle keys without kind")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r}")
        setattr(args, attr, value)


# -- subcommands ----------------------------------------------------------------


def _particle_summary(p: ParticleParams) -> dict:
    d = derive_constants(p)
    out = {"kind": p.kind.value, "m": p.mass, "gamma": d.gamma, "relaxation_time": d.relaxation_time}
    if p.is_charge:
        out.update(q=p.coupling, cutoff=p.effective_cutoff)
    else:
        out.update(omega_p=p.coupling, gamma_ratio=d.gamma_ratio)
    return out


def _v2_forms(p: ParticleParams) -> dict:
    d = derive_constants(p)
    if p.is_charge:
        return {
            "langevin": analytic.v2_charge(d.gamma, p.mass, p.effective_cutoff),
            "fdt": analytic.v2_fdt(d.gamma, p.mass, p.effective_cutoff),
        }
    G = d.gamma_ratio
    return {
        "exact_printed": analytic.v2_mirror_exact(G, form="printed"),
        "exact_derived": analytic.v2_mirror_exact(G, form="derived"),
        "leading_small_ratio": analytic.v2_mirror_leading(G),
        "gamma_over_4pi_m": analytic.v2_mirror_small_gamma(d.gamma, p.mass),
        "fdt": analytic.v2_fdt(d.gamma, p.mass, p.coupling),
        "fdt_leading": analytic.v2_fdt_mirror_leading(d.gamma, p.mass, G),
        "small_ratio_valid": d.small_ratio_valid,
    }


def _v2_eq(p: ParticleParams) -> float:
    """Equilibrium <v^2> the Langevin dynamics should reach."""
    d = derive_constants(p)
    if p.is_charge:
        return analytic.v2_charge(d.gamma, p.mass, p.effective_cutoff)
    return analytic.v2_mirror_exact(d.gamma_ratio, form="derived")


def cmd_analytic(args) -> int:
    p = particle_from_args(args)
    d = derive_constants(p)
    v2 = _v2_eq(p)
    curve = analytic.MsdCurve(d.gamma, v2, p.z2_0)
    gt = np.array([0.0, 0.01, 0.1, 1.0, 10.0, 100.0])
    wg = np.array([0.0, 0.5, 1.0, 2.0, 10.0])
    re, im = analytic.fdt_susceptibility(wg * d.gamma, d.gamma, p.mass)
    report = {
        "particle": _particle_summary(p),
        "v2": _v2_forms(p),
        "msd": [{"t": t, "z2": curve(t)} for t in gt / d.gamma],
        "susceptibility": [{"omega": w, "alpha_re": a, "alpha_im": b} for w, a, b in zip(wg * d.gamma, re, im)],
    }
    emit(report, args.json)
    return EXIT_OK


def cmd_quadrature(args) -> int:
    p = particle_from_args(args)
    d = derive_constants(p)
    if p.is_charge:
        r = quadrature.v2_charge_quad(d.gamma, p.mass, p.effective_cutoff)
        closed = analytic.v2_charge(d.gamma, p.mass, p.effective_cutoff)
        report = {
            "particle": _particle_summary(p),
            "quad": {"value": r.value, "abs_error": r.abs_error_estimate, "evaluations": r.evaluations},
            "closed_form": closed,
            "rel_diff": abs(closed / r.value - 1),
        }
    else:
        mq = quadrature.v2_mirror_quad(d.gamma, p.mass, p.coupling)
        printed = analytic.v2_mirror_exact(d.gamma_ratio, "printed")
        derived = analytic.v2_mirror_exact(d.gamma_ratio, "derived")
        report = {
            "particle": _particle_summary(p),
            "double_integral": {
                "value": mq.double.value,
                "abs_error": mq.double.abs_error_estimate,
                "evaluations": mq.double.evaluations,
            },
            "spectrum_route": {
                "value": mq.spectral.value,
                "abs_error": mq.spectral.abs_error_estimate,
                "evaluations": mq.spectral.evaluations,
            },
            "exact_printed": printed,
            "exact_printed_rel_diff": abs(printed / mq.value - 1),
            "exact_derived": derived,
            "exact_derived_rel_diff": abs(derived / mq.value - 1),
        }
    emit(report, args.json)
    return EXIT_OK


def cmd_noise_check(args) -> int:
    p = particle_from_args(args)
    s = noise.SpectralDensity.for_particle(p)
    dt = args.dt or noise.max_step(s)
    paths = noise.synthesize_ensemble(s, dt, args.n_samples, args.seed, args.n_paths)
    cov = noise.check_covariance(s, paths)
    kurt, kurt_se = noise.excess_kurtosis(paths)
    mass = quadrature.integrate_1d(s, 0.0, s.omega_max, points=s.kinks).value
    mass_rel = abs(mass / s.total_mass - 1)
    kurt_ok = abs(kurt) <= 5 * kurt_se
    ok = cov.passed and kurt_ok and mass_rel <= 1e-10
    report = {
        "spectrum": s.kind,
        "omega_max": s.omega_max,
        "dt": dt,
        "n_paths": args.n_paths,
        "covariance": [
            {"tau": t, "empirical": e, "stderr": se, "target": g, "z": z}
            for t, e, se, g, z in zip(cov.taus, cov.empirical, cov.stderr, cov.target, cov.z_scores)
        ],
        "max_z": float(cov.z_scores.max()),
        "excess_kurtosis": kurt,
        "excess_kurtosis_se": kurt_se,
        "spectral_mass_rel_error": mass_rel,
        "passed": ok,
    }
    emit(report, args.json)
    return EXIT_OK if ok else EXIT_VERIFY


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def sim_config_from_args(args) -> SimConfig:
    p = particle_from_args(args)
    if args.v0 is not None:
        p = dataclasses.replace(p, v0=float(args.v0))
    if args.z2_0 is not None:
        p = dataclasses.replace(p, z2_0=float(args.z2_0))
    d = derive_constants(p)
    s = noise.SpectralDensity.for_particle(p)
    dt = args.dt or min(0.01 / d.gamma, noise.max_step(s))
    t_end = args.t_end or 30.0 / d.gamma
    return SimConfig(
        particle=p,
        dt=float(dt),
        t_end=float(t_end),
        n_paths=int(args.n_paths),
        master_seed=int(args.seed),
        record_stride=int(args.record_stride),
        initial_velocity=None if args.initial_velocity is None else float(args.initial_velocity),
        initial_velocity_std=float(args.initial_velocity_std),
    )


def cmd_simulate(args) -> int:
    start = time.perf_counter()
    cfg = sim_config_from_args(args)
    stats = run_ensemble(cfg, threads=args.threads)
    eq = stats.equilibrium()
    p = cfg.particle
    target = _v2_eq(p)
    v_ref = p.reference_velocity
    report = {
        "particle": _particle_summary(p),
        "n_paths": cfg.n_paths,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "seed": cfg.master_seed,
        "equilibrium": {
            "t_start": eq.t_start,
            "mean_v": eq.mean_v,
            "se_v": eq.se_v,
            "expected_v": v_ref,
            "mean_v2": eq.mean_v2,
            "se_v2": eq.se_v2,
            "analytic_v2": target,
            "ratio": eq.mean_v2 / target,
            "ratio_se": eq.se_v2 / target,
            "z_score": (eq.mean_v2 - target) / eq.se_v2,
        },
    }
    try:
        fit = fit_regimes(stats, cfg.gamma)
        report["regimes"] = {
            "ballistic": fit.ballistic,
            "se_ballistic": fit.se_ballistic,
            "expected_ballistic": cfg.v_init**2 + cfg.initial_velocity_std**2,
            "diffusive": fit.diffusive,
            "se_diffusive": fit.se_diffusive,
            "white_noise_diffusive": 2 * target / cfg.gamma,
        }
    except InsufficientRangeError:
        pass
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stats.to_csv(out / "stats.csv")
        stats.to_json(out / "stats.json")
        manifest = {
            "subcommand": "simulate",
            "params": _round(cfg.as_dict()),
            "seed": cfg.master_seed,
            "outputs": [{"path": name, "sha": _sha256(out / name)} for name in ("stats.csv", "stats.json")],
            "duration_s": round(time.perf_counter() - start, 3),
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
        report["outputs"] = manifest["outputs"]
    emit(report, args.json)
    return EXIT_OK


def cmd_fdt(args) -> int:
    p = particle_from_args(args)
    d = derive_constants(p)
    cutoff = p.effective_cutoff
    wg = np.linspace(0.0, cutoff / d.gamma, 9)
    re, im = analytic.fdt_susceptibility(wg * d.gamma, d.gamma, p.mass)
    fdt = analytic.v2_fdt(d.gamma, p.mass, cutoff)
    langevin = _v2_eq(p)
    alpha_int = quadrature.integrate_1d(
        lambda w: analytic.fdt_susceptibility(w, d.gamma, p.mass)[1] / math.pi, 0.0, cutoff
    ).value
    report = {
        "particle": _particle_summary(p),
        "cutoff": cutoff,
        "susceptibility": [{"omega": w, "alpha_re": a, "alpha_im": b} for w, a, b in zip(wg * d.gamma, re, im)],
        "v2_fdt": fdt,
        "v2_fdt_quadrature": alpha_int,
        "v2_langevin": langevin,
        "ratio_fdt_to_langevin": fdt / langevin,
    }
    if not p.is_charge:
        report["ratio_over_log_inverse_ratio"] = fdt / langevin / math.log(1.0 / d.gamma_ratio)
    emit(report, args.json)
    return EXIT_OK


def cmd_estimate_si(args) -> int:
    if args.omega_p is not None and args.q is not None:
        raise UsageError("give --omega-p (mirror) or --q (charge), not both")
    if args.omega_p is not None:
        p = ParticleParams(Kind.MIRROR, args.mass, args.omega_p)
    elif args.q is not None:
        p = ParticleParams(Kind.CHARGE, args.mass, args.q)
    else:
        raise UsageError("estimate-si needs --omega-p or --q")
    est = estimate_si(p, args.distance)
    report = {
        "kind": est.kind.value,
        "mass_kg": est.mass_kg,
        "relaxation_time_s": est.relaxation_time_s,
        "diffusion_time_s": est.diffusion_time_s,
        "distance_m": est.distance_m,
        "orders_of_magnitude": est.orders(),
        "illustrative_only": est.illustrative,
    }
    if est.gamma_ratio is not None:
        report["gamma_ratio"] = est.gamma_ratio
    emit(report, args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_oracle_suite

    verdict = run_oracle_suite(
        perturb_exact=args.perturb_exact, mirror_form=args.mirror_form, seed=args.seed, threads=args.threads
    )
    if args.json:
        print(json.dumps(_round(verdict), indent=1))
    else:
        for c in verdict["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            print(f"[{mark}] {c['name']}: metric={fmt(c['metric'])} tol={fmt(c['tolerance'])}")
        if verdict["worst"]:
            print(f"worst offender: {verdict['worst']}")
        print("all identities passed" if verdict["passed"] else "verification FAILED")
    return EXIT_OK if verdict["passed"] else EXIT_VERIFY


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vacuum-brownian", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat JSON config; overrides flags")
    common.add_argument("--seed", type=int, default=0, help="master seed (U64)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", metavar="DIR", help="directory for output files")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    particle = argparse.ArgumentParser(add_help=False)
    particle.add_argument("--charge", nargs="*", metavar="KEY=VAL", help="q, m, gamma, lambda, v0, z2-0")
    particle.add_argument("--mirror", nargs="*", metavar="KEY=VAL", help="omega-p, m, gamma-ratio, v0, z2-0")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common, particle], help="closed-form values").set_defaults(func=cmd_analytic)
    sub.add_parser("quadrature", parents=[common, particle], help="brute-force oracle").set_defaults(
        func=cmd_quadrature
    )
    nc = sub.add_parser("noise-check", parents=[common, particle], help="validate synthesized noise")
    nc.add_argument("--n-paths", type=int, default=200)
    nc.add_argument("--n-samples", type=int, default=4096)
    nc.add_argument("--dt", type=float)
    nc.set_defaults(func=cmd_noise_check)
    sim = sub.add_parser("simulate", parents=[common, particle], help="Langevin ensemble")
    sim.add_argument("--dt", type=float)
    sim.add_argument("--t-end", type=float)
    sim.add_argument("--n-paths", type=int, default=2000)
    sim.add_argument("--record-stride", type=int, default=1)
    sim.add_argument("--initial-velocity", type=float)
    sim.add_argument("--initial-velocity-std", type=float, default=0.0)
    sim.add_argument("--v0", type=float, help="mirror reference velocity, or charge v(0)")
    sim.add_argument("--z2-0", type=float, help="initial position variance added to <z^2>")
    sim.set_defaults(func=cmd_simulate)
    sub.add_parser("fdt", parents=[common, particle], help="FDT comparison").set_defaults(func=cmd_fdt)
    si = sub.add_parser("estimate-si", parents=[common], help="SI order-of-magnitude estimates")
    si.add_argument("--mass", type=float, required=True, help="kg")
    si.add_argument("--omega-p", type=float, help="plasma frequency, s^-1")
    si.add_argument("--q", type=float, help="charge strength as a frequency, s^-1")
    si.add_argument("--distance", type=float, default=1e-2, help="m")
    si.set_defaults(func=cmd_estimate_si)
    ver = sub.add_parser("verify", parents=[common], help="run the oracle suite")
    ver.add_argument("--perturb-exact", type=float, default=0.0, help="relative fault injected into the mirror closed form")
    ver.add_argument("--mirror-form", choices=analytic.MIRROR_FORMS, default="printed")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    usage_parser = parser._subparsers._group_actions[0].choices[args.command]
    try:
        apply_config(args)
        return args.func(args)
    except (UsageError, InvalidParameterError, ConfigError, noise.InvalidStepError, noise.InvalidGridError) as exc:
        usage_parser.print_usage(sys.stderr)
        print(f"{usage_parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (quadrature.QuadratureError, quadrature.InconsistencyError, InsufficientRangeError, FloatingPointError) as exc:
        print(f"{parser.prog} {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
