"""Unified command-line entry point.

Every run reads a JSON configuration (built-in defaults, optionally merged
with a user file and ``--set`` dot-path overrides), executes one
subcommand, and writes its artifacts plus a manifest recording the config
hash, seed and tool version. Exit codes: 0 success, 2 config error,
3 physics domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, estimation, locksim, nopo, spectra
from .model import (
    ConfigError,
    NumericalError,
    PhysicsDomainError,
    SystemConfig,
    complex_to_pair,
    config_from_dict,
    validate_frequency_plan,
)

DEFAULT_CONFIG: dict = {
    "frequency_plan": {
        "lambda_s": 1064e-9,
        "lambda_i": 852e-9,
        "lambda_p": 473e-9,
        "omega_cl_offset": 3e6,
    },
    "cavity": {"gamma_in": 2e6, "gamma_out": 12e6, "mu": 1e6, "delta": 0.0},
    "pump": {"epsilon": 0.8, "phi_p": 0.0},
    "seed": {"alpha_cl": 1.0, "seed_phase": 0.0},
    "detection": {
        "eta_s": 0.89,
        "eta_i": 0.89,
        "theta_ref_s": 0.0,
        "theta_ref_i": 0.0,
        "g_weight": 1.0,
    },
    "phase_noise": {"sigma_s": 0.01414213562373095, "sigma_i": 0.01414213562373095, "cov_si": 0.0},
    "run": {"rng_seed": 12345},
    "integrate": {"t_end_over_gamma": 20.0, "dt_over_gamma": 0.05},
    "spectra_scan": {"omega_norm_max": 5.0, "points": 201},
    "sweep_scan": {"epsilon_min": 0.0, "epsilon_max": 0.9, "points": 19},
    "lock_sim": {
        "duration": 2.0,
        "rate": 2e5,
        "loop_s": {
            "kp": 0.01,
            "ki": 5e3,
            "lpf_cutoff": 1e4,
            "actuator_range": 20.0,
            "actuator_resonance": 2e4,
            "actuator_q": 10.0,
            "theta_ref": 0.0,
            "beat_sign": 1,
        },
        "loop_i": {
            "kp": 0.01,
            "ki": 5e3,
            "lpf_cutoff": 1e4,
            "actuator_range": 20.0,
            "actuator_resonance": 2e4,
            "actuator_q": 10.0,
            "theta_ref": 0.0,
            "beat_sign": -1,
        },
        "disturbance_s": {
            "random_walk_diffusion": 1.5,
            "white_noise_density": 1e-9,
            "sinusoids": [[50.0, 0.05, 0.0], [120.0, 0.02, 1.0]],
            "ramp_rate": 0.0,
            "rng_seed": 101,
        },
        "disturbance_i": {
            "random_walk_diffusion": 1.5,
            "white_noise_density": 1e-9,
            "sinusoids": [[50.0, 0.04, 0.5]],
            "ramp_rate": 0.0,
            "rng_seed": 202,
        },
        "disturbance_pump": {
            "random_walk_diffusion": 0.5,
            "white_noise_density": 0.0,
            "sinusoids": [],
            "ramp_rate": 0.0,
            "rng_seed": 303,
        },
    },
    "synth_epr": {
        "duration": 5.0,
        "rate": 2e5,
        "band": [5e3, 1.5e4],
        "sigma_theta": 0.0,
        "theta_cutoff": 200.0,
        "dark_noise": False,
    },
    "fit_settings": {"mode": "small-angle", "n_bootstrap": 200},
    "reproduce_fig4": {
        "epsilons": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
        "sigma_theta": 0.01,
        "theta_cutoff": 200.0,
        "duration": 5.0,
        "rate": 2e5,
        "band": [5e3, 1.5e4],
        "n_bootstrap": 50,
    },
    "reproduce_fig5": {"f_lo": 5e3, "f_hi": 1.7e4, "points": 121},
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_NUMERICAL = 4


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key in out and isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _apply_override(cfg: dict, expr: str) -> None:
    if "=" not in expr:
        raise ConfigError(f"--set expects key=value, got {expr!r}")
    path, raw = expr.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = path.split(".")
    node = cfg
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override path {path!r} crosses a non-object value")
    node[keys[-1]] = value


def load_config(config_path: str | None, overrides: list[str]) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if config_path is not None:
        try:
            with open(config_path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {config_path} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("top-level config must be a JSON object")
        cfg = _deep_merge(cfg, user)
    for expr in overrides:
        _apply_override(cfg, expr)
    return cfg


def _system_config(cfg: dict) -> SystemConfig:
    sys_cfg = config_from_dict(cfg)
    ok, msg = validate_frequency_plan(sys_cfg.plan)
    if not ok:
        raise ConfigError(f"frequency plan violates energy conservation: {msg}")
    return sys_cfg


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) for x in row])


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _loop_config(block: dict) -> locksim.LoopConfig:
    try:
        return locksim.LoopConfig(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad loop config: {exc}") from exc


def _disturbance(block: dict) -> locksim.DisturbanceSpec:
    try:
        return locksim.DisturbanceSpec(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad disturbance config: {exc}") from exc


def _read_table(path: str) -> tuple[list[str], np.ndarray]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read input {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"input {path} is empty")
    header = [c.strip() for c in rows[0]]
    try:
        data = np.array([[float(x) for x in row] for row in rows[1:]])
    except ValueError as exc:
        raise ConfigError(f"non-numeric data in {path}: {exc}") from exc
    if data.size == 0:
        raise ConfigError(f"input {path} has no data rows")
    return header, data


# --- subcommand handlers -------------------------------------------------


def _cmd_steady_state(cfg, sys_cfg, outdir, seed):
    state = nopo.steady_state_linear_solve(sys_cfg.cavity, sys_cfg.pump, sys_cfg.seed)
    payload = {
        "a_cls": complex_to_pair(state.a_cls),
        "a_cli": complex_to_pair(state.a_cli),
        "phi_cls": state.phi_cls,
        "phi_cli": state.phi_cli,
        "gain": nopo.parametric_gain(sys_cfg.pump.epsilon),
    }
    _write_json(outdir / "steady_state.json", payload)
    return ["steady_state.json"]


def _cmd_integrate(cfg, sys_cfg, outdir, seed):
    gamma = sys_cfg.cavity.gamma_total
    block = cfg["integrate"]
    traj = nopo.integrate_dynamics(
        sys_cfg.cavity,
        sys_cfg.pump,
        sys_cfg.seed,
        t_end=block["t_end_over_gamma"] / gamma,
        dt=block["dt_over_gamma"] / gamma,
    )
    rows = zip(traj.times, traj.alpha_s.real, traj.alpha_s.imag, traj.alpha_i.real, traj.alpha_i.imag)
    _write_csv(
        outdir / "trajectory.csv",
        ["t", "alpha_s_re", "alpha_s_im", "alpha_i_re", "alpha_i_im"],
        rows,
    )
    return ["trajectory.csv"]


def _cmd_spectra(cfg, sys_cfg, outdir, seed):
    block = cfg["spectra_scan"]
    omega = np.linspace(0.0, block["omega_norm_max"], int(block["points"]))
    eps = sys_cfg.pump.epsilon
    eta = 0.5 * (sys_cfg.detection.eta_s + sys_cfg.detection.eta_i)
    vm = spectra.two_mode_variance(eps, eta, omega, "minus")
    vp = spectra.two_mode_variance(eps, eta, omega, "plus")
    from .model import db

    _write_csv(
        outdir / "spectra.csv",
        ["omega_norm", "var_minus", "var_plus", "var_minus_db", "var_plus_db"],
        zip(omega, vm, vp, db(vm), db(vp)),
    )
    return ["spectra.csv"]


def _cmd_sweep(cfg, sys_cfg, outdir, seed):
    block = cfg["sweep_scan"]
    eps_grid = np.linspace(block["epsilon_min"], block["epsilon_max"], int(block["points"]))
    eta = 0.5 * (sys_cfg.detection.eta_s + sys_cfg.detection.eta_i)
    sigma = sys_cfg.phase_noise.sigma_theta
    rows = []
    for eps in eps_grid:
        vm = spectra.two_mode_variance(eps, eta, 0.0, "minus")
        vp = spectra.two_mode_variance(eps, eta, 0.0, "plus")
        rows.append(
            (
                eps,
                spectra.phase_noise_variance(vm, vp, sigma),
                spectra.phase_noise_variance(vp, vm, sigma),
            )
        )
    _write_csv(outdir / "sweep.csv", ["epsilon", "var_minus_pn", "var_plus_pn"], rows)
    return ["sweep.csv"]


def _cmd_duan_simon(cfg, sys_cfg, outdir, seed):
    eps = sys_cfg.pump.epsilon
    eta = 0.5 * (sys_cfg.detection.eta_s + sys_cfg.detection.eta_i)
    vm = spectra.two_mode_variance(eps, eta, 0.0, "minus")
    vp = spectra.two_mode_variance(eps, eta, 0.0, "plus")
    vp_orth = spectra.orthogonal_variance(vp, vm, "plus")
    result = spectra.duan_simon(vm, vp_orth)
    sigma = sys_cfg.phase_noise.sigma_theta
    sum_pn = spectra.phase_noise_variance(vm, vp, sigma) + spectra.phase_noise_variance(
        vp_orth, vp, sigma
    )
    payload = {
        "sum": result.total,
        "entangled": result.entangled,
        "sum_with_phase_noise": sum_pn,
    }
    _write_json(outdir / "duan_simon.json", payload)
    return ["duan_simon.json"]


def _run_lock(cfg, sys_cfg):
    block = cfg["lock_sim"]
    fields = nopo.steady_state_linear_solve(sys_cfg.cavity, sys_cfg.pump, sys_cfg.seed)
    return locksim.run_closed_loop(
        _loop_config(block["loop_s"]),
        _loop_config(block["loop_i"]),
        (
            _disturbance(block["disturbance_s"]),
            _disturbance(block["disturbance_i"]),
            _disturbance(block["disturbance_pump"]),
        ),
        fields,
        duration=block["duration"],
        rate=block["rate"],
    )


def _cmd_lock_sim(cfg, sys_cfg, outdir, seed):
    result = _run_lock(cfg, sys_cfg)
    t = result.residual_theta_s.times
    _write_csv(
        outdir / "lock_traces.csv",
        ["t", "theta_s", "theta_i", "theta_common"],
        zip(
            t,
            result.residual_theta_s.samples,
            result.residual_theta_i.samples,
            result.common_mode_theta.samples,
        ),
    )
    summary = {
        "sigma_theta_rms": float(np.std(result.common_mode_theta.samples)),
        "in_lock_fraction": result.in_lock_fraction,
        "saturation_count": int(result.saturation_events.size),
        "unstable": result.unstable,
    }
    _write_json(outdir / "lock_summary.json", summary)
    return ["lock_traces.csv", "lock_summary.json"]


def _cmd_synth_epr(cfg, sys_cfg, outdir, seed):
    block = cfg["synth_epr"]
    gamma = sys_cfg.cavity.gamma_total
    residual = None
    if block["sigma_theta"] > 0:
        theta = locksim.synth_theta_process(
            block["sigma_theta"], block["theta_cutoff"], block["duration"], block["rate"], seed + 1
        )
        residual = (theta, theta)
    q_s, q_i = locksim.synth_epr_photocurrents(
        sys_cfg.pump.epsilon,
        sys_cfg.detection.eta_s,
        sys_cfg.detection.eta_i,
        gamma,
        residual,
        block["duration"],
        block["rate"],
        seed,
        dark_noise=block["dark_noise"],
    )
    shot = locksim.shot_noise_reference(block["duration"], block["rate"], seed + 2)
    _write_csv(outdir / "photocurrents.csv", ["t", "q_s", "q_i"], zip(q_s.times, q_s.samples, q_i.samples))
    _write_csv(outdir / "shot_reference.csv", ["t", "shot"], zip(shot.times, shot.samples))
    return ["photocurrents.csv", "shot_reference.csv"]


def _cmd_calibrate(cfg, sys_cfg, outdir, seed, input_path):
    if input_path is None:
        raise ConfigError("calibrate requires --input <fringe csv>")
    header, data = _read_table(input_path)
    phase_span = None
    if "phase" in header:
        phase = data[:, header.index("phase")]
        phase_span = float(np.max(phase) - np.min(phase))
    sig_col = header.index("signal") if "signal" in header else len(header) - 1
    t_col = header.index("t") if "t" in header else 0
    t = data[:, t_col]
    rate = 1.0 / float(np.mean(np.diff(t))) if data.shape[0] > 1 else 1.0
    scan = locksim.TimeSeries(sample_rate=rate, samples=data[:, sig_col], label="error signal")
    s_pp, beta = locksim.calibrate_error_signal(scan, phase_span)
    _write_json(outdir / "calibration.json", {"s_pp": s_pp, "beta": beta})
    return ["calibration.json"]


def _cmd_psd(cfg, sys_cfg, outdir, seed, input_path):
    if input_path is None:
        raise ConfigError("psd requires --input <trace csv>")
    header, data = _read_table(input_path)
    if data.shape[1] < 2:
        raise ConfigError("psd input needs a time column and a value column")
    t = data[:, 0]
    rate = 1.0 / float(np.mean(np.diff(t)))
    series = locksim.TimeSeries(sample_rate=rate, samples=data[:, 1], label="input")
    psd = estimation.welch_psd(series)
    _write_csv(outdir / "psd.csv", ["f", "density"], zip(psd.frequencies, psd.densities))
    return ["psd.csv"]


def _cmd_fit(cfg, sys_cfg, outdir, seed, input_path):
    if input_path is None:
        raise ConfigError("fit requires --input <dataset csv>")
    header, data = _read_table(input_path)
    if data.shape[1] < 4:
        raise ConfigError("fit input needs columns epsilon,var_minus,var_plus,uncert")
    dataset = estimation.SqueezingDataset(points=tuple(map(tuple, data[:, :4])))
    settings = cfg["fit_settings"]
    result = estimation.fit_phase_noise_model(
        dataset,
        mode=settings["mode"],
        n_bootstrap=int(settings["n_bootstrap"]),
        bootstrap_seed=seed,
    )
    _write_json(outdir / "fit.json", _fit_payload(result))
    return ["fit.json"]


def _fit_payload(result: estimation.FitResult) -> dict:
    return {
        "eta_hat": result.eta_hat,
        "sigma_hat": result.sigma_hat,
        "eta_err": result.eta_err,
        "sigma_err": result.sigma_err,
        "residual_norm": result.residual_norm,
        "converged": result.converged,
        "at_boundary": result.at_boundary,
    }


def _cmd_reproduce_fig3(cfg, sys_cfg, outdir, seed):
    result = _run_lock(cfg, sys_cfg)
    fields = nopo.steady_state_linear_solve(sys_cfg.cavity, sys_cfg.pump, sys_cfg.seed)
    rate = result.common_mode_theta.sample_rate

    # Calibration chain: fringe scan -> beta -> calibrated common-mode trace.
    phase_scan = np.linspace(0.0, 2.0 * np.pi, 4096)
    amp = abs(fields.a_cls)
    fringe = locksim.TimeSeries(
        sample_rate=rate, samples=locksim.error_signal(phase_scan, 1.0, amp, 0.0, 1), label="scan"
    )
    s_pp, beta = locksim.calibrate_error_signal(fringe, float(phase_scan[-1] - phase_scan[0]))
    raw = locksim.TimeSeries(
        sample_rate=rate,
        samples=locksim.error_signal(result.common_mode_theta.samples, 1.0, amp, 0.0, 1),
        label="error signal",
    )
    theta_cal = estimation.apply_calibration(raw, beta)
    psd = estimation.welch_psd(theta_cal)
    sigma = estimation.integrate_psd(psd, psd.frequencies[1], psd.frequencies[-1])
    _write_csv(outdir / "fig3_theta_psd.csv", ["f", "density"], zip(psd.frequencies, psd.densities))
    _write_json(
        outdir / "fig3_summary.json",
        {
            "s_pp": s_pp,
            "beta": beta,
            "sigma_theta": sigma,
            "sigma_theta_time_domain": float(np.std(result.common_mode_theta.samples)),
            "in_lock_fraction": result.in_lock_fraction,
        },
    )
    return ["fig3_theta_psd.csv", "fig3_summary.json"]


def _fig4_dataset(cfg, sys_cfg, seed) -> estimation.SqueezingDataset:
    block = cfg["reproduce_fig4"]
    gamma = sys_cfg.cavity.gamma_total
    duration, rate = block["duration"], block["rate"]
    f_lo, f_hi = block["band"]
    points = []
    for k, eps in enumerate(block["epsilons"]):
        run_seed = seed + 1000 * (k + 1)
        theta = locksim.synth_theta_process(
            block["sigma_theta"], block["theta_cutoff"], duration, rate, run_seed + 1
        )
        q_s, q_i = locksim.synth_epr_photocurrents(
            eps,
            sys_cfg.detection.eta_s,
            sys_cfg.detection.eta_i,
            gamma,
            (theta, theta),
            duration,
            rate,
            run_seed,
        )
        shot = locksim.shot_noise_reference(duration, rate, run_seed + 2)
        minus = locksim.TimeSeries(rate, (q_s.samples - q_i.samples) / np.sqrt(2.0))
        plus = locksim.TimeSeries(rate, (q_s.samples + q_i.samples) / np.sqrt(2.0))
        vm = locksim.band_rms(minus, f_lo, f_hi, shot)
        vp = locksim.band_rms(plus, f_lo, f_hi, shot)
        # Relative band-power scatter of the Welch estimate: one over the
        # square root of (averaged segments x frequency bins in band).
        nperseg = max(8, min(int(duration * rate) // 8, 2**16))
        n_avg = max(1, 2 * int(duration * rate) // nperseg - 1)
        n_bins = max(1, int((f_hi - f_lo) * nperseg / rate))
        rel = 1.0 / np.sqrt(n_avg * n_bins)
        points.append((eps, vm, vp, rel))
    return estimation.SqueezingDataset(points=tuple(points))


def _cmd_reproduce_fig4(cfg, sys_cfg, outdir, seed):
    block = cfg["reproduce_fig4"]
    dataset = _fig4_dataset(cfg, sys_cfg, seed)
    _write_csv(
        outdir / "fig4_dataset.csv",
        ["epsilon", "var_minus", "var_plus", "uncert"],
        dataset.points,
    )
    result = estimation.fit_phase_noise_model(
        dataset,
        mode=cfg["fit_settings"]["mode"],
        n_bootstrap=int(block["n_bootstrap"]),
        bootstrap_seed=seed,
    )
    payload = _fit_payload(result)
    payload["injected_sigma_theta"] = block["sigma_theta"]
    payload["injected_eta"] = 0.5 * (sys_cfg.detection.eta_s + sys_cfg.detection.eta_i)
    _write_json(outdir / "fig4_fit.json", payload)
    return ["fig4_dataset.csv", "fig4_fit.json"]


def _cmd_reproduce_fig5(cfg, sys_cfg, outdir, seed):
    block = cfg["reproduce_fig5"]
    gamma = sys_cfg.cavity.gamma_total
    f = np.linspace(block["f_lo"], block["f_hi"], int(block["points"]))
    omega = f / gamma
    eps = sys_cfg.pump.epsilon
    eta = 0.5 * (sys_cfg.detection.eta_s + sys_cfg.detection.eta_i)
    vm = spectra.two_mode_variance(eps, eta, omega, "minus")
    vp = spectra.two_mode_variance(eps, eta, omega, "plus")
    from .model import db

    _write_csv(
        outdir / "fig5_spectra.csv",
        ["f_hz", "omega_norm", "var_minus", "var_plus", "var_minus_db", "var_plus_db"],
        zip(f, omega, vm, vp, db(vm), db(vp)),
    )
    return ["fig5_spectra.csv"]


_REPRODUCE = {"fig3": _cmd_reproduce_fig3, "fig4": _cmd_reproduce_fig4, "fig5": _cmd_reproduce_fig5}

_SIMPLE_COMMANDS = {
    "steady-state": _cmd_steady_state,
    "integrate": _cmd_integrate,
    "spectra": _cmd_spectra,
    "sweep": _cmd_sweep,
    "duan-simon": _cmd_duan_simon,
    "lock-sim": _cmd_lock_sim,
    "synth-epr": _cmd_synth_epr,
}

_INPUT_COMMANDS = {"calibrate": _cmd_calibrate, "psd": _cmd_psd, "fit": _cmd_fit}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eprlock",
        description="Simulation and analysis toolkit for a coherently phase-controlled "
        "two-color EPR source",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in list(_SIMPLE_COMMANDS) + list(_INPUT_COMMANDS) + ["reproduce"]:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file merged over defaults")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dot-path config override, value parsed as JSON",
        )
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override run.rng_seed")
        if name in _INPUT_COMMANDS:
            p.add_argument("--input", default=None, help="input CSV file")
        if name == "reproduce":
            p.add_argument("target", choices=sorted(_REPRODUCE))
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = load_config(args.config, args.overrides)
    if args.seed is not None:
        cfg["run"]["rng_seed"] = int(args.seed)
    seed = int(cfg["run"]["rng_seed"])
    sys_cfg = _system_config(cfg)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    if args.subcommand == "reproduce":
        outputs = _REPRODUCE[args.target](cfg, sys_cfg, outdir, seed)
    elif args.subcommand in _INPUT_COMMANDS:
        outputs = _INPUT_COMMANDS[args.subcommand](cfg, sys_cfg, outdir, seed, args.input)
    else:
        outputs = _SIMPLE_COMMANDS[args.subcommand](cfg, sys_cfg, outdir, seed)

    manifest = {
        "tool": "eprlock",
        "version": __version__,
        "subcommand": args.subcommand,
        "config_sha256": _config_hash(cfg),
        "seed": seed,
        "outputs": outputs,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    _write_json(outdir / "manifest.json", manifest)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        _emit_error("config", exc)
        return EXIT_CONFIG
    except PhysicsDomainError as exc:
        _emit_error("physics", exc)
        return EXIT_PHYSICS
    except NumericalError as exc:
        _emit_error("numerical", exc)
        return EXIT_NUMERICAL


def _emit_error(kind: str, exc: Exception) -> None:
    json.dump({"error": kind, "type": type(exc).__name__, "message": str(exc)}, sys.stderr)
    sys.stderr.write("\n")


if __name__ == "__main__":
    raise SystemExit(main())
