"""Batch command-line front end.

Every subcommand reads an optional TOML config plus overriding flags,
validates strictly, computes, and writes artifacts atomically together with
a manifest.json carrying sha256 checksums.  Exit codes: 0 success, 2 config
error, 3 domain/validation error, 4 blow-up (partial artifacts retained).
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

import click
import numpy as np

from . import artifacts as art
from .attractors import (
    ClassifyProtocol,
    classify_attractor,
    conjugacy_verdict,
    pullback_ensemble,
    stationary_pdf,
    synchronization_run,
)
from .circle import CircleParams, Convention, lyapunov_exponent
from .config import COMMAND_SCHEMAS, ConfigError, RunConfig, parse_config
from .noise import NoisePath
from .qg import (
    BlowUpError,
    QGParams,
    bifurcation_scan,
    perturb_symmetry,
    rest_state,
    run_to_regime,
)
from .sweep import EstimatorProtocol, GridSpec, scan_tongues, staircase

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_BLOWUP = 4


def _fail(out_dir: Path, code: int, error_type: str, message: str) -> None:
    record = {"error": error_type, "message": message}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        art.atomic_write_text(out_dir / "error.json", json.dumps(record) + "\n")
    except OSError:
        pass
    click.echo(json.dumps(record), err=True)
    sys.exit(code)


def _convention(name: str) -> Convention:
    return Convention(name)


def _circle_params(p: Dict) -> CircleParams:
    return CircleParams(
        tau=p["tau"], eps=p["eps"], sigma=p["sigma"],
        convention=_convention(p["convention"]),
    )


def _set_workers(n: int) -> None:
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _write(out_dir: Path, name: str, text: str) -> Path:
    path = out_dir / name
    art.atomic_write_text(path, text)
    return path


def _finish(cfg: RunConfig, outputs: List[Path], partial: bool = False) -> None:
    art.write_manifest(
        cfg.out_dir, cfg.command, cfg.as_dict(), cfg.seed, outputs, partial=partial
    )


def _run_tongues(cfg: RunConfig) -> None:
    p = cfg.params
    spec = GridSpec(
        tau_lo=p["tau_lo"], tau_hi=p["tau_hi"], n_tau=p["n_tau"],
        eps_lo=p["eps_lo"], eps_hi=p["eps_hi"], n_eps=p["n_eps"],
        sigma=p["sigma"], convention=_convention(p["convention"]),
        k=p["k"], burn_in=p["burn_in"], seed=cfg.seed,
        q_max=p["q_max"], tol=p["tol"], x0=p["x0"],
    )
    tm = scan_tongues(spec)
    out = _write(cfg.out_dir, "tongues.csv", art.tonguemap_csv(tm))
    _finish(cfg, [out])


def _staircase_protocol(p: Dict, seed: int) -> EstimatorProtocol:
    return EstimatorProtocol(
        k=p["k"], burn_in=p["burn_in"], seed=seed, x0=p["x0"],
        q_max=p["q_max"], tol=p["tol"],
        convention=_convention(p["convention"]),
    )


def _run_staircase(cfg: RunConfig) -> None:
    p = cfg.params
    taus = np.linspace(p["tau_lo"], p["tau_hi"], p["n_samples"], endpoint=False)
    prof = staircase(p["eps"], p["sigma"], taus, _staircase_protocol(p, cfg.seed))
    outs = [
        _write(cfg.out_dir, "staircase.csv", art.staircase_csv(prof)),
        _write(cfg.out_dir, "steps.csv", art.steps_csv(prof)),
    ]
    _finish(cfg, outs)


def _run_pdf(cfg: RunConfig) -> None:
    p = cfg.params
    dens = stationary_pdf(
        _circle_params(p), NoisePath(cfg.seed),
        n=p["n"], burn_in=p["burn_in"], bins=p["bins"], x0=p["x0"],
    )
    out = _write(cfg.out_dir, "density.csv", art.density_csv(dens))
    _finish(cfg, [out])


def _run_pullback(cfg: RunConfig) -> None:
    p = cfg.params
    run = pullback_ensemble(_circle_params(p), NoisePath(cfg.seed), T=p["T"], m=p["m"])
    diam_lines = ["time,diameter"] + [
        f"{t - run.T},{art.fmt(run.diameter_history[t])}"
        for t in range(run.T + 1)
    ]
    pos_lines = ["member,x"] + [
        f"{i},{art.fmt(x)}" for i, x in enumerate(run.positions_at_0)
    ]
    outs = [
        _write(cfg.out_dir, "pullback.csv", "\n".join(diam_lines) + "\n"),
        _write(cfg.out_dir, "positions.csv", "\n".join(pos_lines) + "\n"),
    ]
    _finish(cfg, outs)


def _run_sync(cfg: RunConfig) -> None:
    p = cfg.params
    run = synchronization_run(
        _circle_params(p), NoisePath(cfg.seed), p["x0s"], n=p["n"]
    )
    out = _write(cfg.out_dir, "sync.csv", art.sync_csv(run))
    _finish(cfg, [out])


def _run_lyapunov(cfg: RunConfig) -> None:
    p = cfg.params
    lam = lyapunov_exponent(
        p["x0"], _circle_params(p), NoisePath(cfg.seed),
        n=p["n"], burn_in=p["burn_in"],
    )
    record = {"lyapunov": lam, "tau": p["tau"], "eps": p["eps"],
              "sigma": p["sigma"], "convention": p["convention"],
              "n": p["n"], "seed": cfg.seed}
    out = _write(cfg.out_dir, "lyapunov.json", json.dumps(record, sort_keys=True) + "\n")
    _finish(cfg, [out])


def _classify_protocol(p: Dict) -> ClassifyProtocol:
    return ClassifyProtocol(
        pdf_n=p["pdf_n"], bins=p["bins"], mass_threshold=p["mass_threshold"],
        pullback_T=p["pullback_T"], ensemble_m=p["ensemble_m"], lyap_n=p["lyap_n"],
    )


def _run_classify(cfg: RunConfig) -> None:
    p = cfg.params
    report = classify_attractor(
        _circle_params(p), NoisePath(cfg.seed), _classify_protocol(p)
    )
    out = _write(cfg.out_dir, "report.json", art.report_json(report))
    _finish(cfg, [out])


def _run_conjugacy(cfg: RunConfig) -> None:
    p = cfg.params
    proto = ClassifyProtocol(
        pdf_n=p["pdf_n"], bins=p["bins"],
        pullback_T=p["pullback_T"], ensemble_m=p["ensemble_m"], lyap_n=p["lyap_n"],
    )
    conv = _convention(p["convention"])
    rep_a = classify_attractor(
        CircleParams(tau=p["tau_a"], eps=p["eps"], sigma=p["sigma"], convention=conv),
        NoisePath(cfg.seed), proto,
    )
    rep_b = classify_attractor(
        CircleParams(tau=p["tau_b"], eps=p["eps"], sigma=p["sigma"], convention=conv),
        NoisePath(cfg.seed).derive(1), proto,
    )
    verdict = conjugacy_verdict(rep_a, rep_b)
    payload = {"verdict": verdict, "a": rep_a.record(), "b": rep_b.record()}
    out = _write(cfg.out_dir, "conjugacy.json", json.dumps(payload, sort_keys=True) + "\n")
    _finish(cfg, [out])


def _qg_params(p: Dict) -> QGParams:
    return QGParams(
        Lx=p["Lx"], Ly=p["Ly"], beta=p["beta"], lambda_R_inv2=p["lambda_R_inv2"],
        nu=p["nu"], mu=p["mu"], tau_w=p["tau_w"], nx=p["nx"], ny=p["ny"], dt=p["dt"],
    )


def _run_qg(cfg: RunConfig) -> None:
    p = cfg.params
    params = _qg_params(p)
    state = rest_state(params)
    if p["perturb_sign"] != 0:
        state = perturb_symmetry(state, params, p["perturb_sign"])
    try:
        final, diag = run_to_regime(
            params, state, t_max=p["t_max"], window=p["window"],
            sample_every=p["sample_every"],
        )
    except BlowUpError as exc:
        outs = []
        if exc.diagnostics is not None:
            outs.append(_write(cfg.out_dir, "diagnostics.csv",
                               art.diagnostics_csv(exc.diagnostics)))
        _finish(cfg, outs, partial=True)
        _fail(cfg.out_dir, EXIT_BLOWUP, "blow_up", str(exc))
    outs = [_write(cfg.out_dir, "diagnostics.csv", art.diagnostics_csv(diag))]
    outs += art.write_field_snapshot(cfg.out_dir / "final.bin", final, params)
    summary = {"regime": diag.regime, "asymmetry": float(diag.asymmetry[-1]),
               "energy": float(diag.energy[-1]), "time": final.time}
    outs.append(_write(cfg.out_dir, "summary.json", json.dumps(summary, sort_keys=True) + "\n"))
    _finish(cfg, outs)


def _run_qg_bif(cfg: RunConfig) -> None:
    p = cfg.params
    params = _qg_params(p)
    signs = {"plus": [1], "minus": [-1], "both": [1, -1]}[p["sign"]]
    outs: List[Path] = []
    result = {}
    for s in signs:
        table = bifurcation_scan(
            params, p["tau_w_values"], s,
            t_max=p["t_max"], window=p["window"], asym_threshold=p["asym_threshold"],
        )
        name = "branch_plus.csv" if s == 1 else "branch_minus.csv"
        outs.append(_write(cfg.out_dir, name, art.branch_csv(table)))
        result["plus" if s == 1 else "minus"] = {
            "tau_c": table.tau_c, "tau_c_defined": table.tau_c_defined,
        }
    outs.append(_write(cfg.out_dir, "scan.json", json.dumps(result, sort_keys=True) + "\n"))
    _finish(cfg, outs)


_RUNNERS = {
    "tongues": _run_tongues,
    "staircase": _run_staircase,
    "pdf": _run_pdf,
    "pullback": _run_pullback,
    "sync": _run_sync,
    "lyapunov": _run_lyapunov,
    "classify": _run_classify,
    "conjugacy": _run_conjugacy,
    "qg-run": _run_qg,
    "qg-bif": _run_qg_bif,
}


def dispatch(cfg: RunConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    _set_workers(cfg.workers)
    try:
        _RUNNERS[cfg.command](cfg)
    except BlowUpError as exc:  # qg-run handles its own; scans record per point
        _fail(cfg.out_dir, EXIT_BLOWUP, "blow_up", str(exc))
    except ValueError as exc:
        _fail(cfg.out_dir, EXIT_DOMAIN, "domain_error", str(exc))


_CLICK_TYPES = {float: float, int: int, str: str}


def _command_factory(name: str):
    schema = COMMAND_SCHEMAS[name]

    @click.pass_context
    def run(ctx, config, seed, workers, out, **kwargs):
        flag_params = {}
        for spec in schema:
            key = spec.name.lower()
            if key in kwargs and kwargs[key] is not None:
                value = kwargs[key]
                if spec.type is list and isinstance(value, str):
                    try:
                        value = [float(v) for v in value.split(",") if v.strip()]
                    except ValueError:
                        raise click.ClickException(f"{spec.name}: expected comma-separated numbers")
                if spec.type is int:
                    value = int(value)
                flag_params[spec.name] = value
        try:
            cfg = parse_config(
                name,
                config_file=Path(config) if config else None,
                flag_params=flag_params,
                seed=seed,
                workers=workers,
                out_dir=Path(out) if out else None,
            )
        except ConfigError as exc:
            click.echo(json.dumps({"error": "config_error", "message": str(exc)}), err=True)
            ctx.exit(EXIT_CONFIG)
        dispatch(cfg)

    params = [
        click.Option(["--config"], type=click.Path(), default=None,
                     help="TOML config file"),
        click.Option(["--seed"], type=int, default=None),
        click.Option(["--workers"], type=int, default=None),
        click.Option(["--out"], type=click.Path(), default=None,
                     help="output directory"),
    ]
    for spec in schema:
        flag = "--" + spec.name.replace("_", "-")
        opt_type = str if spec.type is list else _CLICK_TYPES[spec.type]
        params.append(
            click.Option([flag, spec.name.lower()], type=opt_type, default=None)
        )
    return click.Command(name, callback=run, params=params,
                         help=f"run the {name} computation")


@click.group()
def main() -> None:
    """Circle-map and double-gyre laboratory."""


for _name in COMMAND_SCHEMAS:
    main.add_command(_command_factory(_name))


if __name__ == "__main__":
    main()
