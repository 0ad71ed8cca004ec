"""Artifact writers: CSV/JSON/binary emitters, atomic writes, manifests.

Float columns use repr() round-trip formatting, so a CSV is a bit-exact
function of the numbers in it; manifests carry sha256 checksums of every
output and no wall-clock content ((config, seed) determines every byte).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .attractors import AttractorReport, DensityEstimate, SyncRun
from .qg import BranchTable, QGParams, QGState, RunDiagnostics
from .sweep import StaircaseProfile, TongueMap


def fmt(x) -> str:
    """Shortest decimal that round-trips the IEEE-754 double."""
    return repr(float(x))


def atomic_write_bytes(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode())


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def tonguemap_csv(tm: TongueMap) -> str:
    """Columns: tau, eps, rho, half_width, p, q.

    Unlocked cells leave p and q empty; bad (non-diffeomorphism) cells
    carry the sentinel p = q = -1.
    """
    taus = tm.spec.tau_values()
    epss = tm.spec.eps_values()
    lines = ["tau,eps,rho,half_width,p,q"]
    for i in range(epss.shape[0]):
        for j in range(taus.shape[0]):
            q = int(tm.lock_q[i, j])
            if q > 0:
                p_s, q_s = str(int(tm.lock_p[i, j])), str(q)
            elif q < 0:
                p_s, q_s = "-1", "-1"
            else:
                p_s, q_s = "", ""
            lines.append(
                f"{fmt(taus[j])},{fmt(epss[i])},{fmt(tm.rho[i, j])},"
                f"{fmt(tm.half_width[i, j])},{p_s},{q_s}"
            )
    return "\n".join(lines) + "\n"


def staircase_csv(profile: StaircaseProfile) -> str:
    """Columns: tau, rho, p, q (empty p,q when unlocked)."""
    lines = ["tau,rho,p,q"]
    for j in range(profile.tau_values.shape[0]):
        lab = profile.labels[j]
        p_s, q_s = (str(lab[0]), str(lab[1])) if lab else ("", "")
        lines.append(f"{fmt(profile.tau_values[j])},{fmt(profile.rho_values[j])},{p_s},{q_s}")
    return "\n".join(lines) + "\n"


def steps_csv(profile: StaircaseProfile) -> str:
    lines = ["p,q,tau_lo,tau_hi,width"]
    for s in profile.steps:
        lines.append(f"{s.p},{s.q},{fmt(s.tau_lo)},{fmt(s.tau_hi)},{fmt(s.width)}")
    return "\n".join(lines) + "\n"


def sync_csv(run: SyncRun) -> str:
    """Columns: step, x_1..x_m, sup_dist."""
    m = run.trajectories.shape[1]
    header = "step," + ",".join(f"x_{i+1}" for i in range(m)) + ",sup_dist"
    lines = [header]
    for n in range(run.trajectories.shape[0]):
        xs = ",".join(fmt(v) for v in run.trajectories[n])
        lines.append(f"{n},{xs},{fmt(run.sup_pairwise_distance[n])}")
    return "\n".join(lines) + "\n"


def density_csv(d: DensityEstimate) -> str:
    """Columns: bin_center, weight."""
    lines = ["bin_center,weight"]
    for b in range(d.bins):
        center = (b + 0.5) / d.bins
        lines.append(f"{fmt(center)},{fmt(d.weights[b])}")
    return "\n".join(lines) + "\n"


def report_json(report: AttractorReport) -> str:
    return json.dumps(report.record(), sort_keys=True) + "\n"


def diagnostics_csv(diag: RunDiagnostics) -> str:
    lines = ["time,energy,enstrophy,asymmetry"]
    for i in range(diag.times.shape[0]):
        lines.append(
            f"{fmt(diag.times[i])},{fmt(diag.energy[i])},"
            f"{fmt(diag.enstrophy[i])},{fmt(diag.asymmetry[i])}"
        )
    return "\n".join(lines) + "\n"


def branch_csv(table: BranchTable) -> str:
    lines = ["tau_w,signed_asymmetry,asymmetry,regime,energy,steps,blown_up"]
    for p in table.points:
        lines.append(
            f"{fmt(p.tau_w)},{fmt(p.signed_asymmetry)},{fmt(p.asymmetry)},"
            f"{p.regime},{fmt(p.energy)},{p.steps},{int(p.blown_up)}"
        )
    return "\n".join(lines) + "\n"


def write_field_snapshot(path: Path, state: QGState, params: QGParams) -> List[Path]:
    """Flat binary (row-major float64 little-endian) plus a JSON sidecar."""
    path = Path(path)
    psi = np.ascontiguousarray(state.psi, dtype="<f8")
    q = np.ascontiguousarray(state.q, dtype="<f8")
    atomic_write_bytes(path, psi.tobytes() + q.tobytes())
    sidecar = path.with_suffix(path.suffix + ".json")
    meta = {
        "fields": ["psi", "q"],
        "shape": [params.nx, params.ny],
        "dtype": "<f8",
        "order": "C",
        "time": state.time,
        "params": {
            "Lx": params.Lx, "Ly": params.Ly, "beta": params.beta,
            "lambda_R_inv2": params.lambda_R_inv2, "nu": params.nu,
            "mu": params.mu, "tau_w": params.tau_w,
            "nx": params.nx, "ny": params.ny, "dt": params.dt,
        },
    }
    atomic_write_text(sidecar, json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return [path, sidecar]


def read_field_snapshot(path: Path) -> Tuple[QGState, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    nx, ny = meta["shape"]
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    psi = raw[: nx * ny].reshape(nx, ny).copy()
    q = raw[nx * ny:].reshape(nx, ny).copy()
    return QGState(psi=psi, q=q, time=meta["time"]), meta


def write_manifest(
    out_dir: Path,
    command: str,
    config: dict,
    seed: Optional[int],
    outputs: Sequence[Path],
    partial: bool = False,
) -> Path:
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "outputs": [
            {"path": str(Path(p).relative_to(out_dir)), "sha256": sha256_of(p)}
            for p in outputs
        ],
        "partial": partial,
    }
    path = out_dir / "manifest.json"
    atomic_write_text(path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return path
