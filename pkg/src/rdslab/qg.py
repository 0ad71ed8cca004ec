"""Barotropic quasi-geostrophic double-gyre basin.

Vorticity form on a rectangular basin with free-slip walls:

    q_t + J(psi, q) - nu*lap(lap(psi)) + mu*lap(psi) = -tau_w sin(2 pi y / Ly)
    q = lap(psi) - lambda_R^-2 psi + beta*y

The prognostic variable is zeta = q - beta*y.  Free slip (psi = lap(psi) = 0
on the wall) makes the wall value of zeta zero and of q equal to beta*y, so
fields are padded with exactly those rings before differencing.  The
Helmholtz inversion is diagonal in the type-I discrete sine basis (exact to
round-off), the advection uses Arakawa's nine-point Jacobian (conserves the
domain sums of J, psi*J and q*J), and time stepping is Williamson low-storage
third-order Runge-Kutta.

The basin is mirror symmetric about y = Ly/2: S[psi](x, y) = -psi(x, Ly-y).
Forcing and perturbation fields are constructed half-grid-and-reflect so the
discrete step commutes with S to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.fft import dstn, idstn

REGIME_STEADY = "steady"
REGIME_PERIODIC = "periodic"
REGIME_APERIODIC = "aperiodic"

_ASYM_FLOOR = 1e-14  # guards the rest state in asymmetry_norm
_REL_STD_FLOOR = 1e-8


class BlowUpError(RuntimeError):
    """Non-finite fields during time stepping."""

    def __init__(self, message: str, diagnostics: Optional["RunDiagnostics"] = None):
        super().__init__(message)
        self.diagnostics = diagnostics


class CFLViolation(ValueError):
    pass


@dataclass(frozen=True)
class QGParams:
    Lx: float = 1.0
    Ly: float = 2.0
    beta: float = 20.0
    lambda_R_inv2: float = 0.0
    nu: float = 2e-3
    mu: float = 0.0
    tau_w: float = 0.5
    nx: int = 64
    ny: int = 128
    dt: float = 0.02

    def __post_init__(self) -> None:
        if self.Lx <= 0 or self.Ly <= 0:
            raise ValueError("basin lengths must be > 0")
        if self.nu < 0:  # nu = mu = 0 is the inviscid conservation check
            raise ValueError("nu must be >= 0")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.beta < 0 or self.lambda_R_inv2 < 0 or self.tau_w < 0:
            raise ValueError("beta, lambda_R_inv2, tau_w must be >= 0")
        if self.nx < 16 or self.ny < 16:
            raise ValueError("grid counts must be >= 16")

    @property
    def dx(self) -> float:
        return self.Lx / (self.nx + 1)

    @property
    def dy(self) -> float:
        return self.Ly / (self.ny + 1)


@dataclass
class QGState:
    """Interior streamfunction and full potential vorticity q = zeta + beta*y."""

    psi: np.ndarray
    q: np.ndarray
    time: float = 0.0


@dataclass
class RunDiagnostics:
    times: np.ndarray
    energy: np.ndarray
    enstrophy: np.ndarray
    asymmetry: np.ndarray
    regime: str


@dataclass
class BranchPoint:
    tau_w: float
    asymmetry: float
    signed_asymmetry: float
    regime: str
    energy: float
    steps: int
    blown_up: bool = False
    final_psi: Optional[np.ndarray] = None  # kept only when the scan asks


@dataclass
class BranchTable:
    sign: int
    points: List[BranchPoint] = field(default_factory=list)
    tau_c: Optional[float] = None

    @property
    def tau_c_defined(self) -> bool:
        return self.tau_c is not None


class _Workspace:
    """Grid-dependent constants, cached per parameter set."""

    def __init__(self, p: QGParams):
        nx, ny, dx, dy = p.nx, p.ny, p.dx, p.dy
        self.x = (np.arange(1, nx + 1) * dx)[:, None]
        self.y = (np.arange(1, ny + 1) * dy)[None, :]
        kx = np.arange(1, nx + 1)[:, None]
        ky = np.arange(1, ny + 1)[None, :]
        self.lap_eig = (
            2.0 * (np.cos(np.pi * kx / (nx + 1)) - 1.0) / dx**2
            + 2.0 * (np.cos(np.pi * ky / (ny + 1)) - 1.0) / dy**2
        )
        self.helm_eig = self.lap_eig - p.lambda_R_inv2
        # forcing profile sin(2 pi y / Ly), reflected so the two halves are
        # exact mirror negatives (keeps the step S-equivariant to round-off)
        prof = np.sin(2.0 * np.pi * self.y[0] / p.Ly)
        half = ny // 2
        prof[ny - 1 - np.arange(half)] = -prof[:half]
        if ny % 2 == 1:
            prof[half] = 0.0
        self.sin_profile = prof
        self.sin_field = np.broadcast_to(prof, (nx, ny)).copy()
        # q boundary ring: beta*y on the padded grid
        ypad = (np.arange(0, ny + 2) * dy)[None, :]
        self.beta_y_pad = p.beta * ypad * np.ones((nx + 2, 1))
        self.beta_y = self.beta_y_pad[1:-1, 1:-1]
        # symmetry-breaking perturbation mode, reflected half-grid
        mode = np.sin(np.pi * self.x / p.Lx) * np.sin(np.pi * self.y / p.Ly)
        mode[:, ny - 1 - np.arange(half)] = mode[:, :half]
        self.break_mode = mode
        self.break_mode_norm = float(np.linalg.norm(mode))
        self.area_weight = dx * dy


@lru_cache(maxsize=8)
def _workspace(p: QGParams) -> _Workspace:
    return _Workspace(p)


def wind_curl(params: QGParams) -> np.ndarray:
    """Forcing field -tau_w sin(2 pi y / Ly) on the interior nodes."""
    return -params.tau_w * _workspace(params).sin_field


def helmholtz_invert(q_field: np.ndarray, params: QGParams) -> np.ndarray:
    """Solve lap(psi) - lambda_R^-2 psi = q - beta*y with psi = 0 walls."""
    ws = _workspace(params)
    rhs = q_field - ws.beta_y
    return idstn(dstn(rhs, type=1) / ws.helm_eig, type=1)


def _invert_zeta(zeta: np.ndarray, ws: _Workspace) -> np.ndarray:
    return idstn(dstn(zeta, type=1) / ws.helm_eig, type=1)


def laplacian_dirichlet(f: np.ndarray, params: QGParams) -> np.ndarray:
    """Five-point Laplacian of an interior field with zero walls."""
    p = np.zeros((params.nx + 2, params.ny + 2))
    p[1:-1, 1:-1] = f
    return (
        (p[2:, 1:-1] - 2.0 * p[1:-1, 1:-1] + p[:-2, 1:-1]) / params.dx**2
        + (p[1:-1, 2:] - 2.0 * p[1:-1, 1:-1] + p[1:-1, :-2]) / params.dy**2
    )


def arakawa_jacobian(psi_pad: np.ndarray, q_pad: np.ndarray,
                     dx: float, dy: float) -> np.ndarray:
    """Arakawa's nine-point Jacobian J(psi, q) = psi_x q_y - psi_y q_x.

    Inputs are full-grid arrays (interior plus boundary ring); the interior
    Jacobian is returned.  With the ring values supplied by the caller the
    scheme conserves sum(J), sum(psi*J) and sum(q*J) to round-off.
    """
    if psi_pad.shape != q_pad.shape:
        raise ValueError("fields must share one grid")
    p, q = psi_pad, q_pad
    j1 = (
        (p[2:, 1:-1] - p[:-2, 1:-1]) * (q[1:-1, 2:] - q[1:-1, :-2])
        - (p[1:-1, 2:] - p[1:-1, :-2]) * (q[2:, 1:-1] - q[:-2, 1:-1])
    )
    j2 = (
        p[2:, 1:-1] * (q[2:, 2:] - q[2:, :-2])
        - p[:-2, 1:-1] * (q[:-2, 2:] - q[:-2, :-2])
        - p[1:-1, 2:] * (q[2:, 2:] - q[:-2, 2:])
        + p[1:-1, :-2] * (q[2:, :-2] - q[:-2, :-2])
    )
    j3 = (
        q[1:-1, 2:] * (p[2:, 2:] - p[:-2, 2:])
        - q[1:-1, :-2] * (p[2:, :-2] - p[:-2, :-2])
        - q[2:, 1:-1] * (p[2:, 2:] - p[2:, :-2])
        + q[:-2, 1:-1] * (p[:-2, 2:] - p[:-2, :-2])
    )
    return (j1 + j2 + j3) / (12.0 * dx * dy)


def pad_interior(f: np.ndarray, nx: int, ny: int) -> np.ndarray:
    out = np.zeros((nx + 2, ny + 2))
    out[1:-1, 1:-1] = f
    return out


def _zeta_of(state: QGState, ws: _Workspace) -> np.ndarray:
    return state.q - ws.beta_y


def state_from_zeta(zeta: np.ndarray, params: QGParams, time: float = 0.0) -> QGState:
    ws = _workspace(params)
    psi = _invert_zeta(zeta, ws)
    return QGState(psi=psi, q=zeta + ws.beta_y, time=time)


def rest_state(params: QGParams) -> QGState:
    return state_from_zeta(np.zeros((params.nx, params.ny)), params)


def _rhs(zeta: np.ndarray, p: QGParams, ws: _Workspace) -> np.ndarray:
    psi = _invert_zeta(zeta, ws)
    psi_pad = pad_interior(psi, p.nx, p.ny)
    q_pad = ws.beta_y_pad.copy()
    q_pad[1:-1, 1:-1] += zeta
    J = arakawa_jacobian(psi_pad, q_pad, p.dx, p.dy)
    lap_psi = zeta + p.lambda_R_inv2 * psi  # the Helmholtz relation inverted
    diss = p.nu * laplacian_dirichlet(lap_psi, p) - p.mu * lap_psi
    return -J + diss - p.tau_w * ws.sin_field


_RK_A = (0.0, -5.0 / 9.0, -153.0 / 128.0)
_RK_B = (1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0)


def _advance(zeta: np.ndarray, p: QGParams, ws: _Workspace) -> np.ndarray:
    dz = np.zeros_like(zeta)
    for a, b in zip(_RK_A, _RK_B):
        dz = a * dz + _rhs(zeta, p, ws)
        zeta = zeta + (b * p.dt) * dz
    return zeta


def step(state: QGState, params: QGParams) -> QGState:
    """Advance one dt; psi is re-derived from the Helmholtz inversion."""
    ws = _workspace(params)
    if state.q.shape != (params.nx, params.ny):
        raise ValueError("state does not match the parameter grid")
    with np.errstate(over="ignore", invalid="ignore"):  # blow-ups detected below
        zeta = _advance(_zeta_of(state, ws), params, ws)
    if not np.all(np.isfinite(zeta)):
        est = cfl_estimate(state, params)
        raise BlowUpError(
            f"non-finite fields after step at t={state.time + params.dt:.6g}; "
            f"dt={params.dt:g}, advective dt limit ~{est['dt_advective']:.3g}, "
            f"dissipative dt limit ~{est['dt_dissipative']:.3g}"
        )
    psi = _invert_zeta(zeta, ws)
    return QGState(psi=psi, q=zeta + ws.beta_y, time=state.time + params.dt)


def velocity(state: QGState, params: QGParams) -> Tuple[np.ndarray, np.ndarray]:
    """u = -psi_y, v = psi_x by centered differences (zero walls)."""
    p = pad_interior(state.psi, params.nx, params.ny)
    u = -(p[1:-1, 2:] - p[1:-1, :-2]) / (2.0 * params.dy)
    v = (p[2:, 1:-1] - p[:-2, 1:-1]) / (2.0 * params.dx)
    return u, v


def cfl_estimate(state: QGState, params: QGParams) -> dict:
    """Advective and dissipative step-size bounds for the RK3 scheme."""
    u, v = velocity(state, params)
    umax = float(max(np.max(np.abs(u)), np.max(np.abs(v)), 1e-12))
    lam_max = 4.0 / params.dx**2 + 4.0 / params.dy**2
    # Courant 1: a coarse mis-configuration guard, not a sharp bound; the
    # blow-up detector covers the marginal band during the run.
    dt_adv = min(params.dx, params.dy) / umax
    dt_diss = 2.5 / (params.nu * lam_max + params.mu + 1e-30)
    omega_beta = params.beta * params.Ly / (2.0 * np.pi) + 1e-30
    dt_beta = math.sqrt(3.0) / omega_beta
    return {
        "umax": umax,
        "dt_advective": dt_adv,
        "dt_dissipative": dt_diss,
        "dt_beta": dt_beta,
        "dt_limit": min(dt_adv, dt_diss, dt_beta),
    }


def validate_cfl(state: QGState, params: QGParams) -> dict:
    est = cfl_estimate(state, params)
    if params.dt > est["dt_limit"]:
        raise CFLViolation(
            f"dt={params.dt:g} exceeds the stability estimate {est['dt_limit']:.4g} "
            f"(advective {est['dt_advective']:.4g}, dissipative "
            f"{est['dt_dissipative']:.4g}, wave {est['dt_beta']:.4g})"
        )
    return est


def mirror_field(f: np.ndarray) -> np.ndarray:
    """S[f](x, y) = -f(x, Ly - y) for a streamfunction-like interior field."""
    return -f[:, ::-1]


def mirror_apply(obj, params: Optional[QGParams] = None):
    """Mirror a field or a QGState about the basin mid-axis."""
    if isinstance(obj, QGState):
        if params is None:
            raise ValueError("mirroring a state needs its params (beta*y ring)")
        ws = _workspace(params)
        zeta = mirror_field(obj.q - ws.beta_y)
        return QGState(psi=mirror_field(obj.psi), q=zeta + ws.beta_y, time=obj.time)
    return mirror_field(np.asarray(obj))


def asymmetry_norm(psi: np.ndarray) -> float:
    """||psi - S[psi]|| / max(||psi||, floor); 0 iff psi is S-invariant."""
    num = float(np.linalg.norm(psi - mirror_field(psi)))
    return num / max(float(np.linalg.norm(psi)), _ASYM_FLOOR)


def signed_asymmetry(psi: np.ndarray, params: QGParams) -> float:
    """Asymmetry with the sign of the y-moment of psi - S[psi].

    The difference field is even about the mid-axis, so its y-moment reduces
    to (Ly/2) times its basin integral: the sign tells which gyre dominates.
    """
    ws = _workspace(params)
    diff = psi - mirror_field(psi)
    moment = float(np.sum(diff * ws.y))
    return math.copysign(asymmetry_norm(psi), moment) if moment != 0.0 else 0.0


def energy(state: QGState, params: QGParams) -> float:
    """(1/2) int |grad psi|^2 + (lambda_R^-2/2) int psi^2, via -psi*zeta/2."""
    ws = _workspace(params)
    return float(-0.5 * np.sum(state.psi * (state.q - ws.beta_y)) * ws.area_weight)


def enstrophy(state: QGState, params: QGParams) -> float:
    ws = _workspace(params)
    z = state.q - ws.beta_y
    return float(0.5 * np.sum(z * z) * ws.area_weight)


def _classify_series(asym: np.ndarray) -> str:
    if asym.size < 8:
        return REGIME_APERIODIC
    mean = float(np.mean(asym))
    std = float(np.std(asym))
    if std / max(abs(mean), _REL_STD_FLOOR) < 1e-6:
        return REGIME_STEADY
    centered = (asym - mean) * np.hanning(asym.size)
    power = np.abs(np.fft.rfft(centered)) ** 2
    power[0] = 0.0
    total = float(np.sum(power))
    if total > 0.0:
        k = int(np.argmax(power))
        lo, hi = max(k - 2, 0), min(k + 3, power.size)  # Hann main lobe
        if float(np.sum(power[lo:hi])) > 0.8 * total:
            return REGIME_PERIODIC
    return REGIME_APERIODIC


def run_to_regime(
    params: QGParams,
    initial: QGState,
    t_max: float,
    window: float,
    sample_every: int = 1,
    stop_when_steady: bool = False,
) -> Tuple[QGState, RunDiagnostics]:
    """Integrate to t_max, labelling the regime from the trailing window.

    stop_when_steady ends the run early once the sampled asymmetry and
    energy have stopped moving (used by scans; off by default).
    """
    if t_max <= window:
        raise ValueError("t_max must exceed the diagnostic window")
    ws = _workspace(params)
    validate_cfl(initial, params)
    n_steps = int(round(t_max / params.dt))
    state = initial
    times, en, ens, asym = [], [], [], []

    def record(s: QGState) -> None:
        times.append(s.time)
        en.append(energy(s, params))
        ens.append(enstrophy(s, params))
        asym.append(asymmetry_norm(s.psi))

    record(state)
    check_every = max(1, int(round(4.0 / params.dt)))
    prev_a, prev_e = asym[0], en[0]
    try:
        for i in range(1, n_steps + 1):
            state = step(state, params)
            if i % sample_every == 0:
                record(state)
            if stop_when_steady and i % check_every == 0:
                a, e = asym[-1], en[-1]
                settled_sub = (
                    a < 1e-5 and a <= prev_a and abs(e - prev_e) <= 1e-9 * max(abs(e), 1e-12)
                )
                settled_sat = (
                    a > 1e-2
                    and abs(a - prev_a) <= 1e-6 * a
                    and abs(e - prev_e) <= 1e-8 * max(abs(e), 1e-12)
                )
                if settled_sub or settled_sat:
                    break
                prev_a, prev_e = a, e
    except BlowUpError as exc:
        diag = _diag_from(times, en, ens, asym, window, params)
        raise BlowUpError(str(exc), diagnostics=diag) from None

    diag = _diag_from(times, en, ens, asym, window, params)
    return state, diag


def _diag_from(times, en, ens, asym, window, params) -> RunDiagnostics:
    t = np.asarray(times)
    a = np.asarray(asym)
    if t.size:
        tail = t >= (t[-1] - window)
        regime = _classify_series(a[tail])
    else:
        regime = REGIME_APERIODIC
    return RunDiagnostics(
        times=t,
        energy=np.asarray(en),
        enstrophy=np.asarray(ens),
        asymmetry=a,
        regime=regime,
    )


def perturb_symmetry(state: QGState, params: QGParams, sign: int,
                     rel_amplitude: float = 1e-6) -> QGState:
    """Add the lowest S-breaking mode to psi, scaled to the current norm."""
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    ws = _workspace(params)
    amp = sign * rel_amplitude * float(np.linalg.norm(state.psi)) / ws.break_mode_norm
    dpsi = amp * ws.break_mode
    dzeta = laplacian_dirichlet(dpsi, params) - params.lambda_R_inv2 * dpsi
    zeta = (state.q - ws.beta_y) + dzeta
    psi = _invert_zeta(zeta, ws)
    return QGState(psi=psi, q=zeta + ws.beta_y, time=state.time)


def symmetrize(state: QGState, params: QGParams) -> QGState:
    """Project the state onto the S-invariant subspace."""
    ws = _workspace(params)
    psi_sym = 0.5 * (state.psi + mirror_field(state.psi))
    zeta = laplacian_dirichlet(psi_sym, params) - params.lambda_R_inv2 * psi_sym
    psi = _invert_zeta(zeta, ws)  # keeps psi/q consistent in the discrete basis
    return QGState(psi=psi, q=zeta + ws.beta_y, time=state.time)


def bifurcation_scan(
    params: QGParams,
    tau_w_values: List[float],
    sign: int,
    t_max: float = 1500.0,
    window: float = 40.0,
    asym_threshold: float = 1e-4,
    keep_states: bool = False,
) -> BranchTable:
    """Warm-started scan over wind stress with one perturbation sign.

    Each point restarts from the previous converged state projected back
    onto the symmetric subspace, then seeded with the signed perturbation;
    otherwise asymmetry remnants of the previous point would override the
    seed near onset.  tau_c is the midpoint between the last sub-threshold
    and first super-threshold point.
    """
    vals = list(tau_w_values)
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("tau_w_values must be sorted ascending")
    table = BranchTable(sign=sign)
    state = rest_state(replace(params, tau_w=vals[0]))
    for tw in vals:
        p_i = replace(params, tau_w=tw)
        start = perturb_symmetry(symmetrize(state, p_i), p_i, sign)
        try:
            final, diag = run_to_regime(
                p_i, start, t_max=t_max, window=window, stop_when_steady=True
            )
        except BlowUpError as exc:
            diag = exc.diagnostics
            a = float(diag.asymmetry[-1]) if diag is not None and diag.asymmetry.size else float("nan")
            table.points.append(
                BranchPoint(tau_w=tw, asymmetry=a, signed_asymmetry=a,
                            regime=REGIME_APERIODIC,
                            energy=float("nan"), steps=0, blown_up=True)
            )
            continue
        table.points.append(
            BranchPoint(
                tau_w=tw,
                asymmetry=asymmetry_norm(final.psi),
                signed_asymmetry=signed_asymmetry(final.psi, p_i),
                regime=diag.regime,
                energy=energy(final, p_i),
                steps=int(round((final.time - start.time) / p_i.dt)),
                final_psi=final.psi.copy() if keep_states else None,
            )
        )
        state = final

    last_sub = first_super = None
    for pt in table.points:
        if pt.blown_up:
            continue
        if pt.asymmetry < asym_threshold:
            last_sub = pt.tau_w if first_super is None else last_sub
        elif first_super is None:
            first_super = pt.tau_w
    if last_sub is not None and first_super is not None:
        table.tau_c = 0.5 * (last_sub + first_super)
    return table
