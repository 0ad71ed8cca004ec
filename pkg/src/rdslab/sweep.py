"""Parameter-plane engine: tongue scans, staircases, mode-locking detection.

Every grid cell / staircase sample gets its own noise substream derived from
(seed, cell index), so a scan is a pure function of its spec no matter how
many threads execute it.  Results are written by cell index, never by
arrival order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import _kernels, __version__
from .circle import TWO_PI, Convention
from .noise import derive_seeds_array

BAD_CELL = -1  # lock_q sentinel: parameters not a diffeomorphism
UNLOCKED = 0


def detect_locking(
    rho: float, half_width: float, q_max: int = 50, tol: float = 1e-5
) -> Optional[Tuple[int, int]]:
    """Lowest-denominator p/q with q <= q_max and |rho - p/q| <= max(tol, hw).

    Stern-Brocot descent: walk the mediant tree toward rho and return the
    first fraction inside the tolerance interval; that fraction is the
    simplest rational in the interval, so the result is denominator-minimal
    by construction.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    t = max(tol, half_width)
    lo, hi = rho - t, rho + t
    if hi < 0.0 or lo > 1.0:
        return None
    if lo <= 0.0 <= hi:
        return (0, 1)
    if lo <= 1.0 <= hi:
        return (1, 1)
    a, b, c, d = 0, 1, 1, 1
    while True:
        p, q = a + c, b + d
        if q > q_max:
            return None
        m = p / q
        if m < lo:
            a, b = p, q
        elif m > hi:
            c, d = p, q
        else:
            return (p, q)


def _default_tol(half_width: float, k: int) -> float:
    # 10x the estimator band, floored at the finite-k resolution of rho
    return max(10.0 * half_width, 2.0 / k)


@dataclass(frozen=True)
class EstimatorProtocol:
    """Rotation-number estimation settings shared by scans and staircases."""

    k: int = 100_000
    burn_in: int = 1_000
    seed: int = 0
    x0: float = 0.17
    q_max: int = 50
    tol: Optional[float] = None  # None -> max(10*half_width, 2/k) per cell
    convention: Convention = Convention.LITERAL

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if not (0.0 <= self.x0 < 1.0):
            raise ValueError("x0 must lie in [0, 1)")
        if self.q_max < 1:
            raise ValueError("q_max must be >= 1")

    def effective_tol(self, half_width: float) -> float:
        if self.tol is not None:
            return self.tol
        return _default_tol(half_width, self.k)


@dataclass(frozen=True)
class GridSpec:
    """A (tau, eps) grid plus the estimator protocol that fills it."""

    tau_lo: float
    tau_hi: float
    n_tau: int
    eps_lo: float
    eps_hi: float
    n_eps: int
    sigma: float = 0.0
    convention: Convention = Convention.LITERAL
    k: int = 100_000
    burn_in: int = 1_000
    seed: int = 0
    q_max: int = 50
    tol: Optional[float] = None
    x0: float = 0.17

    def __post_init__(self) -> None:
        if not (self.tau_lo < self.tau_hi):
            raise ValueError("tau range must satisfy lo < hi")
        if not (self.eps_lo <= self.eps_hi):
            raise ValueError("eps range must satisfy lo <= hi")
        if self.n_tau < 2 or (self.n_eps < 2 and self.eps_lo != self.eps_hi):
            raise ValueError("grid counts must be >= 2")
        if self.n_eps < 1:
            raise ValueError("n_eps must be >= 1")
        if not (0.0 <= self.eps_lo and self.eps_hi < 1.0):
            raise ValueError("eps range must lie within [0, 1)")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")
        if self.k < 1 or self.burn_in < 0:
            raise ValueError("estimator window invalid")

    def tau_values(self) -> np.ndarray:
        return np.linspace(self.tau_lo, self.tau_hi, self.n_tau)

    def eps_values(self) -> np.ndarray:
        if self.n_eps == 1:
            return np.array([self.eps_lo])
        return np.linspace(self.eps_lo, self.eps_hi, self.n_eps)

    def protocol(self) -> EstimatorProtocol:
        return EstimatorProtocol(
            k=self.k,
            burn_in=self.burn_in,
            seed=self.seed,
            x0=self.x0,
            q_max=self.q_max,
            tol=self.tol,
            convention=self.convention,
        )


@dataclass
class TongueMap:
    """Dense rotation-number and locking tables over a GridSpec.

    lock_q semantics: q > 0 locked to lock_p/lock_q; 0 unlocked;
    -1 bad cell (parameters outside the diffeomorphism regime).
    """

    spec: GridSpec
    rho: np.ndarray
    half_width: np.ndarray
    lock_p: np.ndarray
    lock_q: np.ndarray
    meta: dict = field(default_factory=dict)

    def locking(self, i_eps: int, i_tau: int) -> Optional[Tuple[int, int]]:
        q = int(self.lock_q[i_eps, i_tau])
        if q <= 0:
            return None
        return int(self.lock_p[i_eps, i_tau]), q


class Step(NamedTuple):
    """One detected staircase plateau; tau_lo > tau_hi marks a wrapped step."""

    p: int
    q: int
    tau_lo: float
    tau_hi: float
    width: float


@dataclass
class StaircaseProfile:
    eps: float
    sigma: float
    convention: Convention
    tau_values: np.ndarray
    rho_values: np.ndarray
    half_widths: np.ndarray
    labels: List[Optional[Tuple[int, int]]]
    steps: List[Step]


def _eps_eff(eps: float, convention: Convention) -> float:
    return eps if convention is Convention.LITERAL else eps / TWO_PI


def _is_diffeo(eps: float, convention: Convention) -> bool:
    return TWO_PI * _eps_eff(eps, convention) < 1.0


def _rotation_row(
    taus: np.ndarray, eps: float, sigma: float, seeds: np.ndarray, proto: EstimatorProtocol
) -> Tuple[np.ndarray, np.ndarray]:
    epss = np.full(taus.shape[0], _eps_eff(eps, proto.convention))
    rho = np.empty(taus.shape[0])
    hw = np.empty(taus.shape[0])
    _kernels.rotation_batch(
        np.ascontiguousarray(taus, dtype=np.float64),
        epss,
        float(sigma),
        np.ascontiguousarray(seeds, dtype=np.uint64),
        proto.x0,
        proto.k,
        proto.burn_in,
        rho,
        hw,
    )
    return rho, hw


def scan_tongues(spec: GridSpec) -> TongueMap:
    """Fill the whole (eps, tau) grid; deterministic in spec, thread-safe."""
    taus = spec.tau_values()
    epss = spec.eps_values()
    n_eps, n_tau = epss.shape[0], taus.shape[0]
    proto = spec.protocol()
    seeds = derive_seeds_array(spec.seed, n_eps * n_tau).reshape(n_eps, n_tau)

    rho = np.empty((n_eps, n_tau))
    hw = np.empty((n_eps, n_tau))
    lock_p = np.zeros((n_eps, n_tau), dtype=np.int32)
    lock_q = np.zeros((n_eps, n_tau), dtype=np.int32)

    for i, eps in enumerate(epss):
        r, h = _rotation_row(taus, eps, spec.sigma, seeds[i], proto)
        rho[i] = r
        hw[i] = h
        if not _is_diffeo(eps, spec.convention):
            lock_q[i, :] = BAD_CELL
            continue
        for j in range(n_tau):
            lab = detect_locking(
                r[j], h[j], spec.q_max, proto.effective_tol(h[j])
            )
            if lab is not None:
                lock_p[i, j], lock_q[i, j] = lab

    meta = {"seed": spec.seed, "code_version": __version__}
    return TongueMap(spec=spec, rho=rho, half_width=hw,
                     lock_p=lock_p, lock_q=lock_q, meta=meta)


def _assemble_steps(
    taus: np.ndarray, labels: List[Optional[Tuple[int, int]]]
) -> List[Step]:
    """Merge runs of identical labels; drop isolated single-sample labels;
    merge the wrap-around pair when the samples cover the full circle."""
    steps: List[Step] = []
    i = 0
    n = len(labels)
    while i < n:
        lab = labels[i]
        if lab is None:
            i += 1
            continue
        j = i
        while j + 1 < n and labels[j + 1] == lab:
            j += 1
        if j > i:  # single-sample runs are estimator noise
            steps.append(Step(lab[0], lab[1], float(taus[i]), float(taus[j]),
                              float(taus[j] - taus[i])))
        i = j + 1

    if len(steps) >= 2 and n >= 2:
        spacing = (taus[-1] - taus[0]) / (n - 1)
        covers_circle = (taus[-1] - taus[0]) >= 1.0 - 2.0 * spacing
        first, last = steps[0], steps[-1]
        same_class = (
            first.q == last.q
            and (first.p % first.q) == (last.p % last.q)
        )
        touches_ends = first.tau_lo == taus[0] and last.tau_hi == taus[-1]
        if covers_circle and same_class and touches_ends and first is not last:
            merged = Step(
                first.p % first.q,
                first.q,
                last.tau_lo,
                first.tau_hi,
                first.width + last.width,
            )
            steps = [merged] + steps[1:-1]
    return steps


def staircase(
    eps: float,
    sigma: float,
    tau_samples: Sequence[float],
    protocol: EstimatorProtocol = EstimatorProtocol(),
) -> StaircaseProfile:
    """Rotation number along a tau cross-section at fixed eps and sigma."""
    taus = np.asarray(tau_samples, dtype=np.float64)
    if taus.ndim != 1 or taus.shape[0] < 2:
        raise ValueError("tau_samples must be a 1-D sequence of length >= 2")
    if np.any(np.diff(taus) <= 0):
        raise ValueError("tau_samples must be strictly increasing")
    seeds = derive_seeds_array(protocol.seed, taus.shape[0])
    rho, hw = _rotation_row(taus, eps, sigma, seeds, protocol)
    diffeo = _is_diffeo(eps, protocol.convention)
    labels: List[Optional[Tuple[int, int]]] = []
    for j in range(taus.shape[0]):
        if not diffeo:
            labels.append(None)
            continue
        labels.append(
            detect_locking(rho[j], hw[j], protocol.q_max, protocol.effective_tol(hw[j]))
        )
    steps = _assemble_steps(taus, labels)
    return StaircaseProfile(
        eps=eps,
        sigma=sigma,
        convention=protocol.convention,
        tau_values=taus,
        rho_values=rho,
        half_widths=hw,
        labels=labels,
        steps=steps,
    )


def step_widths(profile: StaircaseProfile, w_min: float) -> List[Tuple[int, int, float]]:
    """Steps at least w_min wide, widest first."""
    if w_min <= 0.0:
        raise ValueError("w_min must be > 0")
    out = [(s.p, s.q, s.width) for s in profile.steps if s.width >= w_min]
    out.sort(key=lambda t: (-t[2], t[1], t[0]))
    return out


def locked_fraction(tongue_map: TongueMap, eps_index: int) -> float:
    """Fraction of tau-cells in one eps-row carrying a locking label."""
    row = tongue_map.lock_q[eps_index]
    if row.shape[0] == 0:
        raise ValueError("row is empty")
    return float(np.count_nonzero(row > 0) / row.shape[0])
