"""Random-attractor analysis for the noisy circle map.

Pullback ensembles realize the attractor at time 0 by releasing points far
in the past on the shifted noise path; the stationary density plus its
support decomposition, the pullback cluster count and the Lyapunov sign are
combined into an attractor classification (random fixed point vs. random
periodic orbit), and pairs of reports get a stochastic-conjugacy verdict
from the sign of the exponent and the orientation degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .circle import (
    CircleParams,
    Convention,
    Orbit,
    circle_distance,
    derivative_at,
    lyapunov_exponent,
    rotation_number,
)
from .noise import NoisePath
from .sweep import detect_locking, _default_tol

KIND_RANDOM_FIXED_POINT = "random_fixed_point"
KIND_RANDOM_PERIODIC_ORBIT = "random_periodic_orbit"
KIND_UNDETERMINED = "undetermined"
KIND_DETERMINISTIC = "deterministic"

VERDICT_CONJUGATE = "conjugate"
VERDICT_NOT_CONJUGATE = "not_conjugate"
VERDICT_UNDETERMINED = "undetermined"


@dataclass
class PullbackRun:
    params: CircleParams
    path: NoisePath
    T: int
    ensemble0: np.ndarray
    positions_at_0: np.ndarray
    diameter_history: np.ndarray


@dataclass
class SyncRun:
    params: CircleParams
    trajectories: np.ndarray  # (n+1, m)
    sup_pairwise_distance: np.ndarray  # (n+1,)


@dataclass
class DensityEstimate:
    params: CircleParams
    bins: int
    weights: np.ndarray
    n_samples: int


class SupportDecomposition(NamedTuple):
    components: int
    full_circle: bool


class DegreeSequence(NamedTuple):
    signs: np.ndarray  # int8 in {-1, 0, +1}
    orientation_preserving: bool


@dataclass(frozen=True)
class ClassifyProtocol:
    """Estimation settings for classify_attractor."""

    pdf_n: int = 1_000_000
    pdf_burn_in: int = 5_000
    bins: int = 512
    mass_threshold: Optional[float] = None  # None -> 0.1/bins
    pullback_T: int = 4_000
    ensemble_m: int = 32
    lyap_n: int = 400_000
    lyap_burn_in: int = 2_000
    degree_n: int = 20_000
    cluster_gap_floor: float = 1e-4
    x0: float = 0.17

    def threshold(self) -> float:
        return self.mass_threshold if self.mass_threshold is not None else 0.1 / self.bins


@dataclass
class AttractorReport:
    """Classification of the random attractor at one parameter point.

    kind "deterministic" is the sigma=0 short circuit: the point is
    classified by its tongue label (in ``tongue``) instead of the random
    machinery, and the support/cluster fields stay None.
    """

    kind: str
    q: Optional[int]
    lyapunov: float
    support_components: Optional[int]
    full_circle: Optional[bool]
    cluster_count: Optional[int]
    orientation_preserving: Optional[bool]
    sigma: float
    convention: Convention
    deterministic: bool = False
    tongue: Optional[Tuple[int, int]] = None
    rho: Optional[float] = None

    def record(self) -> dict:
        """One-line JSON record (kind, q, lyapunov, components, clusters,
        orientation) plus provenance fields."""
        return {
            "kind": self.kind,
            "q": self.q,
            "lyapunov": self.lyapunov,
            "components": self.support_components,
            "clusters": self.cluster_count,
            "orientation": self.orientation_preserving,
            "sigma": self.sigma,
            "convention": self.convention.value,
            "deterministic": self.deterministic,
            "tongue": list(self.tongue) if self.tongue else None,
            "rho": self.rho,
        }


def pullback_ensemble(
    p: CircleParams, path: NoisePath, T: int, m: int
) -> PullbackRun:
    """Release m equispaced points at time -T on the shifted path theta^{-T}
    and iterate them to time 0, recording the ensemble diameter each step.

    The lattice is cell-centered ((i+1/2)/m), so deterministic runs do not
    pin a member on the unstable fixed point at a lattice node."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if m < 2:
        raise ValueError("m must be >= 2")
    x0s = (np.arange(m, dtype=np.float64) + 0.5) / m
    shifted = path.shift(-T)
    finals, diam = _kernels.pullback_run(
        x0s, p.tau, p.eps_eff, p.sigma, shifted.seed, shifted.offset, T
    )
    return PullbackRun(
        params=p,
        path=path,
        T=T,
        ensemble0=x0s,
        positions_at_0=finals,
        diameter_history=diam,
    )


def synchronization_run(
    p: CircleParams, path: NoisePath, x0s: Sequence[float], n: int
) -> SyncRun:
    """Iterate m orbits forward under the SAME noise realization."""
    xs = np.asarray(x0s, dtype=np.float64)
    if xs.ndim != 1 or xs.shape[0] < 2:
        raise ValueError("need at least two initial points")
    if np.any(xs < 0.0) or np.any(xs >= 1.0):
        raise ValueError("initial points must lie in [0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    traj, sup = _kernels.sync_paths(
        xs, p.tau, p.eps_eff, p.sigma, path.seed, path.offset, n
    )
    return SyncRun(params=p, trajectories=traj, sup_pairwise_distance=sup)


def stationary_pdf(
    p: CircleParams,
    path: NoisePath,
    n: int = 1_000_000,
    burn_in: int = 5_000,
    bins: int = 512,
    x0: float = 0.17,
) -> DensityEstimate:
    """Normalized occupation histogram of one long orbit."""
    if bins < 8:
        raise ValueError("bins must be >= 8")
    if n < 10 * bins:
        raise ValueError("n must be much larger than bins (>= 10*bins)")
    counts = _kernels.pdf_counts(
        x0, p.tau, p.eps_eff, p.sigma, path.seed, path.offset, n, burn_in, bins
    )
    return DensityEstimate(params=p, bins=bins, weights=counts / n, n_samples=n)


def support_components(
    d: DensityEstimate, mass_threshold: Optional[float] = None
) -> SupportDecomposition:
    """Count maximal cyclic runs of bins above the mass threshold."""
    thr = mass_threshold if mass_threshold is not None else 0.1 / d.bins
    if not (0.0 < thr < 1.0):
        raise ValueError("mass_threshold must lie in (0, 1)")
    occ = d.weights > thr
    if not occ.any():
        raise ValueError("degenerate density estimate: no bin above threshold")
    if occ.all():
        return SupportDecomposition(components=1, full_circle=True)
    # cyclic run starts: occupied bin whose predecessor (mod bins) is empty
    starts = int(np.count_nonzero(occ & ~np.roll(occ, 1)))
    return SupportDecomposition(components=starts, full_circle=False)


def _count_clusters(positions: np.ndarray, gap_floor: float) -> int:
    """Single-linkage cluster count on the circle.

    The gap threshold is 10x the within-cluster collapse scale (median
    nearest-neighbour distance), floored at ``gap_floor``: after a deep
    pullback the within-cluster spread is exponentially small while
    inter-cluster gaps are O(1/q).
    """
    s = np.sort(positions)
    gaps = np.diff(np.concatenate([s, [s[0] + 1.0]]))
    nn = np.minimum(gaps, np.roll(gaps, 1))
    thr = max(gap_floor, 10.0 * float(np.median(nn)))
    k = int(np.count_nonzero(gaps > thr))
    return max(k, 1)


def decide_kind(
    support: SupportDecomposition, clusters: int, lam: float
) -> Tuple[str, Optional[int]]:
    """Attractor kind from support decomposition, cluster count and Lyapunov
    sign; kind is set only when support and cluster evidence agree."""
    if lam < 0.0:
        if clusters == 1 and (support.full_circle or support.components == 1):
            return KIND_RANDOM_FIXED_POINT, 1
        if not support.full_circle and support.components == clusters >= 2:
            return KIND_RANDOM_PERIODIC_ORBIT, clusters
    return KIND_UNDETERMINED, None


def degree_sequence(orbit: Orbit, p: CircleParams) -> DegreeSequence:
    """Signs of F' along the orbit; the 1-D degree of each random map."""
    pts = np.asarray(orbit.points)
    if pts.size == 0:
        raise ValueError("orbit is empty")
    der = 1.0 - 2.0 * math.pi * p.eps_eff * np.cos(2.0 * math.pi * pts)
    signs = np.sign(der).astype(np.int8)  # 0 marks a non-invertible point
    return DegreeSequence(signs=signs, orientation_preserving=bool(np.all(signs == 1)))


def classify_attractor(
    p: CircleParams,
    path: NoisePath,
    protocol: ClassifyProtocol = ClassifyProtocol(),
) -> AttractorReport:
    """Combine support, pullback clusters and the Lyapunov sign.

    sigma == 0 short-circuits to the deterministic tongue label; the random
    classification theorems address the noisy system only.
    """
    if p.sigma == 0.0:
        rho, hw = rotation_number(
            protocol.x0, p, path, k=protocol.lyap_n, burn_in=protocol.lyap_burn_in
        )
        tongue = detect_locking(rho, hw, q_max=50, tol=_default_tol(hw, protocol.lyap_n))
        lam = lyapunov_exponent(
            protocol.x0, p, path, n=protocol.lyap_n, burn_in=protocol.lyap_burn_in
        )
        return AttractorReport(
            kind=KIND_DETERMINISTIC,
            q=tongue[1] if tongue else None,
            lyapunov=lam,
            support_components=None,
            full_circle=None,
            cluster_count=None,
            orientation_preserving=None,
            sigma=p.sigma,
            convention=p.convention,
            deterministic=True,
            tongue=tongue,
            rho=rho,
        )

    dens = stationary_pdf(
        p, path, n=protocol.pdf_n, burn_in=protocol.pdf_burn_in,
        bins=protocol.bins, x0=protocol.x0,
    )
    support = support_components(dens, protocol.threshold())
    run = pullback_ensemble(p, path, T=protocol.pullback_T, m=protocol.ensemble_m)
    clusters = _count_clusters(run.positions_at_0, protocol.cluster_gap_floor)
    lam = lyapunov_exponent(
        protocol.x0, p, path, n=protocol.lyap_n, burn_in=protocol.lyap_burn_in
    )
    from .circle import iterate_orbit  # local import avoids a cycle at module load

    deg = degree_sequence(
        iterate_orbit(protocol.x0, p, path, protocol.degree_n), p
    )

    kind, q = decide_kind(support, clusters, lam)

    return AttractorReport(
        kind=kind,
        q=q,
        lyapunov=lam,
        support_components=support.components,
        full_circle=support.full_circle,
        cluster_count=clusters,
        orientation_preserving=deg.orientation_preserving,
        sigma=p.sigma,
        convention=p.convention,
    )


def conjugacy_verdict(a: AttractorReport, b: AttractorReport) -> str:
    """Stochastic-conjugacy verdict from Lyapunov signs and orientation.

    Conjugate when the exponent signs agree and both cocycles are
    orientation preserving (the degree-mismatch set is then empty, hence a
    coboundary); NotConjugate when the signs differ; Undetermined when the
    orientation flags leave the coboundary question open.
    """
    if a.sigma != b.sigma:
        raise ValueError("reports come from different noise intensities")
    if a.convention is not b.convention:
        raise ValueError("reports come from different conventions")
    if a.deterministic or b.deterministic:
        raise ValueError("conjugacy verdict applies to noisy (sigma > 0) reports")
    sign_a = math.copysign(1.0, a.lyapunov) if a.lyapunov != 0.0 else 0.0
    sign_b = math.copysign(1.0, b.lyapunov) if b.lyapunov != 0.0 else 0.0
    if sign_a != sign_b:
        return VERDICT_NOT_CONJUGATE
    if a.orientation_preserving and b.orientation_preserving:
        return VERDICT_CONJUGATE
    return VERDICT_UNDETERMINED
