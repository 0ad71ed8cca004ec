"""The standard circle-map family, with and without additive noise.

One step of the dynamics is

    x_{n+1} = x_n + tau + sigma*w_n - eps_eff * sin(2 pi x_n)   (mod 1)

where ``w_n`` comes from a :class:`~rdslab.noise.NoisePath` and ``eps_eff``
depends on the nonlinearity convention: ``Literal`` uses the coefficient as
written (loses invertibility at eps = 1/(2 pi)), ``CriticalNormalized``
rescales it by 1/(2 pi) so that eps = 1 is the invertibility boundary.
The two fundamental estimators live here: the rotation number (average
lifted displacement per iterate) and the Lyapunov exponent (average
log-derivative along the orbit).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .noise import NoisePath

TWO_PI = 2.0 * math.pi


class Convention(enum.Enum):
    """How the nonlinearity coefficient is interpreted."""

    LITERAL = "literal"
    CRITICAL_NORMALIZED = "critical_normalized"


@dataclass(frozen=True)
class CircleParams:
    """Parameter tuple (tau, eps, sigma, convention) of the noisy family."""

    tau: float
    eps: float = 0.0
    sigma: float = 0.0
    convention: Convention = Convention.LITERAL

    def __post_init__(self) -> None:
        if not math.isfinite(self.tau):
            raise ValueError("tau must be finite")
        if not (0.0 <= self.eps < 1.0):
            raise ValueError(f"eps must lie in [0, 1), got {self.eps}")
        if not (self.sigma >= 0.0):
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")

    @property
    def eps_eff(self) -> float:
        if self.convention is Convention.LITERAL:
            return self.eps
        return self.eps / TWO_PI

    @property
    def is_diffeomorphism(self) -> bool:
        """True iff the deterministic map is an orientation-preserving diffeo."""
        return TWO_PI * self.eps_eff < 1.0


@dataclass(frozen=True)
class Orbit:
    start: float
    points: np.ndarray
    lifted: Optional[np.ndarray] = None


class RotationEstimate(NamedTuple):
    rho: float
    half_width: float


def _wrap(x: float) -> float:
    r = x - math.floor(x)
    return 0.0 if r >= 1.0 else r


def _check_domain(x: float, name: str = "x") -> None:
    if not (0.0 <= x < 1.0):
        raise ValueError(f"{name} must lie in [0, 1), got {x}")


def map_apply(x: float, p: CircleParams, w: float = 0.0) -> float:
    """One step of the circle map; x must lie in [0, 1)."""
    _check_domain(x)
    return _wrap(x + p.tau + p.sigma * w - p.eps_eff * math.sin(TWO_PI * x))


def lift_apply(x_lifted: float, p: CircleParams, w: float = 0.0) -> float:
    """One step of the lift.  The update is computed on the fractional part
    and the integer part is added back last, so integer translation commutes
    bit-for-bit whenever x+m is itself exactly representable."""
    n = math.floor(x_lifted)
    f = x_lifted - n
    if f >= 1.0:
        f = 0.0
    return (f + p.tau + p.sigma * w - p.eps_eff * math.sin(TWO_PI * f)) + n


def derivative_at(x: float, p: CircleParams) -> float:
    """dF/dx = 1 - 2 pi eps_eff cos(2 pi x); additive noise does not enter."""
    return 1.0 - TWO_PI * p.eps_eff * math.cos(TWO_PI * _wrap(x))


def iterate_orbit(
    x0: float,
    p: CircleParams,
    path: NoisePath,
    n_steps: int,
    keep_lift: bool = False,
) -> Orbit:
    """Iterate n_steps from x0 along ``path`` (draw n drives step n -> n+1)."""
    _check_domain(x0, "x0")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    points = np.empty(n_steps + 1)
    lifted = np.empty(n_steps + 1)
    _kernels.orbit_fill(
        x0, p.tau, p.eps_eff, p.sigma, path.seed, path.offset, n_steps, points, lifted
    )
    return Orbit(start=x0, points=points, lifted=lifted if keep_lift else None)


def rotation_number(
    x0: float,
    p: CircleParams,
    path: NoisePath,
    k: int = 100_000,
    burn_in: int = 1_000,
) -> RotationEstimate:
    """Finite-k rotation number: lifted displacement over the window / k.

    half_width is the max-min spread of the running quotient over the last
    10% of the window — a conservative error band that vanishes for a pure
    rotation and scales like 1/k on locked orbits.
    """
    _check_domain(x0, "x0")
    if k < 1:
        raise ValueError("k must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    rho, hw = _kernels.rotation_estimate(
        x0, p.tau, p.eps_eff, p.sigma, path.seed, path.offset, k, burn_in
    )
    return RotationEstimate(float(rho), float(hw))


def lyapunov_exponent(
    x0: float,
    p: CircleParams,
    path: NoisePath,
    n: int = 100_000,
    burn_in: int = 1_000,
) -> float:
    """(1/n) sum of log|F'(x_k)| over the post-burn-in window.

    Returns -inf if the orbit hits a point with F' == 0 (possible only in
    the non-invertible regime of the Literal convention).
    """
    _check_domain(x0, "x0")
    if n < 1:
        raise ValueError("n must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    return float(
        _kernels.lyapunov_estimate(
            x0, p.tau, p.eps_eff, p.sigma, path.seed, path.offset, n, burn_in
        )
    )


def circle_distance(a: float, b: float) -> float:
    """Arc distance on the circle [0,1), always <= 1/2."""
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)
