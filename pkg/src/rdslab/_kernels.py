"""Compiled inner loops for the circle-map estimators.

Everything here is a straight transcription of the definitions in
``circle``/``noise``; no algorithmic content beyond loop fusion.  The noise
draw must stay bit-identical to ``noise.NoisePath.draw``.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 2.0 ** -53
_TWO_PI = 2.0 * np.pi


@njit(inline="always")
def _draw(seed: np.uint64, idx: np.int64) -> float:
    z = seed + np.uint64(idx) * _GOLD
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    z = z ^ (z >> np.uint64(31))
    return np.float64(z >> np.uint64(11)) * _INV_2_53 - 0.5


@njit(inline="always")
def _wrap(x: float) -> float:
    r = x - np.floor(x)
    if r >= 1.0:  # x just below an integer can round the sum up to 1.0
        r = 0.0
    return r


@njit(cache=True)
def orbit_fill(x0, tau, eps_eff, sigma, seed, offset, n_steps, points, lifted):
    x = x0
    lift = x0
    points[0] = x
    lifted[0] = lift
    for j in range(n_steps):
        w = _draw(np.uint64(seed), np.int64(j + offset + 1))
        d = tau + sigma * w - eps_eff * np.sin(_TWO_PI * x)
        lift += d
        x = _wrap(x + d)
        points[j + 1] = x
        lifted[j + 1] = lift


@njit(cache=True)
def rotation_estimate(x0, tau, eps_eff, sigma, seed, offset, k, burn):
    x = x0
    for j in range(burn):
        w = _draw(np.uint64(seed), np.int64(j + offset + 1))
        x = _wrap(x + tau + sigma * w - eps_eff * np.sin(_TWO_PI * x))
    disp = 0.0
    j0 = (9 * k) // 10  # running quotient tracked over the last 10%
    qmin = np.inf
    qmax = -np.inf
    for j in range(k):
        w = _draw(np.uint64(seed), np.int64(burn + j + offset + 1))
        d = tau + sigma * w - eps_eff * np.sin(_TWO_PI * x)
        disp += d
        x = _wrap(x + d)
        if j >= j0:
            q = disp / (j + 1)
            if q < qmin:
                qmin = q
            if q > qmax:
                qmax = q
    return disp / k, qmax - qmin


@njit(cache=True, parallel=True)
def rotation_batch(taus, epss, sigma, seeds, x0, k, burn, rho_out, hw_out):
    for c in prange(taus.shape[0]):
        rho, hw = rotation_estimate(
            x0, taus[c], epss[c], sigma, seeds[c], 0, k, burn
        )
        rho_out[c] = rho
        hw_out[c] = hw


@njit(cache=True)
def lyapunov_estimate(x0, tau, eps_eff, sigma, seed, offset, n, burn):
    x = x0
    for j in range(burn):
        w = _draw(np.uint64(seed), np.int64(j + offset + 1))
        x = _wrap(x + tau + sigma * w - eps_eff * np.sin(_TWO_PI * x))
    acc = 0.0
    a = _TWO_PI * eps_eff
    for j in range(n):
        der = 1.0 - a * np.cos(_TWO_PI * x)
        ad = abs(der)
        if ad == 0.0:
            return -np.inf
        acc += np.log(ad)
        w = _draw(np.uint64(seed), np.int64(burn + j + offset + 1))
        x = _wrap(x + tau + sigma * w - eps_eff * np.sin(_TWO_PI * x))
    return acc / n


@njit(cache=True)
def pdf_counts(x0, tau, eps_eff, sigma, seed, offset, n, burn, bins):
    counts = np.zeros(bins, dtype=np.int64)
    x = x0
    for j in range(burn):
        w = _draw(np.uint64(seed), np.int64(j + offset + 1))
        x = _wrap(x + tau + sigma * w - eps_eff * np.sin(_TWO_PI * x))
    for j in range(n):
        b = int(x * bins)
        if b >= bins:  # x == 1.0 cannot happen, but guard the cast
            b = bins - 1
        counts[b] += 1
        w = _draw(np.uint64(seed), np.int64(burn + j + offset + 1))
        x = _wrap(x + tau + sigma * w - eps_eff * np.sin(_TWO_PI * x))
    return counts


@njit(inline="always")
def _circle_dist(a: float, b: float) -> float:
    d = abs(a - b)
    if d > 0.5:
        d = 1.0 - d
    return d


@njit(cache=True)
def _ensemble_diameter(xs):
    m = xs.shape[0]
    dia = 0.0
    for i in range(m):
        for j in range(i):
            d = _circle_dist(xs[i], xs[j])
            if d > dia:
                dia = d
    return dia


@njit(cache=True)
def sync_paths(x0s, tau, eps_eff, sigma, seed, offset, n):
    m = x0s.shape[0]
    traj = np.empty((n + 1, m))
    sup = np.empty(n + 1)
    xs = x0s.copy()
    traj[0] = xs
    sup[0] = _ensemble_diameter(xs)
    for j in range(n):
        w = _draw(np.uint64(seed), np.int64(j + offset + 1))
        for i in range(m):
            xs[i] = _wrap(xs[i] + tau + sigma * w - eps_eff * np.sin(_TWO_PI * xs[i]))
        traj[j + 1] = xs
        sup[j + 1] = _ensemble_diameter(xs)
    return traj, sup


@njit(cache=True)
def pullback_run(x0s, tau, eps_eff, sigma, seed, offset, T):
    """Iterate an ensemble T steps on an (already shifted) path.

    Returns the final positions and the diameter history (T+1 entries).
    """
    xs = x0s.copy()
    diam = np.empty(T + 1)
    diam[0] = _ensemble_diameter(xs)
    m = xs.shape[0]
    for j in range(T):
        w = _draw(np.uint64(seed), np.int64(j + offset + 1))
        for i in range(m):
            xs[i] = _wrap(xs[i] + tau + sigma * w - eps_eff * np.sin(_TWO_PI * xs[i]))
        diam[j + 1] = _ensemble_diameter(xs)
    return xs, diam
