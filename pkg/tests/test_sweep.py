import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import numba

from rdslab.circle import CircleParams, Convention, TWO_PI, lift_apply
from rdslab.sweep import (
    BAD_CELL,
    EstimatorProtocol,
    GridSpec,
    Step,
    StaircaseProfile,
    TongueMap,
    _assemble_steps,
    detect_locking,
    locked_fraction,
    scan_tongues,
    staircase,
    step_widths,
)

CN = Convention.CRITICAL_NORMALIZED


def exhaustive_locking(rho, tol, q_max):
    """Oracle: scan every p/q with q <= q_max, lowest denominator first."""
    for q in range(1, q_max + 1):
        for p in range(0, q + 1):
            if math.gcd(p, q) == 1 and abs(rho - p / q) <= tol:
                return (p, q)
    return None


class TestDetectLocking:
    def test_examples(self):
        assert detect_locking(0.5000003, 1e-6, 10, 1e-5) == (1, 2)
        assert detect_locking(0.333341, 1e-4, 10, 1e-4) == (1, 3)

    def test_golden_mean_rejected(self):
        rho = 0.6180339
        assert detect_locking(rho, 1e-7, 20, 1e-7) is None
        assert exhaustive_locking(rho, 1e-7, 20) is None
        # and the nearest q<=20 candidates really are far away
        assert abs(rho - 8 / 13) > 2.5e-3
        assert abs(rho - 13 / 21) > 1e-3  # excluded by q_max anyway

    def test_endpoints(self):
        assert detect_locking(1e-9, 0.0, 5, 1e-6) == (0, 1)
        assert detect_locking(0.9999999, 0.0, 5, 1e-6) == (1, 1)
        assert detect_locking(-0.5, 0.0, 5, 1e-6) is None

    def test_half_width_widens_tolerance(self):
        assert detect_locking(0.52, 0.05, 10, 1e-6) == (1, 2)

    @settings(max_examples=300, deadline=None)
    @given(
        rho=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        tol_exp=st.integers(min_value=2, max_value=7),
        q_max=st.integers(min_value=1, max_value=30),
    )
    def test_matches_exhaustive_oracle(self, rho, tol_exp, q_max):
        tol = 10.0 ** (-tol_exp)
        got = detect_locking(rho, 0.0, q_max, tol)
        want = exhaustive_locking(rho, tol, q_max)
        if want is None:
            assert got is None
        else:
            # both are denominator-minimal; they must agree on q
            assert got is not None
            assert got[1] == want[1]
            assert abs(rho - got[0] / got[1]) <= tol

    def test_validation(self):
        with pytest.raises(ValueError):
            detect_locking(0.5, 0.0, 0, 1e-6)
        with pytest.raises(ValueError):
            detect_locking(0.5, 0.0, 5, 0.0)


class TestScanTongues:
    def test_eps0_row_locks_only_near_rationals(self):
        spec = GridSpec(
            tau_lo=0.0, tau_hi=0.9995, n_tau=200, eps_lo=0.0, eps_hi=0.0,
            n_eps=1, sigma=0.0, k=4_000, burn_in=0, seed=1, tol=1e-6,
        )
        tm = scan_tongues(spec)
        taus = spec.tau_values()
        for j, tau in enumerate(taus):
            lab = tm.locking(0, j)
            if lab is not None:
                p, q = lab
                assert abs(tau - p / q) <= 1e-6 + 1.0 / 4_000
        frac = locked_fraction(tm, 0)
        assert frac < 0.2  # only grid points that happen to sit on rationals

    def test_period1_tongue_extent_literal(self):
        # oracle: tau = eps*sin(2 pi x) is solvable iff |tau| <= eps
        eps = 0.1
        spec = GridSpec(
            tau_lo=-0.2, tau_hi=0.2, n_tau=161, eps_lo=eps, eps_hi=eps,
            n_eps=1, sigma=0.0, k=20_000, burn_in=2_000, seed=3,
        )
        tm = scan_tongues(spec)
        taus = spec.tau_values()
        cell = taus[1] - taus[0]
        locked = np.array([tm.locking(0, j) == (0, 1) for j in range(len(taus))])
        lo, hi = taus[locked].min(), taus[locked].max()
        assert abs(lo - (-eps)) <= cell + 1e-12
        assert abs(hi - eps) <= cell + 1e-12

    def test_determinism_across_workers(self):
        spec = GridSpec(
            tau_lo=0.0, tau_hi=1.0, n_tau=64, eps_lo=0.1, eps_hi=0.8,
            n_eps=5, sigma=0.1, convention=CN, k=2_000, burn_in=200, seed=9,
        )
        numba.set_num_threads(1)
        a = scan_tongues(spec)
        numba.set_num_threads(min(8, numba.config.NUMBA_NUM_THREADS))
        b = scan_tongues(spec)
        assert np.array_equal(a.rho, b.rho)
        assert np.array_equal(a.half_width, b.half_width)
        assert np.array_equal(a.lock_p, b.lock_p)
        assert np.array_equal(a.lock_q, b.lock_q)

    def test_bad_cells_flagged_not_omitted(self):
        spec = GridSpec(
            tau_lo=0.0, tau_hi=0.5, n_tau=8, eps_lo=0.05, eps_hi=0.5,
            n_eps=4, sigma=0.0, convention=Convention.LITERAL,
            k=500, burn_in=50, seed=2,
        )
        tm = scan_tongues(spec)
        epss = spec.eps_values()
        for i, eps in enumerate(epss):
            if TWO_PI * eps >= 1.0:
                assert np.all(tm.lock_q[i] == BAD_CELL)
                assert np.all(np.isfinite(tm.rho[i]))
            else:
                assert np.all(tm.lock_q[i] >= 0)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            GridSpec(tau_lo=1.0, tau_hi=0.0, n_tau=10, eps_lo=0.0,
                     eps_hi=0.5, n_eps=3)
        with pytest.raises(ValueError):
            GridSpec(tau_lo=0.0, tau_hi=1.0, n_tau=10, eps_lo=0.0,
                     eps_hi=1.2, n_eps=3)


def second_iterate_locked(tau, eps_eff, samples=4001):
    """Oracle for 1/2 locking: the second-iterate lift displacement g(x) =
    F~(F~(x)) - x - 1 changes sign (or touches 0) somewhere on the circle."""
    p = CircleParams(tau=tau, eps=eps_eff, convention=Convention.LITERAL)
    xs = np.linspace(0.0, 1.0, samples, endpoint=False)
    g = np.array([lift_apply(lift_apply(x, p), p) - x - 1.0 for x in xs])
    return g.min() <= 0.0 <= g.max()


def half_tongue_width_oracle(eps_eff):
    """Bisection on the edges of the 1/2 tongue via the second-iterate oracle."""
    lo, hi = 0.5, 0.75
    assert second_iterate_locked(lo, eps_eff) and not second_iterate_locked(hi, eps_eff)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if second_iterate_locked(mid, eps_eff):
            lo = mid
        else:
            hi = mid
    return 2.0 * (0.5 * (lo + hi) - 0.5)  # symmetric about tau = 1/2


class TestStaircase:
    def test_eps0_has_no_wide_steps(self):
        taus = np.linspace(0.0, 1.0, 400, endpoint=False)
        prof = staircase(0.0, 0.0, taus, EstimatorProtocol(k=2_000, burn_in=0, seed=1, tol=1e-9))
        spacing = taus[1] - taus[0]
        assert all(s.width <= spacing + 1e-12 for s in prof.steps)

    def test_monotone_rho_deterministic(self):
        taus = np.linspace(0.0, 1.0, 300, endpoint=False)
        prof = staircase(0.12, 0.0, taus, EstimatorProtocol(k=10_000, burn_in=1_000, seed=4))
        rho = prof.rho_values
        hw = prof.half_widths
        for j in range(len(rho) - 1):
            assert rho[j + 1] >= rho[j] - 2.0 * (hw[j] + hw[j + 1]) - 2e-4

    def test_wrapped_period1_step_width(self):
        eps = 0.12
        taus = np.linspace(0.0, 1.0, 2000, endpoint=False)
        prof = staircase(eps, 0.0, taus, EstimatorProtocol(k=20_000, burn_in=2_000, seed=5))
        widest = step_widths(prof, 0.01)[0]
        p, q, width = widest
        assert (p, q) == (0, 1)
        # fixed-point condition gives half-width eps on each side of 0
        assert abs(width - 2 * eps) <= 3.0 / 2000 + 1e-9

    def test_step_ordering_against_second_iterate_oracle(self):
        eps = 0.5  # CriticalNormalized -> eps_eff = 0.5/(2 pi)
        eps_eff = eps / TWO_PI
        taus = np.linspace(0.0, 1.0, 1500, endpoint=False)
        prof = staircase(
            eps, 0.0, taus,
            EstimatorProtocol(k=20_000, burn_in=2_000, seed=6, convention=CN),
        )
        widths = {(p, q): w for p, q, w in step_widths(prof, 1e-3)}
        assert (0, 1) in widths and (1, 2) in widths
        assert widths[(1, 2)] < widths[(0, 1)]
        oracle_half = half_tongue_width_oracle(eps_eff)
        assert abs(widths[(1, 2)] - oracle_half) <= 3.0 / 1500
        # period-1 width is 2*eps_eff by the fixed-point condition
        assert abs(widths[(0, 1)] - 2 * eps_eff) <= 3.0 / 1500

    def test_locked_fraction_monotone_in_eps(self):
        fracs = []
        for eps in (0.02, 0.05, 0.10):
            spec = GridSpec(
                tau_lo=0.0, tau_hi=1.0, n_tau=400, eps_lo=eps, eps_hi=eps,
                n_eps=1, sigma=0.0, k=15_000, burn_in=1_500, seed=8,
            )
            fracs.append(locked_fraction(scan_tongues(spec), 0))
        assert fracs[0] <= fracs[1] <= fracs[2]

    def test_full_row_locked_fraction_is_one(self):
        spec = GridSpec(tau_lo=0.0, tau_hi=1.0, n_tau=4, eps_lo=0.0,
                        eps_hi=0.0, n_eps=1, k=10, burn_in=0)
        tm = TongueMap(
            spec=spec,
            rho=np.zeros((1, 4)),
            half_width=np.zeros((1, 4)),
            lock_p=np.zeros((1, 4), dtype=np.int32),
            lock_q=np.ones((1, 4), dtype=np.int32),
        )
        assert locked_fraction(tm, 0) == 1.0

    def test_unsorted_samples_rejected(self):
        with pytest.raises(ValueError):
            staircase(0.1, 0.0, [0.3, 0.2, 0.5])


class TestStepAssembly:
    def test_isolated_labels_dropped(self):
        taus = np.linspace(0.0, 0.5, 6)
        labels = [None, (1, 2), None, (1, 3), (1, 3), None]
        steps = _assemble_steps(taus, labels)
        assert steps == [Step(1, 3, taus[3], taus[4], taus[4] - taus[3])]

    def test_wrap_merge(self):
        taus = np.linspace(0.0, 1.0, 11)  # spans the full circle
        labels = [(0, 1), (0, 1), None, (1, 2), (1, 2), None,
                  None, None, (1, 1), (1, 1), (1, 1)]
        steps = _assemble_steps(taus, labels)
        assert steps[0].p == 0 and steps[0].q == 1
        assert steps[0].tau_lo == taus[8] and steps[0].tau_hi == taus[1]
        assert steps[0].width == pytest.approx((taus[1] - taus[0]) + (taus[10] - taus[8]))
        assert steps[1] == Step(1, 2, taus[3], taus[4], pytest.approx(0.1))

    def test_no_wrap_merge_on_partial_range(self):
        taus = np.linspace(0.0, 0.5, 11)
        labels = [(0, 1)] * 3 + [None] * 5 + [(1, 1)] * 3
        steps = _assemble_steps(taus, labels)
        assert len(steps) == 2

    def test_step_widths_validation(self):
        prof = StaircaseProfile(
            eps=0.0, sigma=0.0, convention=Convention.LITERAL,
            tau_values=np.array([0.0, 0.1]), rho_values=np.array([0.0, 0.1]),
            half_widths=np.zeros(2), labels=[None, None], steps=[],
        )
        with pytest.raises(ValueError):
            step_widths(prof, 0.0)
