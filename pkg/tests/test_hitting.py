import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import unit
from sskdyn.ensembles import InitialCondition, WignerSpec, sample_initial, sample_wigner
from sskdyn.errors import DegenerateInputError, DomainError, NotHitError
from sskdyn.hitting import (
    HittingRecord,
    abs_ratio_gap,
    default_power_cap,
    fit_scaling,
    gd_bounds,
    gd_hitting_time,
    gd_ode_oracle,
    hitting_records,
    overlap_closed_form,
    overlaps,
    power_bounds,
    power_hitting_time,
    power_overlap_closed_form,
    scaled_initial_overlaps,
    scaling_experiment,
    sum_ratio_frequency,
)
from sskdyn.spectral import SpectralData, eig_sym

TWO = SpectralData(np.array([-1.0, 1.0]), np.eye(2))
H_EQ = unit([1.0, 1.0])
T_TWO = math.log(1 / (1 / 0.81 - 1)) / 8


def goe_instance(N, seed):
    J = sample_wigner(WignerSpec(N=N, seed=seed))
    x0 = sample_initial(InitialCondition(seed=seed + 1000), N)
    return J, eig_sym(J), x0


class TestOverlap:
    def test_initial(self):
        J, sp, x0 = goe_instance(30, 1)
        for j in (0, 7, 29):
            assert overlap_closed_form(sp, x0, 0.0, j) == pytest.approx(abs(sp.eigenvectors[:, j] @ x0), rel=1e-13)

    def test_two_level(self):
        for t in (0.0, 0.1, 0.5, 3.0):
            assert overlap_closed_form(TWO, H_EQ, t, 0) == pytest.approx(1 / math.sqrt(1 + math.exp(-8 * t)), rel=1e-14)

    def test_long_time(self):
        sp = SpectralData(np.linspace(-2, 2, 50), np.eye(50))
        x0 = sample_initial(InitialCondition(seed=2), 50)
        assert overlap_closed_form(sp, x0, 100.0, 0) == pytest.approx(1.0, abs=1e-10)
        assert overlap_closed_form(sp, x0, 1e6, 0) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("t", [0.0, 1.0, 10.0, 100.0])
    def test_normalized(self, t):
        J, sp, x0 = goe_instance(80, 3)
        assert np.sum(overlaps(sp, x0, t) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_monotone(self):
        J, sp, x0 = goe_instance(120, 4)
        h = [overlap_closed_form(sp, x0, t, 0) for t in np.linspace(0, 50, 200)]
        assert np.all(np.diff(h) >= -1e-15)

    def test_non_unit(self):
        with pytest.raises(DomainError):
            overlap_closed_form(TWO, [1.0, 1.0], 0.0, 0)

    def test_rk4_oracle(self):
        J, sp, x0 = goe_instance(50, 5)
        rec = []
        gd_ode_oracle(J, x0, 2.0, 1e-4, record=rec)
        worst = 0.0
        for t, x in rec[::500]:
            assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-10)
            worst = max(worst, np.max(np.abs(np.abs(sp.eigenvectors.T @ x) - overlaps(sp, x0, t))))
        assert worst <= 1e-6

    def test_rk4_zero_field(self):
        x0 = unit(np.arange(1.0, 6.0))
        np.testing.assert_allclose(gd_ode_oracle(np.zeros((5, 5)), x0, 1.0, 0.01), x0, atol=1e-15)


class TestGdHitting:
    def test_already_past(self):
        x0 = np.array([0.9, math.sqrt(1 - 0.81)])
        assert gd_hitting_time(TWO, x0, 0.5) == 0.0

    def test_two_level(self):
        assert gd_hitting_time(TWO, H_EQ, 0.9) == pytest.approx(T_TWO, abs=1e-9)
        assert T_TWO == pytest.approx(0.18125127, abs=1e-8)

    def test_root_definition(self):
        for seed in range(5):
            J, sp, x0 = goe_instance(150, seed)
            T = gd_hitting_time(sp, x0, 0.5)
            assert overlap_closed_form(sp, x0, T, 0) == pytest.approx(0.5, abs=1e-8)

    def test_errors(self):
        with pytest.raises(DegenerateInputError):
            gd_hitting_time(TWO, np.array([0.0, 1.0]), 0.5)
        with pytest.raises(DomainError):
            gd_hitting_time(TWO, H_EQ, 1.0)

    def test_two_level_bounds_are_tight(self):
        b = gd_bounds(TWO, H_EQ, 0.9, k=2)
        assert b["lower"] == pytest.approx(T_TWO, rel=1e-12)
        assert b["upper"] == pytest.approx(T_TWO, rel=1e-12)

    def test_lower_clamps(self):
        x0 = np.array([0.9, math.sqrt(1 - 0.81)])
        assert gd_bounds(TWO, x0, 0.5, k=2)["lower"] == 0.0

    def test_degenerate_gap(self):
        sp = SpectralData(np.array([1.0, 1.0, 2.0]), np.eye(3))
        with pytest.raises(DegenerateInputError):
            gd_bounds(sp, unit([1, 1, 1]), 0.5, k=2)

    def test_sandwich(self):
        for seed in range(100):
            J, sp, x0 = goe_instance(200, 10 * seed)
            T = gd_hitting_time(sp, x0, 0.5)
            b = gd_bounds(sp, x0, 0.5, k=5)
            assert b["lower"] <= T <= b["upper"]


class TestPower:
    def test_two_level(self):
        sp = SpectralData(np.array([0.5, 1.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert power_hitting_time(sp, H_EQ, 0.9) == 2
        abs_sp = sp.by_abs()
        assert power_overlap_closed_form(abs_sp, H_EQ, 1) == pytest.approx(0.8944271910, abs=1e-10)
        assert power_overlap_closed_form(abs_sp, H_EQ, 2) == pytest.approx(0.9701425001, abs=1e-10)
        b = power_bounds(sp, H_EQ, 0.9, l=2)
        assert b["lower"] == pytest.approx(0.5 / math.log(2) * math.log(1 / (1 / 0.81 - 1)), rel=1e-12)
        assert b["lower"] == pytest.approx(1.046, abs=1e-3)
        assert b["lower"] <= 2 <= b["upper"]

    def test_already_past(self):
        sp = SpectralData(np.array([0.5, 1.0]), np.eye(2))
        assert power_hitting_time(sp, unit([0.1, 1.0]), 0.9) == 0
        assert power_bounds(sp, unit([0.1, 1.0]), 0.9, l=2)["lower"] == 0.0

    def test_explicit_and_closed_form_agree(self):
        # power_hitting_time raises if the two methods disagree
        for seed in range(50):
            J, sp, x0 = goe_instance(200, 7 * seed)
            assert power_hitting_time(sp, x0, 0.5, J=J) >= 0

    def test_monotone(self):
        J, sp, x0 = goe_instance(100, 9)
        q, u1, prev = x0.copy(), sp.by_abs().eigenvectors[:, 0], 0.0
        for _ in range(300):
            ov = abs(q @ u1)
            assert ov >= prev - 1e-12
            prev = ov
            q = J @ q
            q /= np.linalg.norm(q)

    def test_cap(self):
        sp = SpectralData(np.array([0.999999, 1.0]), np.eye(2))
        with pytest.raises(NotHitError) as info:
            power_hitting_time(sp, unit([1.0, 1e-3]), 0.9, k_max=10)
        assert info.value.last_overlap < 0.9
        assert default_power_cap(1000) == 1_000_000

    def test_degenerate(self):
        sp = SpectralData(np.array([-1.0, 1.0]), np.eye(2))
        with pytest.raises(DegenerateInputError):
            power_hitting_time(sp, H_EQ, 0.5)
        with pytest.raises(DegenerateInputError):
            power_bounds(sp, H_EQ, 0.5, l=2)
        sp = SpectralData(np.array([0.5, 1.0]), np.eye(2))
        with pytest.raises(DegenerateInputError):
            power_hitting_time(sp, np.array([1.0, 0.0]), 0.5)

    def test_sandwich(self):
        for seed in range(100):
            J, sp, x0 = goe_instance(200, 3 * seed + 1)
            T = power_hitting_time(sp, x0, 0.5, J=J)
            b = power_bounds(sp, x0, 0.5, l=5)
            assert b["lower"] <= T <= b["upper"]

    def test_abs_ratio_gap(self):
        assert abs_ratio_gap([-3.0, 1.0, 2.0]) == pytest.approx(0.5)


class TestExperiments:
    def test_records_sorted_and_deterministic(self):
        recs, fails = hitting_records([120, 100], 3, base_seed=5)
        assert not fails
        assert [(r.N, r.trial) for r in recs] == [(100, 0), (100, 1), (100, 2), (120, 0), (120, 1), (120, 2)]
        again, _ = hitting_records([100, 120], 3, base_seed=5, workers=2)
        assert [r.T_eps for r in recs] == [r.T_eps for r in again]

    def test_power_records(self):
        recs, _ = hitting_records([100], 4, algorithm="power", base_seed=1)
        assert all(r.algorithm == "power" and float(r.T_eps).is_integer() for r in recs)

    def test_single_n_fit(self):
        recs, _ = hitting_records([100], 3)
        with pytest.raises(DomainError):
            fit_scaling(recs)

    def test_fit_exact_power_law(self):
        recs = [HittingRecord(n, 0.5, 2.0 * n ** (2 / 3), 0, 1e9, 0.1, 0.1, 0) for n in (100, 400, 1600)]
        fit = fit_scaling(recs)
        assert fit.slope == pytest.approx(2 / 3, rel=1e-12)
        assert fit.intercept == pytest.approx(math.log(2.0), rel=1e-12)
        assert fit.r_squared == pytest.approx(1.0)

    def test_experiment_preconditions(self):
        with pytest.raises(DomainError):
            scaling_experiment([50, 100], 10)
        with pytest.raises(DomainError):
            scaling_experiment([100, 200], 5)
        with pytest.raises(DomainError):
            scaling_experiment([100, 100], 10)

    def test_small_experiment(self):
        fit, recs = scaling_experiment([100, 200], 10, base_seed=3)
        assert len(recs) == 20 and fit.failures == 0
        assert np.isfinite(fit.slope) and min(fit.medians) > 0


class TestProbabilisticLemmas:
    def test_sum_ratio_frequency(self):
        assert sum_ratio_frequency(10, 2.0, 100_000, seed=0) > 1 - 2.0 / 10

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 20), st.floats(1.0, 5.0), st.integers(0, 2**32))
    def test_frequency_bound_property(self, k, C, seed):
        # Markov bound 1 - C/k, with slack for 20k-draw sampling noise
        assert sum_ratio_frequency(k, C, 20_000, seed) >= 1 - C / k - 0.01

    def test_initial_overlap_gaussian(self):
        z = scaled_initial_overlaps(1000, 10_000, seed=0)
        assert 0.9 <= np.var(z) <= 1.1
        assert np.mean(np.abs(z) > 0.1) > 0.9

    @pytest.mark.slow
    def test_power_gap_baseline(self):
        gaps = []
        for trial in range(200):
            lam = np.linalg.eigvalsh(sample_wigner(WignerSpec(N=1000, seed=trial)))
            gaps.append(1000 ** (2 / 3) * abs_ratio_gap(lam))
        med = float(np.median(gaps))
        # regression baseline for the abs-top ratio gap
        assert 0.3 < med < 0.9
        assert med == pytest.approx(0.54876334, abs=1e-6)
