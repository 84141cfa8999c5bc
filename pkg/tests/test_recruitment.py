import numpy as np
import pytest

from gsdelay.errors import ConfigError
from gsdelay.recruitment import (
    RecruitmentModel,
    pipeline_counts,
    recruit_time,
    solve_delta,
)


class TestSolveDelta:
    def test_fully_linear_closed_form(self):
        # 2 * n_max / (t_max * (t_max + 1))
        assert solve_delta(145.05, 24.0, 1.0) == pytest.approx(2 * 145.05 / (24 * 25), rel=1e-12)
        assert solve_delta(145.05, 24.0, 1.0) == pytest.approx(0.48350, abs=1e-5)

    def test_short_ramp(self):
        # 145.05 / (0.5*4.8*5.8 + 4.8*0.8*24) = 145.05 / 106.08
        assert solve_delta(145.05, 24.0, 0.2) == pytest.approx(1.36736, abs=1e-5)

    def test_plateau_rate_consistency(self):
        # with a short ramp almost all recruitment happens at rate delta*l*t_max
        n_max, t_max, l = 500.0, 100.0, 0.05
        delta = solve_delta(n_max, t_max, l)
        assert delta * l * t_max * t_max == pytest.approx(n_max, rel=0.05)

    def test_warns_on_sub_month_ramp(self):
        with pytest.warns(UserWarning, match="ramp"):
            solve_delta(100.0, 10.0, 0.05)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigError):
            solve_delta(-1.0, 24.0, 0.5)
        with pytest.raises(ConfigError):
            solve_delta(100.0, 24.0, 0.0)


class TestRecruitTime:
    def test_zero(self):
        for model in (RecruitmentModel.uniform(24.0), RecruitmentModel.linear(24.0)):
            assert recruit_time(0.0, 145.05, model) == 0.0

    def test_uniform_proportionality(self):
        model = RecruitmentModel.uniform(24.0)
        assert recruit_time(145.05 / 2, 145.05, model) == pytest.approx(12.0, abs=1e-12)

    def test_linear_quadratic_root(self):
        model = RecruitmentModel.linear(24.0)
        # (-1 + sqrt(1 + 8n/delta)) / 2 at n = 72.525, delta = 0.4835
        assert recruit_time(72.525, 145.05, model) == pytest.approx(16.8277, abs=1e-3)

    def test_full_period(self):
        for l in (1.0, 0.6, 0.2):
            model = RecruitmentModel.mixed(24.0, l)
            assert recruit_time(145.05, 145.05, model) == pytest.approx(24.0, abs=1e-9)
        model = RecruitmentModel.uniform(24.0)
        assert recruit_time(145.05, 145.05, model) == pytest.approx(24.0, abs=1e-12)

    def test_monotone_in_n(self):
        model = RecruitmentModel.mixed(24.0, 0.4)
        times = [recruit_time(n, 145.05, model) for n in np.linspace(0, 145.05, 30)]
        assert all(b >= a for a, b in zip(times, times[1:]))

    def test_rejects_overflow(self):
        with pytest.raises(ConfigError):
            recruit_time(146.0, 145.05, RecruitmentModel.uniform(24.0))


class TestModelValidation:
    def test_linear_alias(self):
        model = RecruitmentModel.linear(24.0)
        assert model.pattern == "mixed" and model.ramp_fraction == 1.0

    def test_rejects_bad_pattern(self):
        with pytest.raises(ConfigError):
            RecruitmentModel("poisson", 24.0)

    def test_rejects_bad_ramp(self):
        with pytest.raises(ConfigError):
            RecruitmentModel.mixed(24.0, 1.5)


class TestPipelineCounts:
    def test_uniform_reference_values(self, table_design):
        design = table_design(2)
        model = RecruitmentModel.uniform(24.0)
        three = pipeline_counts(design, model, 3.0)
        assert three.pipeline[0] == pytest.approx(18.13, abs=0.05)
        assert three.pipeline[1] == 0.0
        twelve = pipeline_counts(design, model, 12.0)
        # cap active: n_max - n_1
        assert twelve.pipeline[0] == pytest.approx(72.52, abs=0.05)
        assert twelve.pipeline[0] == design.max_n - design.stage_n[0]

    def test_linear_reference_value(self, table_design):
        design = table_design(2)
        profile = pipeline_counts(design, RecruitmentModel.linear(24.0), 3.0)
        assert profile.pipeline[0] == pytest.approx(27.31, abs=0.05)

    def test_zero_delay_means_no_pipeline(self, table_design):
        design = table_design(3)
        for model in (
            RecruitmentModel.uniform(24.0),
            RecruitmentModel.linear(24.0),
            RecruitmentModel.mixed(24.0, 0.4),
        ):
            assert pipeline_counts(design, model, 0.0).pipeline == (0.0, 0.0, 0.0)

    @pytest.mark.parametrize("l", [0.2, 0.4, 0.6, 0.8, 1.0])
    def test_bounds_and_final_stage(self, table_design, l):
        design = table_design(4)
        model = RecruitmentModel.mixed(24.0, l)
        for m in (0.0, 3.0, 9.0, 24.0, 60.0):
            profile = pipeline_counts(design, model, m)
            assert profile.pipeline[-1] == 0.0
            for k in range(4):
                assert 0.0 <= profile.pipeline[k] <= design.max_n - design.stage_n[k] + 1e-9

    def test_monotone_in_delay_until_cap(self, table_design):
        design = table_design(3)
        model = RecruitmentModel.mixed(24.0, 0.6)
        grid = np.arange(0.0, 30.5, 0.5)
        counts = [pipeline_counts(design, model, m).pipeline[0] for m in grid]
        cap = design.max_n - design.stage_n[0]
        for a, b in zip(counts, counts[1:]):
            assert b >= a - 1e-12
            if a >= cap - 1e-12:
                assert b == a

    def test_uniform_depends_only_on_delay_fraction(self, table_design):
        design = table_design(3)
        for c in (1.5, 2.0, 3.0):
            a = pipeline_counts(design, RecruitmentModel.uniform(24.0), 7.0)
            b = pipeline_counts(design, RecruitmentModel.uniform(24.0 * c), 7.0 * c)
            assert a.pipeline == pytest.approx(b.pipeline, abs=1e-9)

    def test_ramp_window_continuous_at_phase_boundary(self, table_design):
        # the ramp-only and straddling formulas agree exactly when the window
        # ends at the phase boundary
        design = table_design(3)
        model = RecruitmentModel.mixed(24.0, 0.6)
        ramp_end = 0.6 * 24.0
        t_1 = pipeline_counts(design, model, 0.0).recruit_times[0]
        m_star = ramp_end - t_1
        eps = 1e-7
        below = pipeline_counts(design, model, m_star - eps).pipeline[0]
        at = pipeline_counts(design, model, m_star).pipeline[0]
        assert at == pytest.approx(below, abs=1e-4)

    def test_linear_exceeds_uniform_early(self, table_design):
        # holds for K <= 4 on the whole grid; the first interim of a 5-stage
        # design falls before the ramp overtakes the average rate, so its m=3
        # count is genuinely below the uniform one (23.09 vs 23.15)
        for K in (2, 3, 4):
            design = table_design(K)
            for m in (3.0, 6.0, 9.0, 12.0):
                uni = pipeline_counts(design, RecruitmentModel.uniform(24.0), m)
                lin = pipeline_counts(design, RecruitmentModel.linear(24.0), m)
                assert lin.pipeline[0] >= uni.pipeline[0] - 1e-9
        five = table_design(5)
        uni = pipeline_counts(five, RecruitmentModel.uniform(24.0), 3.0)
        lin = pipeline_counts(five, RecruitmentModel.linear(24.0), 3.0)
        assert lin.pipeline[0] < uni.pipeline[0]

    def test_rejects_negative_delay(self, table_design):
        with pytest.raises(ConfigError):
            pipeline_counts(table_design(2), RecruitmentModel.uniform(24.0), -1.0)
