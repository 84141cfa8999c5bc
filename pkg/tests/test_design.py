import numpy as np
import pytest

from gsdelay.boundaries import FutilityStyle, HwangShihDeCani, WangTsiatis
from gsdelay.design import (
    DesignSpec,
    GroupSequentialDesign,
    build_design,
    efficiency_gain,
    round_for_report,
    single_stage_n,
)
from gsdelay.errors import ConfigError, SolveError


def wt_spec(K, **kwargs):
    base = dict(alpha=0.05, beta=0.1, tau=0.5, num_stages=K, family=WangTsiatis(0.25))
    base.update(kwargs)
    return DesignSpec(**base)


class TestSingleStageN:
    def test_reference_sizes(self):
        assert single_stage_n(0.05, 0.1, 0.5) == pytest.approx(137.02, abs=0.02)
        assert single_stage_n(0.025, 0.1, 0.5) == pytest.approx(168.12, abs=0.02)
        assert single_stage_n(0.025, 0.2, 0.4) == pytest.approx(196.2, abs=0.3)

    def test_scales_with_variances(self):
        base = single_stage_n(0.05, 0.1, 0.5, 1.0, 1.0)
        assert single_stage_n(0.05, 0.1, 0.5, 2.0, 2.0) == pytest.approx(2 * base, rel=1e-12)

    def test_rejects_non_positive_effect(self):
        with pytest.raises(ConfigError):
            single_stage_n(0.05, 0.1, 0.0)


class TestBuildDesign:
    def test_single_stage_identity(self):
        design = build_design(wt_spec(1))
        assert design.max_n == pytest.approx(design.n_single, abs=1e-6)
        assert design.ess == pytest.approx(design.n_single, abs=1e-6)
        assert design.eg == pytest.approx(0.0, abs=1e-9)

    def test_reference_two_stage(self, table_design):
        design = table_design(2)
        assert design.max_n == pytest.approx(145.05, abs=0.2)
        assert design.ess == pytest.approx(105.84, abs=0.2)

    def test_reference_five_stage(self, table_design):
        design = table_design(5)
        assert design.max_n == pytest.approx(185.23, abs=0.3)
        assert design.ess == pytest.approx(95.09, abs=0.3)

    def test_ess_ordering_across_stage_counts(self, table_design):
        ess = [table_design(K).ess for K in (2, 3, 4, 5)]
        assert all(a > b for a, b in zip(ess, ess[1:]))
        assert [round(e, 2) for e in ess] == [105.84, 98.74, 95.98, 95.1]

    @pytest.mark.parametrize(
        "family", [WangTsiatis(0.25), WangTsiatis(0.0), HwangShihDeCani(-2.0)]
    )
    @pytest.mark.parametrize("style", list(FutilityStyle))
    def test_level_and_power_identities(self, family, style):
        spec = wt_spec(3, family=family, futility=style)
        design = build_design(spec)
        assert design.exit_at(0.0).total_reject == pytest.approx(spec.alpha, abs=1e-6)
        assert design.exit_at(spec.tau).total_reject == pytest.approx(1 - spec.beta, abs=1e-6)

    def test_information_is_quarter_total_at_unit_variances(self, table_design):
        design = table_design(4)
        for info, n in zip(design.info_levels, design.stage_n):
            assert info == pytest.approx(n / 4.0, abs=1e-10)

    def test_unequal_allocation_information(self):
        spec = wt_spec(2, allocation=2.0)
        design = build_design(spec)
        n0 = np.asarray(design.control_n)
        n1 = np.asarray(design.experimental_n)
        assert np.allclose(n1, 2.0 * n0)
        expected = 1.0 / (1.0 / n0[-1] + 1.0 / n1[-1])
        assert design.info_levels[-1] == pytest.approx(expected, rel=1e-12)
        assert design.exit_at(spec.tau).total_reject == pytest.approx(0.9, abs=1e-6)

    def test_ess_never_exceeds_max(self, table_design):
        for K in (2, 3, 4, 5):
            design = table_design(K)
            assert design.ess <= design.max_n
            assert design.ess < design.n_single

    def test_max_size_exceeds_single_stage_with_binding_futility(self, table_design):
        for K in (2, 3, 4, 5):
            design = table_design(K)
            assert design.max_n > design.n_single

    def test_unattainable_power_floor(self):
        with pytest.raises(SolveError, match="floor"):
            build_design(wt_spec(2, beta=0.96))

    def test_mu_eval_defaults_to_tau(self):
        spec = wt_spec(2)
        assert spec.evaluation_effect == spec.tau
        spec = wt_spec(2, mu_eval=0.2)
        assert spec.evaluation_effect == 0.2

    def test_rejects_bad_ranges(self):
        with pytest.raises(ConfigError):
            wt_spec(2, alpha=0.6)
        with pytest.raises(ConfigError):
            wt_spec(0)
        with pytest.raises(ConfigError):
            wt_spec(2, info_fractions=(0.5, 0.9))


class TestEfficiencyGain:
    def test_single_stage_gain_is_zero(self):
        design = build_design(wt_spec(1))
        assert efficiency_gain(design) == pytest.approx(0.0, abs=1e-9)

    def test_reference_ratios(self, table_design):
        assert efficiency_gain(table_design(2)) == pytest.approx((137.02 - 105.84) / 137.02, abs=0.002)
        assert efficiency_gain(table_design(3)) == pytest.approx((137.02 - 98.74) / 137.02, abs=0.002)

    def test_matches_stored_fields(self, table_design):
        design = table_design(4)
        assert efficiency_gain(design) == design.eg


def fake_design(stage_n):
    return GroupSequentialDesign(
        spec=None,
        boundaries=None,
        n_single=0.0,
        max_n=stage_n[-1],
        stage_n=tuple(stage_n),
        control_n=(),
        experimental_n=(),
        info_levels=(),
        exit=None,
        ess=0.0,
        eg=0.0,
    )


class TestRoundForReport:
    def test_reference_rounding(self):
        assert round_for_report(fake_design((73.14, 146.28, 219.42))) == (74, 147, 220)

    def test_integers_pass_through(self):
        assert round_for_report(fake_design((50.0, 100.0, 150.0))) == (50, 100, 150)

    def test_monotone(self):
        assert round_for_report(fake_design((9.9, 10.05, 10.1))) == (10, 11, 11)

    def test_granularity(self):
        assert round_for_report(fake_design((73.14, 146.28, 219.42)), granularity=10) == (80, 150, 220)

    def test_rejects_bad_granularity(self):
        with pytest.raises(ConfigError):
            round_for_report(fake_design((10.0,)), granularity=0)

    def test_intro_example(self):
        spec = DesignSpec(
            alpha=0.025,
            beta=0.2,
            tau=0.4,
            num_stages=3,
            family=WangTsiatis(0.0),
            futility=FutilityStyle.NONE,
        )
        design = build_design(spec)
        rounded = round_for_report(design)
        for got, want in zip(rounded, (66, 134, 200)):
            assert abs(got - want) <= 1
        assert abs(round_for_report(fake_design((design.n_single,)))[0] - 196) <= 1
