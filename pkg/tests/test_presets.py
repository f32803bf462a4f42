import pytest

from models.reports import DecayFit
from presets import DecayPreset, presets


def _fit(slope: float) -> DecayFit:
    return DecayFit(times=[1.0, 2.0], sup_norms=[1.0, 0.5], slope=slope, slope_ci=0.0, window=(1.0, 2.0))


class TestRegistry:

    def test_names(self):
        assert sorted(presets) == ["disper1", "disper2", "disper3", "disper4", "disper5", "stkg"]

    @pytest.mark.parametrize("name", sorted(presets))
    def test_describe(self, name):
        info = presets[name].describe()
        assert info["name"] == name
        assert info["regime"]
        assert info["expected_slope"] < 0

    def test_base_is_abstract(self):
        with pytest.raises(TypeError):
            DecayPreset("plain")


class TestStandard:

    def test_time_grid(self):
        times = presets["stkg"].times()
        assert len(times) == 12
        assert times[0] == pytest.approx(5.0)
        assert times[-1] == pytest.approx(50.0)

    def test_passes_within_tolerance(self):
        stkg = presets["stkg"]
        assert stkg.passes(_fit(-1.5))
        assert stkg.passes(_fit(-1.4))
        assert not stkg.passes(_fit(-1.0))

    def test_profile_has_unit_mass(self):
        assert presets["stkg"].profile(0).l2_norm() == pytest.approx(1.0, rel=1e-8)

    @pytest.mark.slow
    def test_measured_slope(self, single):
        fit = presets["stkg"].run(single)
        assert fit.meta["preset"] == "stkg"
        assert fit.slope == pytest.approx(-1.5, abs=0.15)


class TestLowFrequency:

    def test_predicted_bound(self):
        # min(-j + k, -(3m - j + k)/2) with j = 0, k = -2
        assert presets["disper1"].bound_log2(6) == pytest.approx(-8.0)
        assert presets["disper1"].bound_log2(0) == pytest.approx(-2.0)
