import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flow.core import propagate, rotation, vector_fields
from flow.decay import decay_fit, fit_slope
from flow.profiles import gaussian_profile, shell_profile
from flow.znorm import DiagnosticCaps, z_diagnostic, z_profile, z_terms
from models.field import SpectralField
from tools.errors import DomainError
from verify import flow as flow_checks, invariants

times = st.floats(min_value=-5, max_value=5, allow_nan=False)


class TestPropagate:

    def test_time_zero_is_identity(self, single, gaussian):
        f = gaussian()
        assert propagate(f, single, 1, 0.0) is f

    @given(t=times)
    @settings(max_examples=25, deadline=None)
    def test_unitary(self, single, gaussian, t):
        f = gaussian()
        assert propagate(f, single, -1, t).l2_norm() == pytest.approx(f.l2_norm(), rel=1e-13)

    @given(t1=times, t2=times)
    @settings(max_examples=25, deadline=None)
    def test_group_law(self, single, gaussian, t1, t2):
        f = gaussian()
        twice = propagate(propagate(f, single, 1, t1), single, 1, t2)
        once = propagate(f, single, 1, t1 + t2)
        assert (twice - once).l2_norm() <= 1e-12 * f.l2_norm()

    def test_component_out_of_range(self, single, gaussian):
        with pytest.raises(DomainError):
            propagate(gaussian(), single, 2, 1.0)


class TestVectorFields:

    def test_order_zero(self, gaussian):
        f = gaussian()
        words = vector_fields(f, 0)
        assert list(words) == [()]
        assert words[()] is f

    def test_word_count(self, gaussian):
        assert len(vector_fields(gaussian(n=8, box_length=8.0), 2)) == 1 + 6 + 36

    def test_order_beyond_cap(self, gaussian):
        with pytest.raises(DomainError):
            vector_fields(gaussian(), 3)

    def test_rotations_annihilate_radial_fields(self, gaussian):
        f = gaussian(n=32, box_length=16.0)
        for i, j in ((0, 1), (0, 2), (1, 2)):
            assert rotation(f, i, j).l2_norm() <= 1e-6 * f.l2_norm()


class TestDecay:

    def test_exact_power_law(self):
        t = np.geomspace(5, 50, 8)
        slope, ci, intercept = fit_slope(t, 3.0 * t ** -1.5, (5, 50))
        assert slope == pytest.approx(-1.5, abs=1e-12)
        assert ci == pytest.approx(0.0, abs=1e-10)
        assert intercept == pytest.approx(np.log(3.0))

    def test_repeated_time_is_flat(self, single, gaussian):
        fit = decay_fit(single, 1, gaussian(n=16, box_length=32.0), [5.0, 5.0, 5.0])
        assert fit.slope == 0.0
        assert fit.meta["method"] == "lattice"

    def test_time_grid_must_be_positive(self, single, gaussian):
        with pytest.raises(DomainError):
            decay_fit(single, 1, gaussian(), [0.0, 1.0])

    def test_angular_profiles_take_no_localization(self, single):
        with pytest.raises(DomainError):
            decay_fit(single, 1, gaussian_profile(1.0), [5.0, 10.0], localization=(0, 0, None))

    def test_profiles_have_unit_mass(self):
        assert shell_profile(2, 0).l2_norm() == pytest.approx(1.0, rel=1e-8)
        assert gaussian_profile(1.0).l2_norm() == pytest.approx(1.0, rel=1e-8)

    def test_shell_profile_needs_nonnegative_j(self):
        with pytest.raises(DomainError):
            shell_profile(-1, 0)


class TestZDiagnostic:

    def test_zero_field(self):
        assert z_diagnostic(SpectralField.zeros(8, 8.0), 1, 0) == 0.0

    def test_space_weight_scaling(self, gaussian):
        f = gaussian(n=8, box_length=8.0)
        caps = DiagnosticCaps(gamma_order=1, K0=1)
        ratio = z_diagnostic(f, 2, 2, caps) / z_diagnostic(f, 1, 2, caps)
        assert ratio == pytest.approx(2 * (np.sqrt(5) / np.sqrt(2)) ** caps.N0_sub, rel=1e-12)

    def test_low_branch_adds_both_terms(self, gaussian):
        f = gaussian(n=16, box_length=16.0)
        f = f.scaled(1 / f.l2_norm())
        terms = z_terms(f, 0, 0, DiagnosticCaps(gamma_order=0))
        assert terms["branch"] == "low"
        # at j = 0 both weights are 1: ‖f‖₂ + ‖f̂‖₁, the sum and not the larger of the two
        assert terms["value"] == pytest.approx(1.0 + f.fourier_l1(), rel=1e-12)
        assert terms["value"] > max(1.0, f.fourier_l1())

    def test_order_zero_uses_the_field_only(self, gaussian):
        assert z_terms(gaussian(n=8, box_length=8.0), 0, 0, DiagnosticCaps(gamma_order=0))["words"] == 1

    def test_branch_selection(self, gaussian):
        f = gaussian(n=8, box_length=8.0)
        caps = DiagnosticCaps(gamma_order=1, K0=3)
        assert z_terms(f, 1, 0, caps)["branch"] == "low"
        assert z_terms(f, 1, 3, caps)["branch"] == "high"

    def test_outside_J(self, gaussian):
        with pytest.raises(DomainError):
            z_diagnostic(gaussian(n=8, box_length=8.0), 0, -1)

    def test_caps_must_be_positive(self):
        with pytest.raises(DomainError):
            DiagnosticCaps(N_sub=0)

    def test_profile_over_scales(self, gaussian):
        found = z_profile(gaussian(n=16, box_length=16.0), range(0, 3), range(-1, 2),
                          DiagnosticCaps(gamma_order=1, K0=1))
        assert found["argmax"] is not None
        assert found["value"] == max(found["table"].values())
        # (0, -1) lies outside J and is never tabulated
        assert "0,-1" not in found["table"]


class TestInvariants:

    @pytest.mark.parametrize("check", [
        flow_checks.free_flow_unitary,
        flow_checks.vector_field_words_finite,
        flow_checks.derivative_rotation_bracket,
        flow_checks.rotation_commutes_with_flow,
    ])
    def test_holds(self, context, check):
        assert check(context)["passed"]

    @pytest.mark.slow
    def test_standard_decay_preset(self, context):
        assert invariants["flow.decay_stkg"].check(context)["passed"]
