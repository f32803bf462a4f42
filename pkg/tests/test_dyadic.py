import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyadic.core import DyadicIndex, bump, dyadic_shell, localize_dyadic, phi_shell
from dyadic.spherical import kernel_sphere_integral, spherical_project, zonal_kernel
from models.field import SpectralField
from tools.errors import DomainError
from verify import dyadic as dyadic_checks


class TestBump:

    def test_plateau_and_support(self):
        assert bump(0) == 1.0
        assert bump(1.25) == 1.0
        assert bump(2) == 0.0

    def test_transition_is_even(self):
        v = bump(1.4)
        assert 0 < v < 1
        assert v == bump(-1.4)

    @given(x=st.floats(min_value=-10, max_value=10, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_between_zero_and_one(self, x):
        assert 0.0 <= bump(x) <= 1.0


class TestShells:

    def test_shell_at_one_and_a_half(self):
        assert dyadic_shell("shell", 1.5, k=0) == pytest.approx(bump(1.5), abs=1e-15)

    def test_localized_floor(self):
        assert dyadic_shell("localized", 0.5, j=0, k=0) == 1.0

    @given(x=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_partition_of_unity(self, x):
        assert sum(phi_shell(k, x) for k in range(-20, 21)) == pytest.approx(1.0, abs=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            dyadic_shell("ring", 1.0, k=0)

    def test_outside_J(self):
        with pytest.raises(DomainError):
            DyadicIndex(0, -1).check()


class TestLocalization:

    def test_zero_field_stays_zero(self):
        f = SpectralField.zeros(16, 16.0)
        for mode in ("P_k", "Q_jk", "star_jk"):
            assert not np.any(localize_dyadic(f, mode, DyadicIndex(1, 0)).values)

    def test_shell_projection_keeps_plateau_modes(self):
        f = SpectralField.zeros(16, 16.0)
        values = np.zeros_like(f.values)
        # |ξ| = 2π·3/16 ≈ 1.18 sits on the plateau of φ_0 and outside φ_{-1}, φ_1
        values[3, 0, 0] = values[-3, 0, 0] = 1.0
        f = f.with_values(values)
        p = localize_dyadic(f, "P_k", DyadicIndex(0, 0))
        assert np.allclose(p.values, f.values, atol=1e-14)

    def test_space_pieces_sum_to_shell(self, gaussian):
        f = gaussian(n=32, box_length=32.0, width=2.0)
        k = -1
        pk = localize_dyadic(f, "P_k", DyadicIndex(0, k))
        total = sum((localize_dyadic(f, "Q_jk", DyadicIndex(j, k)) for j in range(1, 6)),
                    SpectralField.zeros(32, 32.0))
        assert (total - pk).l2_norm() <= 1e-8 * pk.l2_norm()


class TestSpherical:

    def test_zonal_kernel_at_the_pole(self):
        assert zonal_kernel(0, 1.0) == pytest.approx(1 / np.pi, rel=1e-14)

    @pytest.mark.parametrize("l", [0, 1, 2, 3])
    def test_kernel_integrates_to_one(self, l):
        assert kernel_sphere_integral(l) == pytest.approx(1.0, abs=1e-12)

    def test_radial_field_is_degree_zero(self):
        base = SpectralField.zeros(16, 16.0)
        # radial on the lattice itself, so every shell carries one value
        f = base.with_values(np.exp(-base.xi_mag() ** 2).astype(complex))
        assert (spherical_project(f, 0) - f).l2_norm() <= 1e-10 * f.l2_norm()
        assert spherical_project(f, 3).l2_norm() <= 1e-10 * f.l2_norm()

    def test_negative_level(self):
        with pytest.raises(DomainError):
            zonal_kernel(-1, 0.5)


class TestInvariants:

    @pytest.mark.parametrize("check", [
        dyadic_checks.partition_of_unity,
        dyadic_checks.separated_shells_annihilate,
        dyadic_checks.projectors_contract,
        dyadic_checks.zonal_kernel_bound,
        dyadic_checks.angular_projection_sup_bound,
    ])
    def test_holds(self, context, check):
        assert check(context)["passed"]
