import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from models.system import PhaseTriple, build_system, check_ip12_conditions, equal_speed_null_mass_triples
from tools.errors import NormError, ParameterError, SymmetryError

positive = st.floats(min_value=0.1, max_value=5.0, allow_nan=False, allow_infinity=False)


class TestBuildSystem:

    def test_minimal_system_has_zero_tensors(self):
        params = build_system({"d": 1, "b": [1], "c": [1]})
        assert params.d == 1
        assert params.A.shape == (1, 1, 1, 3, 3)
        assert not np.any(params.A) and not np.any(params.B) and not np.any(params.Qprime)
        assert params.is_free

    def test_negative_mass_names_the_index(self):
        with pytest.raises(ParameterError, match="mass must be positive") as err:
            build_system({"d": 2, "b": [1, -1], "c": [1, 1]})
        assert err.value.details["index"] == "b[2]"

    def test_asymmetric_A_is_rejected(self):
        with pytest.raises(SymmetryError):
            build_system({"d": 2, "b": [2, 1], "c": [1, 1], "A": [[1, 2, 1, 1, 1, 0.5]]})

    def test_symmetric_A_is_accepted(self):
        params = build_system({"d": 2, "b": [2, 1], "c": [1, 1],
                               "A": [[1, 2, 1, 1, 1, 0.5], [2, 1, 1, 1, 1, 0.5]]})
        assert params.A[0, 1, 0, 0, 0] == params.A[1, 0, 0, 0, 0] == 0.5
        assert not params.is_semilinear

    def test_large_entry_is_a_norm_error(self):
        with pytest.raises(NormError):
            build_system({"d": 1, "b": [1], "c": [1], "B": [[1, 1, 1, 1, 1, 1, 2.0]]})

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            build_system({"d": 2, "b": [1], "c": [1, 1]})

    def test_document_round_trip(self):
        doc = {"d": 2, "b": [1.0, 1.5], "c": [1.0, 2.0], "A": [], "B": [],
               "Qprime": [[1, 1, 1, 0, 0, 0.5], [2, 1, 2, 0, 4, 0.25]]}
        params = build_system(doc)
        again = build_system(params.to_document())
        assert np.array_equal(again.Qprime, params.Qprime)
        assert again.to_document() == params.to_document()


class TestConditions:

    def test_equal_masses_and_speeds(self):
        report = check_ip12_conditions(build_system({"d": 2, "b": [1, 1], "c": [1, 1]}))
        assert report.assm1_holds and report.assm2_holds

    def test_sphere_system_fails_assm2(self, sphere):
        report = check_ip12_conditions(sphere)
        assert report.assm1_holds
        assert not report.assm2_holds
        assert ("assm2", (2, 3, 1)) in report.violating_tuples

    def test_distinct_speeds(self):
        report = check_ip12_conditions(build_system({"d": 2, "b": [1, 1], "c": [1, 2]}))
        assert report.assm1_holds

    def test_assm1_violation_listed(self):
        # (1 - 2)(1·1 - 4·0.1) = -0.6 < 0
        report = check_ip12_conditions(build_system({"d": 2, "b": [1, 0.1], "c": [1, 2]}))
        assert not report.assm1_holds
        assert ("assm1", (1, 2)) in report.violating_tuples

    @given(b=positive, c=positive)
    @settings(max_examples=50, deadline=None)
    def test_single_equation_always_satisfies_assm1(self, b, c):
        assert check_ip12_conditions(build_system({"d": 1, "b": [b], "c": [c]})).assm1_holds

    @given(b=st.lists(positive, min_size=3, max_size=3), c=st.lists(positive, min_size=3, max_size=3))
    @settings(max_examples=40, deadline=None)
    def test_relabeling_permutes_violations(self, b, c):
        perm = [2, 0, 1]  # new equation n is old equation perm[n]
        original = check_ip12_conditions(build_system({"d": 3, "b": b, "c": c}))
        relabeled = check_ip12_conditions(build_system({"d": 3, "b": [b[i] for i in perm],
                                                        "c": [c[i] for i in perm]}))
        back = {n + 1: perm[n] + 1 for n in range(3)}
        mapped = sorted((name, tuple(back[i] for i in idx)) for name, idx in relabeled.violating_tuples)
        assert mapped == sorted(original.violating_tuples)
        assert relabeled.assm1_holds == original.assm1_holds
        assert relabeled.assm2_holds == original.assm2_holds

    def test_null_mass_triples(self, sphere, equal):
        triples = equal_speed_null_mass_triples(sphere)
        assert (1, 2, 3) in triples and (1, 3, 2) in triples
        assert (-1, -2, -3) in triples
        assert equal_speed_null_mass_triples(equal) == []


class TestPhaseTriple:

    def test_index_outside_range(self):
        with pytest.raises(ParameterError):
            PhaseTriple(1, 0, 1).check(2)
        with pytest.raises(ParameterError):
            PhaseTriple(1, 3, 1).check(2)

    def test_signed_conventions(self, sphere):
        assert sphere.mass(-1) == -2.0
        assert sphere.speed(-1) == 1.0
        assert sphere.dispersion(-2, 0.0) == -1.0
