import pytest

from tools.errors import DomainError
from verify import registry
from verify.registry import Invariant, invariant, outcome, run_suite


def _passing(context):
    return outcome(True, 0.0, 1.0)


def _failing(context):
    return outcome(False, 2.0, 1.0)


def _raising(context):
    raise DomainError("out of range", x=3)


def _crashing(context):
    raise ZeroDivisionError("division by zero")


@pytest.fixture
def fake_registry(monkeypatch):
    table = {}
    for module, name, check, slow in (("a", "ok", _passing, False), ("a", "bad", _failing, False),
                                      ("b", "raises", _raising, False), ("b", "crashes", _crashing, False),
                                      ("c", "slow", _passing, True)):
        entry = Invariant(module, name, check, slow)
        table[entry.key] = entry
    monkeypatch.setattr(registry, "invariants", table)
    return table


class TestRegistry:

    def test_every_module_registers(self):
        modules = {entry.module for entry in registry.invariants.values()}
        assert modules == {"system", "dyadic", "phases", "oscillatory", "flow", "solver"}

    def test_presets_are_slow(self):
        assert registry.invariants["flow.decay_stkg"].slow
        assert not registry.invariants["flow.free_flow_unitary"].slow

    def test_duplicate_key(self, fake_registry):
        with pytest.raises(KeyError):
            invariant("a", "ok")(_passing)


class TestRunSuite:

    def test_failures_do_not_stop_the_run(self, context, fake_registry):
        found = run_suite(context)
        assert not found["passed"]
        assert found["count"] == 5
        assert found["failed"] == ["a.bad", "b.raises", "b.crashes"]
        assert set(found["seconds"]) == set(fake_registry)

    def test_errors_are_recorded(self, context, fake_registry):
        results = run_suite(context)["results"]
        assert results["b.raises"]["error"]["error"] == "DomainError"
        assert results["b.crashes"]["error"] == {"error": "ZeroDivisionError", "message": "division by zero"}

    def test_module_filter(self, context, fake_registry):
        found = run_suite(context, modules=["a"])
        assert sorted(found["results"]) == ["a.bad", "a.ok"]

    def test_skip_slow(self, context, fake_registry):
        found = run_suite(context, modules=["c"], skip_slow=True)
        assert found["count"] == 0
        assert found["passed"]
