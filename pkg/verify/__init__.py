from .registry import VerifyContext, invariant, invariants, run_suite, reference_system
from . import system, dyadic, phases, oscillatory, flow, solver
