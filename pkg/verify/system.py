import itertools

import numpy as np

from models.system import (SystemParams, PhaseTriple, build_system, check_ip12_conditions,
                           equal_speed_null_mass_triples)
from phases.resonance import spacetime_resonances
from verify.registry import VerifyContext, invariant, outcome, reference_system


def _reversed(params: SystemParams) -> SystemParams:
    return build_system({"d": params.d, "b": params.b[::-1].tolist(), "c": params.c[::-1].tolist()})


@invariant("system", "conditions_permutation_equivariant")
def conditions_permutation_equivariant(context: VerifyContext) -> dict:
    params = context.params
    d = params.d
    relabel = lambda idx: tuple(d + 1 - i for i in idx)
    mapped = sorted((name, relabel(idx)) for name, idx in check_ip12_conditions(params).violating_tuples)
    direct = sorted(check_ip12_conditions(_reversed(params)).violating_tuples)
    return outcome(mapped == direct, len(direct), None, relabeling="reverse")


@invariant("system", "single_equation_assm1")
def single_equation_assm1(context: VerifyContext) -> dict:
    rng = np.random.default_rng(context.seed)
    holds = [check_ip12_conditions(build_system({"d": 1, "b": [float(b)], "c": [float(c)]})).assm1_holds
             for b, c in rng.uniform(0.1, 10.0, size=(20, 2))]
    return outcome(all(holds), sum(holds), 20)


@invariant("system", "null_mass_triples_are_sphere_families")
def null_mass_triples_are_sphere_families(context: VerifyContext) -> dict:
    """Equal-speed triples report a sphere family exactly when they are mass resonant."""
    mismatches = []
    for params in (context.params, reference_system("sphere")):
        expected = set(equal_speed_null_mass_triples(params))
        for s, m, n in itertools.product(params.indices, repeat=3):
            if not params.speed(s) == params.speed(m) == params.speed(n):
                continue
            kind = spacetime_resonances(params, PhaseTriple(s, m, n)).kind
            if (kind == "sphere_family") != ((s, m, n) in expected):
                mismatches.append([s, m, n])
    return outcome(not mismatches, len(mismatches), 0, mismatches=mismatches)
