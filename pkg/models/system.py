import itertools
from dataclasses import dataclass, field
from typing import List, Tuple, Mapping, Any, Sequence

import numpy as np
from loguru import logger

from config import defaults
from tools.errors import ParameterError, SymmetryError, NormError

# derivative slots of the semilinear quadratic form: u, d/dx1, d/dx2, d/dx3, d/dt
SLOTS = ("u", "dx1", "dx2", "dx3", "dt")


@dataclass(frozen=True, eq=False)
class SystemParams:
    d: int
    b: np.ndarray
    c: np.ndarray
    # A[α,β,γ,j,k], B[α,β,γ,j,k,l], Qprime[α,β,γ,a,b]; all indices 0-based
    A: np.ndarray
    B: np.ndarray
    Qprime: np.ndarray

    @property
    def indices(self) -> List[int]:
        return [s * a for s in (1, -1) for a in range(1, self.d + 1)]

    def mass(self, s: int) -> float:
        """Signed mass, b_{-α} = -b_α."""
        return float(np.sign(s) * self.b[abs(s) - 1])

    def speed(self, s: int) -> float:
        return float(self.c[abs(s) - 1])

    def dispersion(self, s: int, xi_mag):
        """Λ_s(ξ) as a function of |ξ|; Λ_{-α} = -Λ_α."""
        c, b = self.speed(s), self.b[abs(s) - 1]
        return np.sign(s) * np.sqrt(c * c * np.square(xi_mag) + b * b)

    @property
    def is_semilinear(self) -> bool:
        return not (np.any(self.A) or np.any(self.B))

    @property
    def is_free(self) -> bool:
        return self.is_semilinear and not np.any(self.Qprime)

    def to_document(self) -> dict:
        def sparse(tensor):
            return [[*(int(i) + 1 if n < 3 else int(i) for n, i in enumerate(idx)), float(tensor[idx])]
                    for idx in zip(*np.nonzero(tensor))]

        def sparse_spatial(tensor):
            return [[*(int(i) + 1 for i in idx), float(tensor[idx])] for idx in zip(*np.nonzero(tensor))]

        return {
            "d": self.d,
            "b": [float(x) for x in self.b],
            "c": [float(x) for x in self.c],
            "A": sparse_spatial(self.A),
            "B": sparse_spatial(self.B),
            "Qprime": sparse(self.Qprime),
        }


@dataclass(frozen=True)
class PhaseTriple:
    sigma: int
    mu: int
    nu: int

    def check(self, d: int):
        for name, s in (("sigma", self.sigma), ("mu", self.mu), ("nu", self.nu)):
            if s == 0 or abs(s) > d:
                raise ParameterError(f"triple index {name}={s} outside ±{{1..{d}}}", index=name)
        return self

    def negated(self) -> "PhaseTriple":
        return PhaseTriple(-self.sigma, -self.mu, -self.nu)

    def swapped(self) -> "PhaseTriple":
        return PhaseTriple(self.sigma, self.nu, self.mu)

    def as_list(self) -> List[int]:
        return [self.sigma, self.mu, self.nu]

    def __str__(self):
        return f"({self.sigma},{self.mu},{self.nu})"


@dataclass
class ConditionReport:
    assm1_holds: bool
    assm2_holds: bool
    violating_tuples: List[Tuple[str, Tuple[int, ...]]] = field(default_factory=list)
    equal_speed_null_mass_triples: List[Tuple[int, int, int]] = field(default_factory=list)
    tol: float = defaults["condition_tol"]

    def to_dict(self) -> dict:
        return {
            "assm1_holds": self.assm1_holds,
            "assm2_holds": self.assm2_holds,
            "violating_tuples": [{"condition": name, "indices": list(idx)} for name, idx in self.violating_tuples],
            "equal_speed_null_mass_triples": [list(t) for t in self.equal_speed_null_mass_triples],
            "tol": self.tol,
        }


def _dense(entries: Sequence[Sequence[float]], shape: Tuple[int, ...], name: str, d: int) -> np.ndarray:
    tensor = np.zeros(shape)
    rank = len(shape)
    for n, entry in enumerate(entries or []):
        if len(entry) != rank + 1:
            raise ParameterError(f"{name}[{n}] needs {rank} indices and a value", index=name)
        idx = []
        for pos, (i, size) in enumerate(zip(entry[:rank], shape)):
            i = int(i)
            # equation indices and spatial indices are 1-based, derivative slots 0-based
            zero_based = name == "Qprime" and pos >= 3
            i = i if zero_based else i - 1
            if not 0 <= i < size:
                raise ParameterError(f"{name}[{n}] index {entry[pos]} out of range", index=name)
            idx.append(i)
        tensor[tuple(idx)] = float(entry[rank])
    return tensor


def _check_symmetry(tensor: np.ndarray, axes: Tuple[int, int], name: str, label: str):
    swapped = np.swapaxes(tensor, *axes)
    bad = np.argwhere(np.abs(tensor - swapped) > 0)
    if len(bad):
        idx = tuple(int(i) + 1 for i in bad[0])
        raise SymmetryError(f"{name} is not symmetric under {label}: entry {idx} differs from its mirror",
                            tensor=name, index=list(idx))


def build_system(config: Mapping[str, Any]) -> SystemParams:
    if hasattr(config, "model_dump"):
        config = config.model_dump()
    d = config.get("d")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParameterError(f"d must be a positive integer, got {d!r}", index="d")
    arrays = {}
    for name, word in (("b", "mass"), ("c", "speed")):
        values = config.get(name)
        if values is None or len(values) != d:
            raise ParameterError(f"{name} must list {d} values", index=name)
        values = np.asarray(values, dtype=float)
        for i, v in enumerate(values):
            if not v > 0:
                raise ParameterError(f"{word} must be positive: {name}[{i + 1}] = {v}", index=f"{name}[{i + 1}]")
        arrays[name] = values

    A = _dense(config.get("A"), (d, d, d, 3, 3), "A", d)
    B = _dense(config.get("B"), (d, d, d, 3, 3, 3), "B", d)
    Qp = _dense(config.get("Qprime"), (d, d, d, len(SLOTS), len(SLOTS)), "Qprime", d)

    _check_symmetry(A, (0, 1), "A", "alpha<->beta")
    _check_symmetry(A, (3, 4), "A", "j<->k")
    _check_symmetry(B, (0, 1), "B", "alpha<->beta")
    for name, tensor in (("A", A), ("B", B)):
        if tensor.size and np.max(np.abs(tensor)) > 1:
            raise NormError(f"{name} has an entry of magnitude {np.max(np.abs(tensor))} > 1", tensor=name)

    params = SystemParams(d=d, b=arrays["b"], c=arrays["c"], A=A, B=B, Qprime=Qp)
    logger.debug(f"Built system d={d} b={params.b.tolist()} c={params.c.tolist()} "
                 f"semilinear={params.is_semilinear}")
    return params


def check_ip12_conditions(params: SystemParams, tol: float = None) -> ConditionReport:
    tol = defaults["condition_tol"] if tol is None else tol
    b, c, d = params.b, params.c, params.d
    violating = []
    for a, bb in itertools.permutations(range(d), 2):
        if (c[a] - c[bb]) * (c[a] ** 2 * b[a] - c[bb] ** 2 * b[bb]) < -tol:
            violating.append(("assm1", (a + 1, bb + 1)))
    assm1 = not violating
    for a, bb, g in itertools.product(range(d), repeat=3):
        if abs(b[a] + b[bb] - b[g]) <= tol:
            violating.append(("assm2", (a + 1, bb + 1, g + 1)))
    assm2 = all(name != "assm2" for name, _ in violating)
    return ConditionReport(assm1_holds=assm1, assm2_holds=assm2, violating_tuples=violating,
                           equal_speed_null_mass_triples=equal_speed_null_mass_triples(params, tol), tol=tol)


def equal_speed_null_mass_triples(params: SystemParams, tol: float = None) -> List[Tuple[int, int, int]]:
    tol = defaults["condition_tol"] if tol is None else tol
    found = []
    for s, m, n in itertools.product(params.indices, repeat=3):
        if params.speed(s) == params.speed(m) == params.speed(n) \
                and abs(params.mass(s) - params.mass(m) - params.mass(n)) <= tol:
            found.append((s, m, n))
    return sorted(found)


def is_mass_resonant(params: SystemParams, triple: PhaseTriple, tol: float = None) -> bool:
    tol = defaults["condition_tol"] if tol is None else tol
    s, m, n = triple.sigma, triple.mu, triple.nu
    return (params.speed(s) == params.speed(m) == params.speed(n)
            and abs(params.mass(s) - params.mass(m) - params.mass(n)) <= tol)


def with_masses_speeds(params: SystemParams, b=None, c=None) -> SystemParams:
    return SystemParams(d=params.d, b=np.asarray(params.b if b is None else b, dtype=float),
                        c=np.asarray(params.c if c is None else c, dtype=float),
                        A=params.A, B=params.B, Qprime=params.Qprime)
