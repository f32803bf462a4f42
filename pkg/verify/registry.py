import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional

from loguru import logger

from flow.znorm import DiagnosticCaps
from models.system import SystemParams, build_system
from tools.errors import KgError

# small systems the suites fall back on when a check needs a particular geometry
reference_systems = {
    "single": {"d": 1, "b": [1.0], "c": [1.0]},
    "sphere": {"d": 3, "b": [2.0, 1.0, 1.0], "c": [1.0, 1.0, 1.0]},
    "no_sphere": {"d": 3, "b": [1.0, 1.0, 1.0], "c": [1.0, 1.0, 1.0]},
    "mixed": {"d": 2, "b": [0.1, 2.0], "c": [1.0, 2.0]},
    "semilinear": {"d": 1, "b": [1.0], "c": [1.0], "Qprime": [[1, 1, 1, 0, 0, 1.0], [1, 1, 1, 4, 4, 0.5]]},
}


def reference_system(name: str) -> SystemParams:
    return build_system(reference_systems[name])


@dataclass
class VerifyContext:
    params: SystemParams
    caps: DiagnosticCaps = field(default_factory=DiagnosticCaps)
    seed: int = 0


@dataclass
class Invariant:
    module: str
    name: str
    check: Callable[[VerifyContext], dict]
    slow: bool = False

    @property
    def key(self) -> str:
        return f"{self.module}.{self.name}"


invariants: Dict[str, Invariant] = dict()


def invariant(module: str, name: str, slow: bool = False):
    """Register ``func(context) -> {"passed", "value", "threshold", ...}`` under ``module.name``."""
    def decorator(func):
        entry = Invariant(module, name, func, slow)
        if entry.key in invariants:
            raise KeyError(f"invariant {entry.key} registered twice")
        invariants[entry.key] = entry
        return func
    return decorator


def outcome(passed: bool, value, threshold, **extra) -> dict:
    return {"passed": bool(passed), "value": value, "threshold": threshold, **extra}


def run_suite(context: VerifyContext, modules: Optional[Iterable[str]] = None, skip_slow: bool = False) -> dict:
    """Run the registered invariants in registration order; one failure never stops the others."""
    wanted = set(modules) if modules is not None else None
    results: Dict[str, dict] = {}
    failed: List[str] = []
    seconds: Dict[str, float] = {}
    for key, entry in invariants.items():
        if wanted is not None and entry.module not in wanted:
            continue
        if skip_slow and entry.slow:
            continue
        logger.info(f"Checking {key}")
        start = time.perf_counter()
        try:
            result = entry.check(context)
        except KgError as e:
            logger.exception(f"Invariant {key} raised {type(e).__name__}")
            result = {"passed": False, "error": e.to_dict()}
        except Exception as e:
            logger.exception(f"Invariant {key} crashed")
            result = {"passed": False, "error": {"error": type(e).__name__, "message": str(e)}}
        seconds[key] = time.perf_counter() - start
        if not result["passed"]:
            failed.append(key)
            logger.warning(f"Invariant {key} failed: {result}")
        results[key] = result
    return {"passed": not failed, "count": len(results), "failed": failed, "results": results,
            "seconds": seconds}
