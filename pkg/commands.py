import datetime as dt
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
from loguru import logger

from config import dbname, defaults
from flow.decay import decay_fit
from flow.znorm import DiagnosticCaps
from models.db import archive_run, earlier_runs
from models.field import SpectralField
from models.reports import plain
from models.schema import ReportDocument, RunConfig
from models.system import PhaseTriple, SystemParams, build_system, check_ip12_conditions
from phases.factor import factor_dbeta, reconstruction_residual
from phases.lowfreq import classify_low_freq
from phases.resonance import derivative_lower_bound, regime_lower_bound, spacetime_resonances, sublevel_measure
from presets import presets
from solver.evolve import evolve, initial_state, scattering_trend
from tools.errors import ConfigError, DomainError, InstabilityError, KgError
from verify import VerifyContext, run_suite


@dataclass
class CommandResult:
    report: ReportDocument
    exit_code: int = 0
    paths: List[Path] = field(default_factory=list)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(json.dumps(cfg.model_dump(), sort_keys=True).encode()).hexdigest()[:16]


def _error_entry(e: BaseException, **where) -> dict:
    if isinstance(e, KgError):
        return {**where, **plain(e.to_dict())}
    return {**where, "error": type(e).__name__, "message": str(e)}


def _exit_code(errors: List[BaseException]) -> int:
    return max((getattr(e, "exit_code", 2) for e in errors), default=0)


def _report(command: str, cfg: RunConfig, results, errors, started: float, **clock) -> ReportDocument:
    return ReportDocument(command=command, config=cfg.model_dump(), results=plain(results),
                          errors=[plain(e) for e in errors], tolerances=cfg.tolerances.model_dump(),
                          wall_clock={"seconds": time.perf_counter() - started, **clock})


def _sublevel_scan(params: SystemParams, triple: PhaseTriple, alphas: List[float], cfg: RunConfig) -> List[dict]:
    """|{β : |Φ⁺(α,β)| ≤ ε}| and its ratio to ε^{1/3} at each α."""
    out = []
    for alpha in alphas:
        rows = []
        for eps in cfg.analyze.sublevel_eps:
            measure = sublevel_measure(params, triple, alpha, eps, cfg.analyze.sublevel_beta)
            rows.append({"eps": eps, "measure": measure, "ratio": measure / eps ** (1 / 3)})
        ratios = [r["ratio"] for r in rows if r["ratio"] > 0]
        spread = max(ratios) / min(ratios) if ratios else None
        out.append({"alpha": alpha, "scan": rows, "ratio_spread": spread, "window": list(cfg.analyze.sublevel_beta)})
    return out


def analyze_triple(params: SystemParams, triple: PhaseTriple, cfg: RunConfig) -> dict:
    tol = cfg.tolerances
    search = cfg.analyze.search
    box = (search.alpha, search.beta)
    resonance = spacetime_resonances(params, triple, box, search.grid, tol=tol.newton_tol, dedup=tol.dedup_radius)
    entry = {"triple": triple.as_list(), "resonance": resonance.to_dict(),
             "low_frequency": classify_low_freq(params, triple, tol.condition_tol).to_dict()}

    fac = factor_dbeta(params, triple, cfg.analyze.factor_alpha, cfg.analyze.factor_samples)
    summary = fac.summary()
    if not fac.reduced:
        lo, hi = cfg.analyze.factor_alpha
        # inner grid, away from the sampled endpoints of the α table
        alphas = np.linspace(lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo), 40)
        summary["residual"] = reconstruction_residual(params, triple, fac, alphas,
                                                      np.linspace(*cfg.analyze.sublevel_beta, 40), tol.factor_floor)
    entry["factorization"] = summary

    alphas = sorted({round(p.alpha, 12) for p in resonance.pairs}) or [1.0]
    entry["sublevel"] = _sublevel_scan(params, triple, alphas, cfg)
    entry["lower_bounds"] = {
        variable: derivative_lower_bound(params, triple, box, cfg.analyze.lower_bound_samples, 3, variable)
        for variable in ("beta", "alpha")
    }
    D0 = defaults["D0"]
    entry["regime_lower_bounds"] = [regime_lower_bound(params, triple, D0 + 1, 0),
                                    regime_lower_bound(params, triple, 1, 1, 1)]
    return entry


def analyze_command(cfg: RunConfig) -> CommandResult:
    started = time.perf_counter()
    params = build_system(cfg.system)
    conditions = check_ip12_conditions(params, cfg.tolerances.condition_tol).to_dict()
    logger.info(f"Analyzing {len(cfg.analyze.triples)} triples, assm1={conditions['assm1_holds']} "
                f"assm2={conditions['assm2_holds']}")
    results, errors, raised = [], [], []
    for sigma, mu, nu in cfg.analyze.triples:
        triple = PhaseTriple(sigma, mu, nu)
        try:
            entry = analyze_triple(params, triple, cfg)
            entry["conditions"] = conditions
            results.append(entry)
            logger.info(f"Triple {triple}: {entry['resonance']['kind']}")
        except Exception as e:
            logger.exception(f"Error while analyzing triple {triple}: {e}")
            errors.append(_error_entry(e, triple=triple.as_list()))
            raised.append(e)
    report = _report("analyze", cfg, results, errors, started)
    return CommandResult(report, _exit_code(raised))


def evolve_command(cfg: RunConfig, out: Path) -> CommandResult:
    started = time.perf_counter()
    params = build_system(cfg.system)
    ev = cfg.evolve
    caps = DiagnosticCaps(**cfg.caps.model_dump())
    initial = initial_state(params, ev.grid.resolution, ev.grid.box_length, ev.amplitude, ev.width)
    errors, raised, paths = [], [], []
    try:
        traj = evolve(initial, params, ev.T, ev.dt, scheme=ev.scheme, output_dt=ev.output_dt,
                      energy_order=ev.energy_order, z_samples=ev.z_samples, caps=caps)
    except InstabilityError as e:
        logger.exception(f"Evolution aborted: {e}")
        traj = e.trajectory
        errors.append(_error_entry(e))
        raised.append(e)

    paths.append(traj.write_csv(out / "trajectory.csv"))
    if ev.snapshots:
        paths.extend(traj.dump_snapshots(out / "snapshots"))
    summary = traj.summary()
    try:
        summary["cauchy_defect_windows"] = scattering_trend(traj)
    except DomainError as e:
        logger.debug(f"No scattering trend: {e}")
        summary["cauchy_defect_windows"] = None
    logger.info(f"Evolution finished at t={summary.get('t_final')}, {summary['snapshots']} snapshots")
    return CommandResult(_report("evolve", cfg, [summary], errors, started), _exit_code(raised), paths)


def _gaussian(cfg: RunConfig) -> SpectralField:
    grid = cfg.decay.grid
    f = SpectralField.zeros(grid.resolution, grid.box_length, abs(cfg.decay.sigma))
    r = f.radius()
    return SpectralField.from_physical(np.exp(-r ** 2 / (2 * cfg.decay.width ** 2)), grid.box_length,
                                       abs(cfg.decay.sigma))


def decay_command(cfg: RunConfig, out: Path, preset: Optional[str] = None) -> CommandResult:
    started = time.perf_counter()
    params = build_system(cfg.system)
    name = preset or cfg.decay.preset
    if name is not None:
        if name not in presets:
            raise ConfigError(f"unknown preset {name!r}, expected one of {sorted(presets)}", key_path="decay.preset")
        chosen = presets[name]
        fit = chosen.run(params)
        result = {**fit.to_dict(), "passed": chosen.passes(fit), "preset": chosen.describe()}
        stem = name
    else:
        loc = cfg.decay.localization
        fit = decay_fit(params, cfg.decay.sigma, _gaussian(cfg), cfg.decay.time_grid,
                        localization=(loc.j, loc.k, loc.l) if loc else None, window=cfg.decay.window,
                        wrap_threshold=cfg.tolerances.wrap_threshold)
        result = fit.to_dict()
        stem = "decay"
    paths = list(fit.write(out, stem))
    logger.info(f"Decay slope {fit.slope:.4f} ± {fit.slope_ci:.2g}")
    return CommandResult(_report("decay", cfg, [result], [], started), 0, paths)


def verify_command(cfg: RunConfig) -> CommandResult:
    started = time.perf_counter()
    context = VerifyContext(build_system(cfg.system), DiagnosticCaps(**cfg.caps.model_dump()), cfg.verify.seed)
    suite = run_suite(context, cfg.verify.modules, cfg.verify.skip_slow)
    results = [{"name": key, **result} for key, result in suite["results"].items()]
    errors = [{"name": key, **suite["results"][key]["error"]} for key in suite["failed"]
              if "error" in suite["results"][key]]
    logger.info(f"{suite['count'] - len(suite['failed'])}/{suite['count']} invariants hold")
    report = _report("verify", cfg, results, errors, started, per_invariant=suite["seconds"])
    return CommandResult(report, 0 if suite["passed"] else 2)


commands = {
    "analyze": lambda cfg, out, preset: analyze_command(cfg),
    "evolve": lambda cfg, out, preset: evolve_command(cfg, out),
    "decay": decay_command,
    "verify": lambda cfg, out, preset: verify_command(cfg),
}


def run_command(name: str, cfg: RunConfig, out: Optional[Path] = None, preset: Optional[str] = None,
                archive: Optional[str] = None) -> CommandResult:
    """Run one command, write its report under ``out`` and archive the run."""
    out = Path(out or cfg.out or f"runs/{name}")
    out.mkdir(parents=True, exist_ok=True)
    url, digest = archive or dbname, config_hash(cfg)
    earlier = earlier_runs(url, name, digest)
    if earlier:
        last = earlier[-1]
        logger.info(f"{len(earlier)} earlier {name} runs with config {digest[:12]}, last on "
                    f"{last.started:%Y-%m-%d %H:%M} ({last.status}, {last.seconds:.1f}s)")
    stamp = dt.datetime.now()
    started = time.perf_counter()
    status = "error"
    try:
        result = commands[name](cfg, out, preset)
        result.paths.append(result.report.write(out / f"{name}.json"))
        status = "ok" if result.exit_code == 0 else "failed"
        return result
    finally:
        archive_run(url, name, digest, stamp, time.perf_counter() - started, status, str(out))
