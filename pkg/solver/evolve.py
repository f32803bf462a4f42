import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import fft as sfft

from config import defaults, workers
from dyadic.core import DyadicIndex, localize_dyadic
from flow.core import derivative
from flow.znorm import DiagnosticCaps, z_diagnostic
from models.field import SpectralField
from models.system import SystemParams
from solver.core import (ProfileState, check_dealiased, dealias, dealias_mask, diagonalize, invert, nonlinearity,
                         physical_slots, rhs_arrays)
from solver.energy import symmetrized_energy
from tools.errors import DomainError, InstabilityError

CSV_COLUMNS = ["t", "E", "L2", "Linf_u", "Linf_du", "cauchy_defect", "H_N", "conjugation_drift"]

Arrays = Dict[int, np.ndarray]


@dataclass
class Trajectory:
    states: List[ProfileState] = field(default_factory=list)
    diagnostics: List[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> List[float]:
        return [s.t for s in self.states]

    def append(self, state: ProfileState, record: dict):
        if self.states and state.t <= self.states[-1].t:
            raise DomainError(f"snapshot at t={state.t} does not follow t={self.states[-1].t}")
        self.states.append(state)
        self.diagnostics.append(record)

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, extrasaction="ignore")
            writer.writeheader()
            for row in self.diagnostics:
                writer.writerow({k: repr(float(row[k])) for k in CSV_COLUMNS})
        return path

    def dump_snapshots(self, out_dir) -> List[Path]:
        out_dir = Path(out_dir)
        paths = []
        for n, state in enumerate(self.states):
            for s, f in state.fhat.items():
                path, _ = f.dump(out_dir / f"profile_{n:04d}_{'p' if s > 0 else 'm'}{abs(s)}.bin")
                paths.append(path)
        return paths

    def summary(self) -> dict:
        if not self.diagnostics:
            return {"snapshots": 0, **self.meta}
        energies = [r["E"] for r in self.diagnostics]
        e0 = energies[0]
        return {
            "snapshots": len(self.states),
            "t_final": self.states[-1].t,
            "energy_initial": e0,
            "energy_max_ratio": max(energies) / e0 if e0 > 0 else None,
            "linf_u_final": self.diagnostics[-1]["Linf_u"],
            "max_conjugation_drift": max(r["conjugation_drift"] for r in self.diagnostics),
            **self.meta,
        }


def gaussian_data(params: SystemParams, resolution: int, box_length: float, amplitude: float,
                  width: float = 1.0, centre: Sequence[float] = (0.0, 0.0, 0.0)
                  ) -> Tuple[List[SpectralField], List[SpectralField]]:
    """u(0) = amplitude·exp(-|x−centre|²/2w²) in every component, ∂_t u(0) = 0, 2/3-truncated."""
    base = SpectralField.zeros(resolution, box_length)
    x, y, z = base.coords()
    samples = amplitude * np.exp(-((x - centre[0]) ** 2 + (y - centre[1]) ** 2 + (z - centre[2]) ** 2)
                                 / (2 * width ** 2))
    g = dealias(SpectralField.from_physical(samples, box_length))
    return ([g.with_values(g.values, component=a) for a in range(1, params.d + 1)],
            [base.with_values(base.values, component=a) for a in range(1, params.d + 1)])


def _axpy(x: Arrays, a: float, y: Arrays) -> Arrays:
    return {s: x[s] + a * y[s] for s in x}


def rk4_profile(rhs: Callable[[float, Arrays], Arrays], t: float, f: Arrays, dt: float) -> Arrays:
    k1 = rhs(t, f)
    k2 = rhs(t + dt / 2, _axpy(f, dt / 2, k1))
    k3 = rhs(t + dt / 2, _axpy(f, dt / 2, k2))
    k4 = rhs(t + dt, _axpy(f, dt, k3))
    return {s: f[s] + dt / 6 * (k1[s] + 2 * k2[s] + 2 * k3[s] + k4[s]) for s in f}


def exponential_midpoint(rhs: Callable[[float, Arrays], Arrays], t: float, f: Arrays, dt: float) -> Arrays:
    """Explicit midpoint on the profiles, second order.

    The linear flow lives in the e^{itΛ} factors of ``rhs`` and is exact, so for
    u itself this is the exponential (Lawson) midpoint rule.
    """
    half = _axpy(f, dt / 2, rhs(t, f))
    return _axpy(f, dt, rhs(t + dt / 2, half))


schemes = {
    "rk4_profile": rk4_profile,
    "exponential_midpoint": exponential_midpoint,
}


def _steps(T: float, dt: float, output_dt: float) -> Tuple[int, int]:
    if not T > 0 or not dt > 0:
        raise DomainError(f"need T > 0 and dt > 0, got T={T}, dt={dt}", T=T, dt=dt)
    n = int(round(T / dt))
    every = int(round(output_dt / dt))
    if abs(n * dt - T) > 1e-9 * T or every < 1 or abs(every * dt - output_dt) > 1e-9 * output_dt:
        raise DomainError(f"T={T} and output_dt={output_dt} must be multiples of dt={dt}", T=T, dt=dt,
                          output_dt=output_dt)
    return n, every


def diagnose(state: ProfileState, params: SystemParams, previous: Optional[ProfileState] = None,
             energy_order: int = 0, sobolev: int = 8, z_samples: Sequence[Tuple[int, int]] = (),
             caps: DiagnosticCaps = None, drift: float = 0.0) -> dict:
    u, du = invert(state, params)
    grads = [derivative(w, j) for w in u for j in range(3)]
    weight = (1 + u[0].xi_mag() ** 2) ** sobolev
    dx3, n3 = u[0].spacing ** 3, u[0].resolution ** 3
    record = {
        "t": state.t,
        "E": symmetrized_energy(u, du, params, energy_order),
        "L2": state.norm(),
        "Linf_u": max(w.sup_norm(padding=1) for w in u),
        "Linf_du": max(w.sup_norm(padding=1) for w in grads + du),
        "cauchy_defect": state.distance(previous) if previous is not None else 0.0,
        "H_N": float(np.sqrt(sum(dx3 / n3 * np.sum(weight * np.abs(w.values) ** 2) for w in u))),
        "conjugation_drift": drift,
    }
    for j, k in z_samples:
        pieces = [localize_dyadic(state.fhat[a], "Q_jk", DyadicIndex(j, k)) for a in range(1, params.d + 1)]
        record[f"z_{j}_{k}"] = max(z_diagnostic(p, j, k, caps) for p in pieces)
    return record


def evolve(initial: ProfileState, params: SystemParams, T: float, dt: float, scheme: str = "rk4_profile",
           output_dt: float = None, energy_order: int = 0, z_samples: Sequence[Tuple[int, int]] = (),
           caps: DiagnosticCaps = None, blowup: float = 1e6) -> Trajectory:
    if scheme not in schemes:
        raise DomainError(f"unknown scheme {scheme!r}, expected one of {sorted(schemes)}", scheme=scheme)
    output_dt = dt if output_dt is None else output_dt
    n, every = _steps(T, dt, output_dt)
    check_dealiased(initial)
    step = schemes[scheme]
    tol = defaults["conjugation_tol"]
    rhs = lambda s, f: rhs_arrays(initial.with_arrays(s, f), params, s)

    traj = Trajectory(meta={"scheme": scheme, "dt": dt, "T": T, "output_dt": output_dt,
                            "resolution": initial.reference.resolution, "box_length": initial.reference.box_length})
    state = initial.projected() if initial.conjugation_drift() > 0 else initial
    norm0 = max(state.norm(), 1e-300)
    traj.append(state, diagnose(state, params, None, energy_order, z_samples=z_samples, caps=caps))
    logger.info(f"Evolving {n} steps of {scheme} with dt={dt}, snapshots every {output_dt}")

    values, worst = state.arrays(), 0.0
    for i in range(1, n + 1):
        t = initial.t + i * dt
        values = step(rhs, t - dt, values, dt)
        state = initial.with_arrays(t, values)
        drift = state.conjugation_drift()
        worst = max(worst, drift)
        if drift > tol:
            logger.warning(f"Conjugation drift {drift:.3g} at t={t:g} before projection")
        state = state.projected()
        values = state.arrays()
        norm = state.norm()
        if not np.isfinite(norm) or norm > blowup * norm0:
            last = traj.states[-1].t
            logger.error(f"Instability at t={t:g}: profile norm {norm:.3g}, last stable snapshot t={last:g}")
            raise InstabilityError(f"profile norm {norm:.3g} at t={t:g}", last_stable_time=last, trajectory=traj)
        if i % every == 0:
            traj.append(state, diagnose(state, params, traj.states[-1], energy_order, z_samples=z_samples,
                                        caps=caps, drift=drift))
            logger.debug(f"Snapshot t={t:g}: E={traj.diagnostics[-1]['E']:.6g}")
    traj.meta["max_conjugation_drift"] = worst
    return traj


def scattering_check(traj: Trajectory, tail_fraction: float = 0.5) -> float:
    """max over tail snapshot pairs of ‖f(t₂) − f(t₁)‖₂."""
    if not 0 < tail_fraction <= 1:
        raise DomainError(f"tail_fraction must be in (0, 1], got {tail_fraction}", tail_fraction=tail_fraction)
    times = traj.times
    if not times:
        raise DomainError("empty trajectory")
    start = times[-1] - tail_fraction * (times[-1] - times[0])
    tail = [s for s in traj.states if s.t >= start - 1e-12]
    if len(tail) < 3:
        raise DomainError(f"need at least 3 snapshots in the tail window, got {len(tail)}", snapshots=len(tail))
    return max(a.distance(b) for n, a in enumerate(tail) for b in tail[n + 1:])


def scattering_trend(traj: Trajectory, windows: int = 3) -> List[float]:
    """Cauchy defect of consecutive, equally long windows of snapshots."""
    states = traj.states
    size = len(states) // windows
    if size < 2:
        raise DomainError(f"{len(states)} snapshots cannot fill {windows} windows", windows=windows)
    out = []
    for w in range(windows):
        chunk = states[w * size:(w + 1) * size]
        out.append(max(a.distance(b) for n, a in enumerate(chunk) for b in chunk[n + 1:]))
    return out


def residual_check(traj: Trajectory, params: SystemParams) -> dict:
    """Residual of ∂_t²u − c²Δu + b²u − Q(u) at interior snapshots, ∂_t² by centred differences of ∂_t u."""
    states = traj.states
    if len(states) < 3:
        raise DomainError(f"need at least 3 snapshots, got {len(states)}", snapshots=len(states))
    recovered = [invert(s, params) for s in states]
    mask = dealias_mask(states[0].reference.resolution)
    out = []
    for i in range(1, len(states) - 1):
        h1, h2 = states[i].t - states[i - 1].t, states[i + 1].t - states[i].t
        if abs(h1 - h2) > 1e-9 * h1:
            raise DomainError("residual check needs evenly spaced snapshots")
        u = recovered[i][0]
        slots, hessians = physical_slots(states[i], params)
        Q = [sfft.fftn(q, workers=workers) * mask for q in nonlinearity(params, slots, hessians)]
        worst = 0.0
        for a in range(params.d):
            dtt = (recovered[i + 1][1][a].values - recovered[i - 1][1][a].values) / (2 * h1)
            linear = (params.c[a] ** 2 * u[a].xi_mag() ** 2 + params.b[a] ** 2) * u[a].values
            residual = dtt + linear - Q[a]
            scale = np.linalg.norm(dtt) + np.linalg.norm(linear) + np.linalg.norm(Q[a])
            worst = max(worst, float(np.linalg.norm(residual) / scale) if scale > 0 else 0.0)
        out.append(worst)
    return {"max_relative": max(out), "times": [s.t for s in states[1:-1]], "relative": out}


def order_check(initial: ProfileState, params: SystemParams, T: float, dt: float,
                scheme: str = "rk4_profile") -> dict:
    """Convergence order from runs at dt and dt/2 against a dt/8 reference."""
    finals = {}
    for factor in (1, 2, 8):
        step = dt / factor
        finals[factor] = evolve(initial, params, T, step, scheme=scheme, output_dt=T).states[-1]
    errors = [finals[1].distance(finals[8]), finals[2].distance(finals[8])]
    if errors[1] == 0:
        logger.warning(f"Order check of {scheme}: zero error at dt/2, order undefined")
        order = float("nan")
    else:
        order = float(np.log2(errors[0] / errors[1]))
    logger.info(f"Order check of {scheme}: errors {errors[0]:.3g}, {errors[1]:.3g} -> order {order:.2f}")
    return {"order": order, "errors": errors, "dts": [dt, dt / 2], "reference_dt": dt / 8}


def initial_state(params: SystemParams, resolution: int, box_length: float, amplitude: float,
                  width: float = 1.0) -> ProfileState:
    g, h = gaussian_data(params, resolution, box_length, amplitude, width)
    return diagonalize(g, h, params)
