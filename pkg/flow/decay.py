from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import stats

from config import defaults
from dyadic.core import DyadicIndex, localize_dyadic
from dyadic.spherical import spherical_project
from flow.core import propagate
from flow.profiles import AngularProfile
from models.field import SpectralField
from models.reports import DecayFit
from models.system import SystemParams
from tools.errors import DomainError, WrapAroundError


def boundary_mass_fraction(f: SpectralField, layer: float = 0.1) -> float:
    """Share of ‖f‖₂² within ``layer``·L of the box faces."""
    x = f.coords()
    edge = (0.5 - layer) * f.box_length
    outer = (np.abs(x[0]) >= edge) | (np.abs(x[1]) >= edge) | (np.abs(x[2]) >= edge)
    density = np.abs(f.physical()) ** 2
    total = np.sum(density)
    return float(np.sum(density * outer) / total) if total > 0 else 0.0


def fit_slope(times: np.ndarray, values: np.ndarray, window: Tuple[float, float]):
    """Least-squares slope of log values against log t inside the window, with a 95% half-width."""
    mask = (times >= window[0]) & (times <= window[1])
    lt, lv = np.log(times[mask]), np.log(values[mask])
    if mask.sum() < 2 or np.ptp(lt) == 0:
        return 0.0, 0.0, float(np.mean(lv)) if mask.any() else 0.0
    res = stats.linregress(lt, lv)
    dof = int(mask.sum()) - 2
    ci = float(res.stderr * stats.t.ppf(0.975, dof)) if dof > 0 else 0.0
    return float(res.slope), ci, float(res.intercept)


def _localized(f: SpectralField, localization) -> SpectralField:
    j, k, l = localization
    g = localize_dyadic(f, "Q_jk", DyadicIndex(j, k))
    return spherical_project(g, l) if l is not None else g


def decay_fit(params: SystemParams, sigma: int, initial: Union[SpectralField, AngularProfile],
              time_grid: Sequence[float], localization: Optional[Tuple[int, int, Optional[int]]] = None,
              window: Optional[Tuple[float, float]] = None, padding: int = None,
              wrap_threshold: float = None) -> DecayFit:
    times = np.asarray(time_grid, dtype=float)
    if times.size == 0 or np.any(times <= 0) or np.any(np.diff(times) < 0):
        raise DomainError("time grid must be positive and nondecreasing", times=times.tolist())
    window = (float(times[0]), float(times[-1])) if window is None else tuple(map(float, window))
    padding = defaults["sup_padding"] if padding is None else padding
    wrap_threshold = defaults["wrap_threshold"] if wrap_threshold is None else wrap_threshold
    meta = {"sigma": sigma, "window": list(window)}

    sups = []
    if isinstance(initial, AngularProfile):
        if localization is not None:
            raise DomainError("localization applies to lattice fields, not to angular profiles",
                              localization=list(localization))
        meta.update({"method": "radial", "profile": initial.label, "q": initial.q})
        for t in times:
            sups.append(initial.sup_norm(params, sigma, t))
    else:
        f = _localized(initial, localization) if localization is not None else initial
        meta.update({"method": "lattice", "resolution": f.resolution, "box_length": f.box_length,
                     "padding": padding, "localization": list(localization) if localization else None})
        for t in times:
            g = propagate(f, params, sigma, t)
            share = boundary_mass_fraction(g)
            if share > wrap_threshold:
                raise WrapAroundError(f"{share:.3g} of the mass reached the box boundary at t={t:g}; "
                                      f"enlarge the box beyond {f.box_length:g}", t=float(t), share=share)
            sups.append(g.sup_norm(padding=padding))
    sups = np.asarray(sups)
    if np.any(sups <= 0):
        raise DomainError("sup norms must be positive to fit a slope", sup_norms=sups.tolist())
    slope, ci, intercept = fit_slope(times, sups, window)
    logger.debug(f"Decay fit sigma={sigma}: slope {slope:.4f} ± {ci:.2g} over {window}")
    return DecayFit(times=times.tolist(), sup_norms=sups.tolist(), slope=slope, slope_ci=ci, window=window,
                    intercept=intercept, meta=meta)
