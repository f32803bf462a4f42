from abc import ABC, abstractmethod
from typing import List, Sequence

import numpy as np
from loguru import logger

from flow.decay import decay_fit, fit_slope
from flow.profiles import AngularProfile
from models.reports import DecayFit
from models.system import SystemParams


class DecayPreset(ABC):
    """A dispersive-decay experiment: which profile, which times, what slope to expect.

    Fixed-scale presets evolve one profile; family presets rebuild the profile
    at every time t = 2^m (the space scale tracks m) and fit the sup norms of
    the whole family.
    """
    expected_slope: float = -1.5
    tolerance: float = 0.15
    regime: str = ""
    family: bool = False

    def __init__(self, name: str, ms: Sequence[float] = (4, 5, 6, 7, 8), sigma: int = 1, **options):
        self.name = name
        self.ms = list(ms)
        self.sigma = sigma
        self.options = options

    def times(self) -> List[float]:
        return [2.0 ** m for m in self.ms]

    @abstractmethod
    def profile(self, m: float) -> AngularProfile:
        raise NotImplementedError

    def bound_log2(self, m: float) -> float:
        """log₂ of the predicted sup-norm bound at t = 2^m, constants dropped."""
        return self.expected_slope * m

    def run(self, params: SystemParams) -> DecayFit:
        times = self.times()
        logger.info(f"Decay preset {self.name}: {len(times)} times in [{times[0]:g}, {times[-1]:g}]")
        meta = {"preset": self.name, "regime": self.regime, "expected_slope": self.expected_slope,
                "tolerance": self.tolerance,
                "note": "power-law slopes only; logarithmic factors are not resolved at these times"}
        if not self.family:
            fit = decay_fit(params, self.sigma, self.profile(self.ms[0]), times)
            fit.meta.update(meta)
            return fit
        sups = np.array([self.profile(m).sup_norm(params, self.sigma, t) for m, t in zip(self.ms, times)])
        slope, ci, intercept = fit_slope(np.asarray(times), sups, (times[0], times[-1]))
        meta.update({"method": "radial", "family": [self.profile(m).label for m in self.ms]})
        return DecayFit(times=list(times), sup_norms=sups.tolist(), slope=slope, slope_ci=ci,
                        window=(times[0], times[-1]), intercept=intercept, meta=meta)

    def passes(self, fit: DecayFit) -> bool:
        """Measured decay is no slower than expected by more than the tolerance."""
        return fit.slope <= self.expected_slope + self.tolerance

    def describe(self) -> dict:
        return {"name": self.name, "regime": self.regime, "expected_slope": self.expected_slope,
                "tolerance": self.tolerance, "ms": self.ms, "family": self.family, **self.options}
