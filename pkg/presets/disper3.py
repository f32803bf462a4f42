from typing import Dict, Sequence

from flow.profiles import AngularProfile, shell_profile
from models.system import SystemParams
from presets.base import DecayPreset


class AngularPreset(DecayPreset):
    """Moderate frequency far from the light cone: 2^{-3m/2-j/3}, with a 2^l loss for angular degree ~2^l.

    ``j_ratio`` ties the space scale to time (j = j_ratio·m); zero keeps j fixed.
    """
    regime = "moderate frequency, j far from m"

    def __init__(self, *args, name="disper3", j: int = 1, k: int = 0, l: int = 0, j_ratio: float = 0.0,
                 ms=(4, 5, 6, 7, 8), **kwargs):
        super().__init__(*args, name=name, ms=ms, j=j, k=k, l=l, j_ratio=j_ratio, **kwargs)
        self.family = j_ratio > 0

    def degree(self) -> int:
        l = self.options["l"]
        return 0 if l == 0 else 2 ** l

    def space_scale(self, m: float) -> int:
        ratio = self.options["j_ratio"]
        return int(round(ratio * m)) if ratio > 0 else self.options["j"]

    def profile(self, m: float) -> AngularProfile:
        return shell_profile(self.space_scale(m), self.options["k"], q=self.degree(), outgoing=True)

    def bound_log2(self, m: float) -> float:
        return -1.5 * m - self.space_scale(m) / 3 + self.options["l"]


def angular_gain(params: SystemParams, ms: Sequence[int] = (8, 10), j: int = 1, k: int = 0, l_high: int = 5,
                 sigma: int = 1) -> Dict[str, list]:
    """sup norms at t = 2^m of equal-mass profiles of angular degree 0 and 2^{l_high}."""
    low = AngularPreset(j=j, k=k, l=0, ms=ms, sigma=sigma)
    high = AngularPreset(j=j, k=k, l=l_high, ms=ms, sigma=sigma)
    out = {"ms": list(ms), "low": [], "high": [], "degree_high": high.degree()}
    for m in ms:
        t = 2.0 ** m
        out["low"].append(low.profile(m).sup_norm(params, sigma, t))
        out["high"].append(high.profile(m).sup_norm(params, sigma, t))
    out["gain"] = [lo < hi for lo, hi in zip(out["low"], out["high"])]
    return out
