from typing import List

import numpy as np

from flow.profiles import AngularProfile, gaussian_profile
from presets.base import DecayPreset


class StandardPreset(DecayPreset):
    """Gaussian data under the free flow: the plain t^{-3/2} Klein-Gordon decay."""
    regime = "standard dispersion estimate"

    def __init__(self, *args, name="stkg", width: float = 1.0, t_range=(5.0, 50.0), points: int = 12, **kwargs):
        super().__init__(*args, name=name, ms=[0], width=width, t_range=list(t_range), points=points, **kwargs)

    def times(self) -> List[float]:
        lo, hi = self.options["t_range"]
        return np.geomspace(lo, hi, self.options["points"]).tolist()

    def profile(self, m: float) -> AngularProfile:
        return gaussian_profile(self.options["width"])
