from flow.profiles import AngularProfile, shell_profile
from presets.base import DecayPreset


class ModerateNearPreset(DecayPreset):
    """Moderate frequency with j = m: 2^{-m}."""
    regime = "moderate frequency, j close to m"
    expected_slope = -1.0
    family = True

    def __init__(self, *args, name="disper4", k: int = 0, ms=(4, 5, 6, 7, 8), **kwargs):
        super().__init__(*args, name=name, ms=ms, k=k, **kwargs)

    def profile(self, m: float) -> AngularProfile:
        return shell_profile(int(m), self.options["k"], outgoing=True)
