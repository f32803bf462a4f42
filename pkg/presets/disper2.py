from flow.profiles import AngularProfile, shell_profile
from presets.base import DecayPreset


class HighFrequencyNearPreset(DecayPreset):
    """High frequency with the space scale tracking time, j = m: 2^{-m+3k/2}."""
    regime = "high frequency, j close to m"
    expected_slope = -1.0
    family = True

    def __init__(self, *args, name="disper2", k: int = 3, ms=(3, 4, 5, 6), **kwargs):
        super().__init__(*args, name=name, ms=ms, k=k, **kwargs)

    def profile(self, m: float) -> AngularProfile:
        return shell_profile(int(m), self.options["k"], outgoing=True)

    def bound_log2(self, m: float) -> float:
        return -m + 1.5 * self.options["k"]
