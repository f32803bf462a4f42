from flow.profiles import AngularProfile, shell_profile
from presets.base import DecayPreset


class LowFrequencyPreset(DecayPreset):
    """Frequency 2^k with k negative at fixed space scale: min(2^{-j+k}, 2^{-(3m-j+k)/2})."""
    regime = "low frequency"

    def __init__(self, *args, name="disper1", j: int = 0, k: int = -2, ms=(6, 7, 8, 9, 10), **kwargs):
        super().__init__(*args, name=name, ms=ms, j=j, k=k, **kwargs)

    def profile(self, m: float) -> AngularProfile:
        return shell_profile(self.options["j"], self.options["k"], outgoing=True)

    def bound_log2(self, m: float) -> float:
        j, k = self.options["j"], self.options["k"]
        return min(-j + k, -(3 * m - j + k) / 2)
