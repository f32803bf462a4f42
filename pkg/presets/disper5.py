from flow.profiles import AngularProfile, shell_profile
from presets.base import DecayPreset


class HighFrequencyFarPreset(DecayPreset):
    """High frequency at fixed space scale: 2^{-(3m+j)/2}·2^{4k+l}."""
    regime = "high frequency, j far from m"

    def __init__(self, *args, name="disper5", j: int = 1, k: int = 3, ms=(3, 4, 5, 6), **kwargs):
        super().__init__(*args, name=name, ms=ms, j=j, k=k, **kwargs)

    def profile(self, m: float) -> AngularProfile:
        return shell_profile(self.options["j"], self.options["k"], outgoing=True)

    def bound_log2(self, m: float) -> float:
        return -(3 * m + self.options["j"]) / 2 + 4 * self.options["k"]
