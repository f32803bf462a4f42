from typing import Dict

from .base import DecayPreset
from .stkg import StandardPreset
from .disper1 import LowFrequencyPreset
from .disper2 import HighFrequencyNearPreset
from .disper3 import AngularPreset, angular_gain
from .disper4 import ModerateNearPreset
from .disper5 import HighFrequencyFarPreset

presets: Dict[str, DecayPreset] = {
    "stkg": StandardPreset(),
    "disper1": LowFrequencyPreset(),
    "disper2": HighFrequencyNearPreset(),
    "disper3": AngularPreset(),
    "disper4": ModerateNearPreset(),
    "disper5": HighFrequencyFarPreset(),
}
