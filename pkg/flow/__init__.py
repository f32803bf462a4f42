from .core import propagate, vector_fields
from .profiles import AngularProfile, shell_profile, gaussian_profile
from .decay import decay_fit
from .znorm import DiagnosticCaps, z_diagnostic
