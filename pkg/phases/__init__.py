from .core import eval_phase, phase_derivatives, parallel_phase, parallel_phase_dalpha
from .resonance import spacetime_resonances, sublevel_measure, derivative_lower_bound, regime_lower_bound
from .factor import factor_dbeta, reconstruction_residual, expansion_at_Q_zero, tune_sigma
from .lowfreq import classify_low_freq
