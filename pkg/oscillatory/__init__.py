from .core import IbpParameters, ibp_bound, special_choice_eps, radimp_bound, osc_integral
from .bilinear import radial_bilinear, angular_bilinear, fourier_sampler
