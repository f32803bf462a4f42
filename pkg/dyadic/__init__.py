from .core import DyadicIndex, bump, phi_leq, phi_shell, phi_band, phi_localized, dyadic_shell, \
    project_frequency, localize_dyadic
from .spherical import spherical_project, zonal_kernel, kernel_operator_norm, zonal_bound_constant
