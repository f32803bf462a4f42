from .core import ProfileState, diagonalize, invert, multiplier_m, duhamel_rhs, dealias
from .energy import symmetrized_energy
from .evolve import Trajectory, evolve, scattering_check, residual_check, order_check
