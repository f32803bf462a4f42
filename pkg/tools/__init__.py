from .singleton import KeyedSingleton
from .errors import (
    KgError, ValidationError, ConfigError, ParameterError, SymmetryError, NormError, DomainError,
    NumericalError, ResolutionError, BandLimitError, CostError, AliasingError, WrapAroundError,
    FactorizationError, InstabilityError,
)
