class KgError(Exception):
    exit_code = 2

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        return {"error": type(self).__name__, "message": self.message, **self.details}


class ValidationError(KgError):
    exit_code = 1


class ConfigError(ValidationError):
    def __init__(self, message: str, key_path: str = "", **details):
        super().__init__(f"{key_path}: {message}" if key_path else message, key_path=key_path, **details)
        self.key_path = key_path


class ParameterError(ValidationError):
    pass


class SymmetryError(ValidationError):
    pass


class NormError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NumericalError(KgError):
    exit_code = 2


class ResolutionError(NumericalError):
    pass


class BandLimitError(NumericalError):
    pass


class CostError(NumericalError):
    def __init__(self, message: str, suggested_max_K: float = None, **details):
        super().__init__(message, suggested_max_K=suggested_max_K, **details)
        self.suggested_max_K = suggested_max_K


class AliasingError(NumericalError):
    pass


class WrapAroundError(NumericalError):
    pass


class FactorizationError(NumericalError):
    def __init__(self, message: str, alpha: float = None, **details):
        super().__init__(message, alpha=alpha, **details)
        self.alpha = alpha


class InstabilityError(NumericalError):
    def __init__(self, message: str, last_stable_time: float = None, trajectory=None, **details):
        super().__init__(message, last_stable_time=last_stable_time, **details)
        self.last_stable_time = last_stable_time
        # partial trajectory up to the last stable snapshot
        self.trajectory = trajectory
