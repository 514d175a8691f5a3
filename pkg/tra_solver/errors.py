from typing import Optional


class TraSolverError(Exception):
    pass


class GammaPoleError(TraSolverError, ValueError):
    def __init__(self, z: complex):
        self.z = z
        super().__init__(f'gamma function pole at z={z!r}')


class RangeError(TraSolverError, ArithmeticError):
    pass


class ZeroDivisorError(TraSolverError, ZeroDivisionError):
    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        super().__init__(message)


class ParameterDomainError(TraSolverError, ValueError):
    pass


class AsymmetryError(TraSolverError, ValueError):
    def __init__(self, message: str, defect: float):
        self.defect = defect
        super().__init__(message)


class ConvergenceError(TraSolverError, ArithmeticError):
    pass


class StateIndexError(TraSolverError, IndexError):
    def __init__(self, index: int, available: int):
        self.index = index
        self.available = available
        super().__init__(f'state {index} requested but only {available} available')


class NotPositiveDefiniteError(TraSolverError, ArithmeticError):
    def __init__(self, pivot_index: int, pivot_value: float):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f'matrix not positive definite: pivot {pivot_index} is {pivot_value!r}'
        )


class FitFailureError(TraSolverError, ArithmeticError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(message)


class QuadratureConvergenceError(TraSolverError, ArithmeticError):
    def __init__(self, message: str, change: float):
        self.change = change
        super().__init__(message)


class ConfigError(ValueError):
    def __init__(self, message: str, key_path: Optional[str] = None):
        self.key_path = key_path
        super().__init__(message if not key_path else f'{key_path}: {message}')
