"""Custom exceptions for rdlab."""


class RDLabError(Exception):
    """Base exception for rdlab errors."""
    pass


class GeometryError(RDLabError, ValueError):
    """Raised when a geometry, weight or grid request is not admissible."""

    def __init__(self, message, value=None):
        self.value = value
        super().__init__(message)


class ParameterError(RDLabError, ValueError):
    """Raised when exponents or bound arguments fall outside their window."""

    def __init__(self, name, value, requirement):
        self.name = name
        self.value = value
        self.requirement = requirement
        super().__init__(f"Invalid {name}={value!r}: {requirement}")


class SolverError(RDLabError):
    """Raised when a time step cannot be completed even at the minimum step size."""

    def __init__(self, t, dt, reason):
        self.t = t
        self.dt = dt
        self.reason = reason
        super().__init__(f"Solver failed at t={t:.6g} with dt={dt:.3g}: {reason}")


class ConfigError(RDLabError):
    """Raised when a scenario configuration cannot be read or is malformed."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class EstimateError(RDLabError):
    """Raised when a numerical estimator cannot produce a value."""

    def __init__(self, message, iterations=None):
        self.iterations = iterations
        suffix = f" (after {iterations} iterations)" if iterations is not None else ""
        super().__init__(f"{message}{suffix}")
