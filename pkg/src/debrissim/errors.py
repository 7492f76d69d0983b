"""Exception types shared across the package."""


class DebrisSimError(Exception):
    """Base class for all package errors."""


class UnboundVariableError(DebrisSimError, KeyError):
    """An expression mentions a variable that has no input slot."""

    def __init__(self, name: str, all_missing=None):
        self.name = name
        self.missing = list(all_missing or [name])
        super().__init__(f"free variable {name!r} has no slot in the input layout")

    def __str__(self) -> str:
        return self.args[0]


class SingularityError(DebrisSimError):
    """A matrix that must be inverted is (numerically) singular."""

    def __init__(self, message: str, t: float | None = None, configuration=None):
        self.t = t
        self.configuration = configuration
        if t is not None:
            message = f"{message} at t={t:.6g}"
        if configuration is not None:
            message = f"{message} (configuration {tuple(round(float(x), 6) for x in configuration)})"
        super().__init__(message)


class UnreachableError(DebrisSimError):
    """An inverse-kinematics target lies outside the workspace."""


class NonFiniteError(DebrisSimError, FloatingPointError):
    """A state or input contains NaN or infinity."""

    def __init__(self, message: str, t: float | None = None):
        self.t = t
        super().__init__(message if t is None else f"{message} at t={t:.6g}")


class ConfigError(DebrisSimError):
    """Configuration failed validation; ``violations`` lists every problem."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
