"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(ArithmeticError):
    """A matrix inverse was requested at (or numerically too close to) a pole."""


class ConvergenceError(RuntimeError):
    """An adaptive numerical scheme hit its refinement cap without converging."""


class CalibrationError(ConvergenceError):
    """The spectral-width calibration could not bracket or reach its anchor."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent."""
