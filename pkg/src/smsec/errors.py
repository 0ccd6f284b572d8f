"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration (bad key, value, or combination)."""


class NumericalError(ArithmeticError):
    """Numerical failure: non-PD covariance, rank-deficient channel, etc."""
