"""Exception types raised by the estimators and the experiment driver."""


class IdentifiabilityError(ValueError):
    """Requested path count exceeds what the measurement setup can identify."""


class RankDeficiencyError(ArithmeticError):
    """A matrix that must have full rank for the estimate to exist does not."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
