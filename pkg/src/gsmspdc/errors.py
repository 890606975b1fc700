"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid, missing, or inconsistent experiment configuration."""


class ConvergenceError(RuntimeError):
    """A quadrature or sampling scheme failed its self-consistency check."""


class FitError(RuntimeError):
    """A least-squares fit failed or the input data is degenerate."""
