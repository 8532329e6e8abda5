"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid physical configuration (bad value, bad units, malformed file)."""


class BasisMismatchError(ValueError):
    """Operands are defined on different bases."""


class FitError(RuntimeError):
    """Nonlinear fit failed or is unconstrained; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
