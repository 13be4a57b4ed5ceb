"""Error taxonomy shared across the package."""


class VtrlError(Exception):
    """Base class for all package errors."""


class DimensionError(VtrlError, ValueError):
    """Shapes of tensor operands are incompatible."""


class ContractError(VtrlError, RuntimeError):
    """An operation was called outside its stated contract."""


class ConfigError(VtrlError, ValueError):
    """Invalid configuration value or combination."""


class NumericsError(VtrlError, ArithmeticError):
    """A numeric operation produced NaN or Inf from finite inputs."""


class ParseError(VtrlError, ValueError):
    """A config or data file could not be parsed."""
