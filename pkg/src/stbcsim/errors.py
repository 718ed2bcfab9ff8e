"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Unsupported name or inconsistent simulation configuration."""


class DegenerateChannelError(ArithmeticError):
    """The channel carries no energy, so symbol estimates are undefined."""


class GapRangeError(ValueError):
    """A BER curve does not bracket the requested target BER."""
