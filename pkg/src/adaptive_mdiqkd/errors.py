"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its physical or mathematical domain."""


class ConsistencyError(ArithmeticError):
    """An internal numerical identity was violated beyond rounding noise."""


class NoCrossoverError(ValueError):
    """The adaptive protocol never crosses the baseline at any distance."""


class MultiplexingOverflowError(OverflowError):
    """The per-pulse rate underflowed to zero; the multiplexing size is unbounded."""


class ConfigError(ValueError):
    """A run configuration file could not be parsed or validated."""
