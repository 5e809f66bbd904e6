import confuse

__all__ = [
    'SchemaError', 'SchemaTypeError', 'PresetError', 'EngineSelectionError',
    'SpecError', 'DepthRangeError', 'SizingError', 'NumericError',
    'OutputError', 'IllConditionedWarning', 'GridTooNarrowWarning',
    'SeriesDivergenceWarning']

# Exceptions.


class SchemaError(confuse.ConfigValueError):
    """A configuration value does not satisfy the run or ensemble schema.

    `pointer` is the RFC 6901 JSON pointer of the offending value.
    """
    def __init__(self, pointer, message):
        self.pointer = pointer
        self.reason = message
        super(SchemaError, self).__init__(
            u'{0}: {1}'.format(pointer or '/', message))


class SchemaTypeError(SchemaError, confuse.ConfigTypeError):
    """A configuration value has the wrong type."""


class PresetError(confuse.ConfigError):
    """An unknown preset was requested."""
    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super(PresetError, self).__init__(
            u'unknown preset {0!r}; available presets: {1}'.format(
                name, u', '.join(self.available)))


class EngineSelectionError(confuse.ConfigError):
    """The engine list does not suit the requested command."""


class SpecError(ValueError):
    """The physical description of the ensemble is inconsistent."""


class DepthRangeError(ValueError):
    """A chain depth or truncation order lies outside the chain."""
    def __init__(self, what, value, low, high):
        self.value = value
        self.low = low
        self.high = high
        super(DepthRangeError, self).__init__(
            u'{0} must lie in [{1}, {2}], not {3}'.format(
                what, low, high, value))


class SizingError(ValueError):
    """The dense matrix would exceed the configured dimension limit."""
    def __init__(self, dimension, limit):
        self.dimension = dimension
        self.limit = limit
        super(SizingError, self).__init__(
            u'dense H1 dimension {0} exceeds the limit {1}'.format(
                dimension, limit))


class NumericError(ArithmeticError):
    """A computation produced failed solves or non-finite values."""


class OutputError(OSError):
    """An output file could not be written."""
    def __init__(self, path, reason=None):
        message = u'{0} could not be written'.format(path)
        if reason:
            message += u': {0}'.format(reason)
        super(OutputError, self).__init__(message)

        # Not `filename`: OSError.__str__ would replace the message.
        self.path = path
        self.reason = reason


# Warnings.


class IllConditionedWarning(RuntimeWarning):
    """An inner linear solve had a condition estimate above the limit."""


class GridTooNarrowWarning(RuntimeWarning):
    """The analytic tail beyond the grid carries too much spectral weight."""


class SeriesDivergenceWarning(RuntimeWarning):
    """Successive susceptibility terms grow instead of shrinking."""
