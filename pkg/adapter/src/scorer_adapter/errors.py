class AdapterError(ValueError):
    """Bad adapter input or configuration."""


class TokenizationError(AdapterError):
    """An example produced no tokens for a field that needs them."""


class ContextOverflowError(AdapterError):
    """A conditioning context exceeded the model's context window."""
