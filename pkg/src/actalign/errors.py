"""Exception types shared across the engine."""


class ActAlignError(Exception):
    """Base class for all validation and data errors raised by this package."""


class ManifestError(ActAlignError):
    """Dataset manifest is malformed or violates an invariant."""


class TensorError(ActAlignError):
    """Embedding tensor file is malformed, mis-shaped, or non-normalizable."""


class ScriptError(ActAlignError):
    """Sub-action script file is malformed or inconsistent."""


class ConfigError(ActAlignError):
    """A configuration value is out of its allowed domain."""
