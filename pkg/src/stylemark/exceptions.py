"""Exception types shared across the package."""


class StylemarkError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(StylemarkError):
    """A document or corpus directory could not be read."""


class AnnotationError(CorpusError):
    """An annotation file is malformed or does not align with its text."""


class SynthSpecError(StylemarkError):
    """A synthetic-corpus spec is invalid or degenerate."""


class FeatureError(StylemarkError):
    """Feature extraction was refused (e.g. empty document)."""


class SchemaError(StylemarkError):
    """Feature schemas of two objects that must agree do not."""


class ConfigError(StylemarkError):
    """A training or run configuration is invalid."""


class ModelFormatError(StylemarkError):
    """A serialized model artifact is malformed or unsupported."""
