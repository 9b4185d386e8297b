"""Exception types shared across the toolkit."""


class DataError(Exception):
    """A problem with input data: unreadable audio, bad manifest rows,
    degenerate folds, mismatched score files. The CLI maps this to exit
    status 2."""


class AudioFormatError(DataError):
    """Audio file cannot be decoded under the supported WAV profiles."""


class ManifestError(DataError):
    """Manifest or fold-list file violates its schema."""
