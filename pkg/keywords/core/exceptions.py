class KeywordExtensionError(Exception):
    """Base class for every error raised by the keyword extension engine."""


class ConfigurationError(KeywordExtensionError):
    pass


class VocabularyError(KeywordExtensionError):
    pass


class TrieError(KeywordExtensionError):
    pass


class TrieFormatError(TrieError):
    """Malformed or incompatible serialized Trie."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ScorerError(KeywordExtensionError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DecodeError(KeywordExtensionError):
    pass


class DatasetError(KeywordExtensionError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EvaluationError(KeywordExtensionError):
    """
    Raised when a dataset cannot be evaluated as given.

    :param offending: identifiers of the records that caused the failure
    """

    def __init__(self, message, offending=()):
        self.offending = list(offending)
        if self.offending:
            message = f"{message}: {', '.join(str(item) for item in self.offending)}"
        super().__init__(message)
