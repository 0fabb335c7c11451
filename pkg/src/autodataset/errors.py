"""Exception taxonomy shared across pipeline stages."""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for all pipeline errors."""


class RetryableError(PipelineError):
    """Transient failure; the caller may retry the same operation.

    Carries the URL that was being fetched when the failure occurred,
    when one is known.
    """

    def __init__(self, message: str, url: str | None = None):
        super().__init__(message)
        self.url = url


class RateLimitError(RetryableError):
    """Remote endpoint asked us to back off for ``retry_after`` seconds."""

    def __init__(self, message: str, retry_after: float, url: str | None = None):
        super().__init__(message, url=url)
        self.retry_after = retry_after


class FeedParseError(PipelineError):
    """The feed body was not parseable XML.

    ``offset`` is the byte offset of the first unparseable position,
    when the underlying parser reported one.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class PermanentSkipError(PipelineError):
    """The paper cannot be processed and should not be retried."""

    def __init__(self, message: str, reason: str = "permanent"):
        super().__init__(message)
        self.reason = reason


class SourceUnavailableError(PipelineError):
    """The e-print source archive is missing or withdrawn."""


class ArchiveTooLargeError(PipelineError):
    """Decompressed source archive exceeded the size cap."""


class BackendError(RetryableError):
    """A classifier/embedding backend call failed."""


class UnprocessableDocumentError(PermanentSkipError):
    """Both the structured parse and the plaintext fallback failed."""

    def __init__(self, message: str):
        super().__init__(message, reason="unprocessable")
