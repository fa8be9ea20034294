"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class Text2ChartError(Exception):
    """Base class for all errors raised by this package."""


# -- ingest -----------------------------------------------------------------

class IngestError(Text2ChartError):
    pass


class EmptyInput(IngestError):
    """CSV byte stream had no header row."""


class RaggedRows(IngestError):
    """A CSV data row's cell count differs from the header."""


class DuplicateColumn(IngestError):
    """Two columns share a name."""


class InvalidFrame(IngestError):
    """A frame violates its structural invariants."""


class NotADatabase(IngestError):
    """The file is not a SQLite database."""


class UnreadableFile(IngestError):
    """The path cannot be opened for reading."""


class DatasetNotFound(IngestError):
    """No registry entry exists for the requested dataset id."""


# -- prompting --------------------------------------------------------------

class EmptyQuery(Text2ChartError):
    """The user query is empty after trimming whitespace."""


# -- gateway ----------------------------------------------------------------

class GatewayError(Text2ChartError):
    pass


class AuthFailed(GatewayError):
    pass


class RateLimited(GatewayError):
    pass


class ProviderTimeout(GatewayError):
    pass


class ContextOverflow(GatewayError):
    """The prompt exceeds the model's context window."""


class ProviderUnavailable(GatewayError):
    pass


class FixtureMissing(GatewayError):
    """The replay store has no recording for (model, prompt)."""


# -- sanitizer --------------------------------------------------------------

class NoCodeFound(Text2ChartError):
    """A chat reply contained fences but no code inside them."""


# -- harness ----------------------------------------------------------------

class HarnessError(Text2ChartError):
    pass
