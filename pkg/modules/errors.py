"""Exception hierarchy shared by every pipeline stage.

`main.py` maps `ConfigError` to exit code 1 and any other `KGFError` to exit code 2.
"""


class KGFError(Exception):
    """Root of all pipeline errors."""


class ConfigError(KGFError, ValueError):
    """Invalid run configuration, flag combination or missing input path."""


class CorpusError(KGFError, ValueError):
    """Unreadable or empty document, bad fraction or bad chunk parameters."""


class LabelError(KGFError, ValueError):
    """A label is empty once canonicalized."""


class OntologyError(KGFError, ValueError):
    """Malformed ontology file, duplicate labels or an empty relation set."""


class ProviderError(KGFError):
    """The LLM provider failed after the retry budget was spent."""


class CassetteMissError(ProviderError):
    """Replay mode found no recorded response for a request fingerprint."""

    def __init__(self, fingerprint, request_tag):
        self.fingerprint = fingerprint
        self.request_tag = request_tag
        super().__init__(
            f"cassette miss for {request_tag} request (fingerprint {fingerprint[:12]}); "
            "re-record the cassette, replay never falls back to the network"
        )


class TripletParseError(KGFError, ValueError):
    """No well-formed triplet list could be read from a model response."""


class PipelineError(KGFError):
    """A stage hard-failed and the run cannot continue."""
