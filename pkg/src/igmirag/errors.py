"""Exception types shared across the engine."""


class InvariantViolation(ValueError):
    """A domain-type invariant would be broken (for example a pair with 3 members)."""


class CorruptStore(Exception):
    """A persisted store file failed to parse or failed invariant checks on load."""


class ExtractionFailure(Exception):
    """The LLM reply for a chunk stayed unparseable after retries.

    Carries the raw reply text so failed chunks can be inspected.
    """

    def __init__(self, message: str, raw_reply: str = ""):
        super().__init__(message)
        self.raw_reply = raw_reply


class BuildFailure(Exception):
    """Index construction produced nothing usable (e.g. every chunk failed)."""


class ParseFailure(Exception):
    """A structured LLM reply was missing mandatory fields after retries."""


class GatewayError(Exception):
    """The LLM gateway could not produce a response (retries exhausted)."""


class FixtureMissing(GatewayError):
    """Replay mode found no recorded response for the request."""


class JudgeFailure(Exception):
    """The judge reply could not be parsed after retries."""
