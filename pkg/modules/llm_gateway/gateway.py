import logging
import threading
from collections import Counter
from enum import Enum

from modules.errors import ConfigError, ProviderError
from modules.llm_gateway.cassette import Cassette
from modules.llm_gateway.provider_types import ProviderResponse, fingerprint

logger = logging.getLogger(__name__)

DEFAULT_MAX_IN_FLIGHT = 4


class GatewayMode(str, Enum):
    LIVE = "live"
    MOCK = "mock"
    RECORD = "record"
    REPLAY = "replay"


class LLMGateway:
    """
    Single entry point for every prompt in the pipeline.

    live   -> provider call (the provider owns the retry policy)
    mock   -> deterministic rule-based provider
    record -> provider call, then cassette append
    replay -> cassette lookup only; a miss is a hard error
    """

    def __init__(self, mode, provider=None, cassette=None, max_in_flight=DEFAULT_MAX_IN_FLIGHT,
                 max_response_chars=None):
        self.mode = GatewayMode(mode)
        if self.mode in (GatewayMode.LIVE, GatewayMode.MOCK, GatewayMode.RECORD) and provider is None:
            raise ConfigError(f"gateway mode {self.mode.value} needs a provider")
        if self.mode in (GatewayMode.RECORD, GatewayMode.REPLAY) and cassette is None:
            raise ConfigError(f"gateway mode {self.mode.value} needs a cassette")
        if max_in_flight < 1:
            raise ConfigError(f"max_in_flight must be >= 1, got {max_in_flight}")
        if isinstance(cassette, (str, bytes)) or hasattr(cassette, "__fspath__"):
            cassette = Cassette(cassette)
        self.provider = provider
        self.cassette = cassette
        self.max_in_flight = max_in_flight
        self.max_response_chars = max_response_chars
        self.stats = Counter()
        self._stats_lock = threading.Lock()
        self._slots = threading.BoundedSemaphore(max_in_flight)

    @staticmethod
    def fingerprint(request):
        return fingerprint(request)

    def requests_for(self, tag):
        return self.stats[getattr(tag, "value", tag)]

    def send(self, request):
        tag = request.request_tag.value
        with self._stats_lock:
            self.stats[tag] += 1
        key = fingerprint(request)

        if self.mode == GatewayMode.REPLAY:
            entry = self.cassette.lookup(key, tag)
            response = ProviderResponse(text=entry.response_text, provider_id="replay")
        else:
            with self._slots:
                response = self.provider.complete(request)
            if self.mode == GatewayMode.RECORD:
                self.cassette.append(key, tag, response.text)

        if self.max_response_chars is not None and len(response.text) > self.max_response_chars:
            raise ProviderError(f"{tag} response of {len(response.text)} chars exceeds "
                                f"limit {self.max_response_chars}")
        logger.debug("stage=gateway event=response tag=%s mode=%s prompt_chars=%d response_chars=%d latency_ms=%d",
                     tag, self.mode.value, request.prompt_chars, len(response.text), response.latency_ms)
        return response
