import logging
import os
import time

import requests
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from modules.errors import ConfigError, ProviderError
from modules.llm_gateway.provider_types import ProviderResponse

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})
MAX_RESPONSE_CHARS = 200_000
MAX_BACKOFF_SECONDS = 30.0


class TransientProviderError(ProviderError):
    """429, 5xx or a dropped connection; worth another attempt."""


class HttpChatProvider:
    """
    OpenAI-compatible chat-completions client.

    Retries transport errors and HTTP 429/5xx up to `max_attempts` times with
    exponential backoff (1s, 2s, ...). Other HTTP errors fail immediately.
    """

    def __init__(self, url, api_key=None, model=None, timeout=120.0, max_attempts=3,
                 backoff_base=1.0, max_response_chars=MAX_RESPONSE_CHARS, session=None):
        if not url:
            raise ConfigError("live provider needs KGF_PROVIDER_URL")
        self.url = url
        self.api_key = api_key
        self.model = model
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.max_response_chars = max_response_chars
        self.session = session or requests.Session()
        self.provider_id = f"http:{model or 'default'}"

    @classmethod
    def from_env(cls, **kwargs):
        return cls(
            url=os.getenv("KGF_PROVIDER_URL"),
            api_key=os.getenv("KGF_PROVIDER_KEY"),
            model=os.getenv("KGF_PROVIDER_MODEL"),
            **kwargs,
        )

    def _payload(self, request):
        payload = {
            "messages": [{"role": m.role.value, "content": m.text} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        if self.model:
            payload["model"] = self.model
        return payload

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def complete(self, request):
        tag = request.request_tag.value

        def log_retry(retry_state):
            logger.warning("stage=gateway event=retry tag=%s attempt=%d delay=%.1fs reason=%s",
                           tag, retry_state.attempt_number, retry_state.next_action.sleep,
                           retry_state.outcome.exception())

        retrying = Retrying(
            retry=retry_if_exception_type(TransientProviderError),
            stop=stop_after_attempt(self.max_attempts),
            wait=wait_exponential(multiplier=self.backoff_base, max=MAX_BACKOFF_SECONDS),
            sleep=lambda seconds: time.sleep(seconds),
            before_sleep=log_retry,
            reraise=True,
        )
        try:
            return retrying(self._post, request)
        except TransientProviderError as exc:
            raise ProviderError(f"{tag} request failed after {self.max_attempts} attempts: {exc}") from exc

    def _post(self, request):
        started = time.monotonic()
        try:
            response = self.session.post(self.url, json=self._payload(request),
                                         headers=self._headers(), timeout=self.timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TransientProviderError(f"transport error: {exc}") from exc
        if response.status_code in RETRYABLE_STATUS:
            raise TransientProviderError(f"HTTP {response.status_code}")
        if response.status_code >= 400:
            raise ProviderError(f"{request.request_tag.value} request rejected: "
                                f"HTTP {response.status_code} {response.text[:200]}")
        return self._parse(response, started)

    def _parse(self, response, started):
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected provider payload: {exc}") from exc
        if len(text) > self.max_response_chars:
            raise ProviderError(f"response of {len(text)} chars exceeds limit {self.max_response_chars}")
        usage = body.get("usage") or {}
        tokens = None
        if "prompt_tokens" in usage and "completion_tokens" in usage:
            tokens = (int(usage["prompt_tokens"]), int(usage["completion_tokens"]))
        return ProviderResponse(
            text=text,
            provider_id=self.provider_id,
            latency_ms=int((time.monotonic() - started) * 1000),
            token_counts=tokens,
        )
