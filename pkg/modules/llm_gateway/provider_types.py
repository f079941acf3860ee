from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from modules.errors import ConfigError


class RequestTag(str, Enum):
    EXTRACTION = "extraction"
    INDUCTION = "induction"
    JUDGE = "judge"


class Role(str, Enum):
    SYSTEM = "system"
    USER = "user"


@dataclass(frozen=True)
class Message:
    role: Role
    text: str


@dataclass(frozen=True)
class ProviderRequest:
    """
    One prompt sent to a provider.

    `context` carries structured hints (chunk id, chunk text, entity, ontology labels)
    that the rule-based mock reads instead of re-parsing the prompt. It never enters
    the fingerprint: everything in it is already spelled out in the messages.
    """

    messages: tuple[Message, ...]
    request_tag: RequestTag
    temperature: float = 0.0
    max_output_tokens: int = 2048
    context: Mapping[str, str] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if not any(m.role == Role.USER for m in self.messages):
            raise ConfigError("a provider request needs at least one user message")
        if self.temperature < 0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_output_tokens < 1:
            raise ConfigError(f"max_output_tokens must be positive, got {self.max_output_tokens}")

    @property
    def prompt_chars(self):
        return sum(len(m.text) for m in self.messages)

    def with_user_suffix(self, suffix, **context_updates):
        """Copy with `suffix` appended as an extra user message (format reminders)."""
        return ProviderRequest(
            messages=self.messages + (Message(Role.USER, suffix),),
            request_tag=self.request_tag,
            temperature=self.temperature,
            max_output_tokens=self.max_output_tokens,
            context={**self.context, **context_updates},
        )


@dataclass(frozen=True)
class ProviderResponse:
    text: str
    provider_id: str
    latency_ms: int = 0
    token_counts: Optional[tuple[int, int]] = None


def fingerprint(req):
    """
    Stable sha256 of (messages, temperature, request_tag).

    Serialized as canonical JSON (sorted keys, no whitespace) so the hash does not
    depend on platform, dict ordering or wall-clock.
    """
    payload = {
        "messages": [[m.role.value, m.text] for m in req.messages],
        "temperature": format(float(req.temperature), ".6f"),
        "request_tag": req.request_tag.value,
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
