"""LLM-as-a-judge fallback for entities the strict matcher could not find."""
from __future__ import annotations

import hashlib
import logging
import re
import threading
from concurrent.futures import Future
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from modules.llm_gateway.provider_types import Message, ProviderRequest, RequestTag, Role
from modules.verification.entity_matcher import normalize_for_match

logger = logging.getLogger(__name__)

MAX_JUDGE_RETRIES = 2
FAITHFUL = "FAITHFUL"
HALLUCINATED = "HALLUCINATED"

JUDGE_SYSTEM_PROMPT = (
    "You are a strict fact-checker. You decide whether an entity extracted from a text "
    "is factually present in that text."
)

JUDGE_INSTRUCTIONS = """Decide whether the ENTITY is factually present in the SOURCE TEXT, allowing for
surface-level differences such as inflection, abbreviation, word order, formatting, or a pronoun or
implicit subject in the text that clearly refers to the entity. Numbers, amounts, dates and names
must match exactly; a different value is not present.

Answer with exactly two lines:
line 1: FAITHFUL or HALLUCINATED (this single word only)
line 2: one sentence explaining the decision."""

FORMAT_REMINDER = "Reply again. The first line must be exactly FAITHFUL or HALLUCINATED, then one sentence."


class Slot(str, Enum):
    SUBJECT = "subject"
    OBJECT = "object"


class DecidedBy(str, Enum):
    REGEX = "regex"
    JUDGE = "judge"
    JUDGE_UNAVAILABLE = "judge_unavailable"


@dataclass(frozen=True)
class SlotVerdict:
    slot: Slot
    faithful: bool
    decided_by: DecidedBy
    judge_rationale: Optional[str] = None


@dataclass(frozen=True)
class JudgeCacheEntry:
    key: str
    verdict: bool
    rationale: str
    decided_by: DecidedBy = DecidedBy.JUDGE


def cache_key(entity, chunk_id):
    blob = f"{normalize_for_match(entity)}\x1f{chunk_id}"
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class JudgeCache:
    """
    Shared judge memo with atomic get-or-compute: concurrent misses for one key
    wait on a single future, so each (entity, chunk) pair costs at most one judging.
    """

    def __init__(self):
        self._futures = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._futures)

    def get_or_compute(self, key, compute):
        with self._lock:
            future = self._futures.get(key)
            owner = future is None
            if owner:
                future = Future()
                self._futures[key] = future
        if owner:
            try:
                future.set_result(compute())
            except BaseException as exc:
                with self._lock:
                    self._futures.pop(key, None)
                future.set_exception(exc)
                raise
        return future.result()


def build_judge_prompt(entity, chunk):
    user = f"{JUDGE_INSTRUCTIONS}\n\nSOURCE TEXT\n<<<\n{chunk.text}\n>>>\n\nENTITY\n{entity}"
    return ProviderRequest(
        messages=(Message(Role.SYSTEM, JUDGE_SYSTEM_PROMPT), Message(Role.USER, user)),
        request_tag=RequestTag.JUDGE,
        max_output_tokens=128,
        context={"chunk_id": chunk.id, "chunk_text": chunk.text, "entity": entity, "attempt": "0"},
    )


def parse_judge_answer(text):
    """(faithful, rationale) or None when the first non-empty line is not a verdict token."""
    lines = [line.strip() for line in (text or "").splitlines() if line.strip()]
    if not lines:
        return None
    token = re.sub(r"[\s*_`.:]+", "", lines[0]).upper()
    if token not in (FAITHFUL, HALLUCINATED):
        return None
    rationale = " ".join(lines[1:]).strip()
    first_sentence = re.match(r"(.+?[.!?])(\s|$)", rationale)
    return token == FAITHFUL, (first_sentence.group(1) if first_sentence else rationale)


def _ask_judge(entity, chunk, gateway, max_retries):
    request = build_judge_prompt(entity, chunk)
    for attempt in range(max_retries + 1):
        answer = parse_judge_answer(gateway.send(request).text)
        if answer is not None:
            faithful, rationale = answer
            return JudgeCacheEntry(key=cache_key(entity, chunk.id), verdict=faithful, rationale=rationale)
        logger.warning("stage=verify event=judge_unparseable chunk=%s attempt=%d", chunk.id, attempt)
        request = request.with_user_suffix(FORMAT_REMINDER, attempt=str(attempt + 1))
    logger.warning("stage=verify event=judge_unavailable chunk=%s entity_chars=%d", chunk.id, len(entity))
    return JudgeCacheEntry(key=cache_key(entity, chunk.id), verdict=False,
                           rationale="judge output unparseable after retries",
                           decided_by=DecidedBy.JUDGE_UNAVAILABLE)


def judge_grounded(entity, chunk, gateway, slot=Slot.SUBJECT, cache=None, max_retries=MAX_JUDGE_RETRIES):
    """
    Ask the judge whether `entity` is present in `chunk` despite surface differences.

    Unparseable answers after `max_retries` count as hallucinated (judge_unavailable).
    """
    key = cache_key(entity, chunk.id)
    if cache is None:
        entry = _ask_judge(entity, chunk, gateway, max_retries)
    else:
        entry = cache.get_or_compute(key, lambda: _ask_judge(entity, chunk, gateway, max_retries))
    return SlotVerdict(slot=Slot(slot), faithful=entry.verdict, decided_by=entry.decided_by,
                       judge_rationale=entry.rationale)
