"""
Deterministic rule-based provider for offline runs and tests.

Extraction: applies a pattern table to the chunk text and emits only predicates the
prompt's ontology allows (unless seeded drift fires). Induction: follows a per-chunk
script, or proposes the concepts and predicates of the patterns matching the chunk.
Judge: follows a script keyed by (entity, chunk id), or answers FAITHFUL iff every
content token of the entity occurs in the chunk.
"""
from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from modules.errors import ConfigError
from modules.llm_gateway.provider_types import ProviderResponse, RequestTag, fingerprint
from modules.ontology.label_normalizer import try_canonicalize

STOPWORDS = frozenset({"the", "a", "an", "of", "and", "in", "on", "for", "to", "by", "with", "its", "at"})
_TOKEN = re.compile(r"[^\W_]+(?:[.,][0-9]+)*")


class ExtractionPattern(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pattern: str
    predicate: str
    subject: Optional[str] = None
    object: Optional[str] = None
    subject_concept: Optional[str] = None
    object_concept: Optional[str] = None
    description: Optional[str] = None


class ScriptedProposal(BaseModel):
    model_config = ConfigDict(extra="forbid")

    concepts: list[str] = Field(default_factory=list)
    relations: list[str] = Field(default_factory=list)


class ScriptedVerdict(BaseModel):
    model_config = ConfigDict(extra="forbid")

    entity: str
    chunk_id: str
    verdict: str = "FAITHFUL"
    rationale: str = "Scripted verdict."


class MockRules(BaseModel):
    model_config = ConfigDict(extra="forbid")

    extraction_patterns: list[ExtractionPattern] = Field(default_factory=list)
    induction_script: dict[str, ScriptedProposal] = Field(default_factory=dict)
    judge_script: list[ScriptedVerdict] = Field(default_factory=list)
    malformed_first_attempt: list[str] = Field(default_factory=list)
    drift_rate: float = Field(default=0.0, ge=0.0, le=1.0)

    @classmethod
    def from_file(cls, path):
        try:
            return cls.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read mock rules {path}: {exc}") from exc
        except (json.JSONDecodeError, ValidationError) as exc:
            raise ConfigError(f"malformed mock rules {path}: {exc}") from exc


def _loose(text):
    text = unicodedata.normalize("NFC", text).casefold().replace("_", " ")
    return " ".join(text.split())


def _content_tokens(text):
    return [t for t in _TOKEN.findall(_loose(text)) if t not in STOPWORDS]


class MockProvider:
    provider_id = "mock"

    def __init__(self, rules=None, seed=0):
        self.rules = rules or MockRules()
        self.seed = seed
        self._patterns = [(rule, re.compile(rule.pattern, re.MULTILINE)) for rule in self.rules.extraction_patterns]
        self._judge = {(_loose(v.entity), v.chunk_id): v for v in self.rules.judge_script}

    def complete(self, request):
        if request.request_tag == RequestTag.EXTRACTION:
            text = self._extract(request)
        elif request.request_tag == RequestTag.INDUCTION:
            text = self._induce(request)
        else:
            text = self._judge_entity(request)
        return ProviderResponse(text=text, provider_id=self.provider_id, latency_ms=0,
                                token_counts=(request.prompt_chars // 4, len(text) // 4))

    def _matches(self, chunk_text):
        for rule, regex in self._patterns:
            for match in regex.finditer(chunk_text):
                groups = match.groupdict()
                subject = rule.subject or groups.get("subject")
                obj = rule.object or groups.get("object")
                if subject and obj:
                    yield rule, subject.strip(), obj.strip()

    def _drifts(self, request, position):
        if self.rules.drift_rate <= 0:
            return False
        digest = hashlib.sha256(f"{self.seed}:{fingerprint(request)}:{position}".encode()).digest()
        return int.from_bytes(digest[:8], "big") / 2 ** 64 < self.rules.drift_rate

    def _extract(self, request):
        context = request.context
        if context.get("chunk_id") in self.rules.malformed_first_attempt and context.get("attempt", "0") == "0":
            return "Sure! Here are the facts I found in the chunk, described in prose."
        allowed = set(filter(None, context.get("relations", "").split("\n")))
        triplets = []
        for position, (rule, subject, obj) in enumerate(self._matches(context.get("chunk_text", ""))):
            predicate = rule.predicate
            if self._drifts(request, position):
                predicate = f"{predicate} related"
            elif try_canonicalize(predicate) not in allowed:
                continue
            triplets.append({"subject": subject, "predicate": predicate, "object": obj})
        return json.dumps(triplets, ensure_ascii=False)

    def _induce(self, request):
        context = request.context
        scripted = self.rules.induction_script.get(context.get("chunk_index", ""))
        if scripted is not None:
            concepts = [{"label": c} for c in scripted.concepts]
            relations = [{"label": r} for r in scripted.relations]
        else:
            concepts, relations, seen = [], [], set()
            for rule, _, _ in self._matches(context.get("chunk_text", "")):
                for concept in (rule.subject_concept, rule.object_concept):
                    if concept and ("c", concept) not in seen:
                        seen.add(("c", concept))
                        concepts.append({"label": concept})
                if ("r", rule.predicate) not in seen:
                    seen.add(("r", rule.predicate))
                    entry = {"label": rule.predicate}
                    if rule.description:
                        entry["description"] = rule.description
                    relations.append(entry)
        return json.dumps({"concepts": concepts, "relations": relations}, ensure_ascii=False)

    def _judge_entity(self, request):
        context = request.context
        entity = context.get("entity", "")
        scripted = self._judge.get((_loose(entity), context.get("chunk_id", "")))
        if scripted is not None:
            return f"{scripted.verdict}\n{scripted.rationale}"
        chunk_tokens = set(_content_tokens(context.get("chunk_text", "")))
        entity_tokens = _content_tokens(entity)
        if entity_tokens and all(token in chunk_tokens for token in entity_tokens):
            return "FAITHFUL\nEvery content word of the entity occurs in the source chunk."
        missing = next((t for t in entity_tokens if t not in chunk_tokens), entity)
        return f"HALLUCINATED\nThe source chunk does not mention '{missing}'."
