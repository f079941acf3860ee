"""
Strict parsing of extraction answers into Triplets.

Tries, in order: the whole answer, the bodies of code fences, then every `[` position
until one decodes to a list. The first list found must hold objects with exactly the
keys subject/predicate/object, all strings; anything else is a parse failure.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, StrictStr, TypeAdapter, ValidationError

from modules.errors import TripletParseError
from modules.ontology.label_normalizer import try_canonicalize

logger = logging.getLogger(__name__)

_FENCE = re.compile(r"```[A-Za-z]*\s*(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class Triplet:
    subject: str
    predicate: str
    object: str
    chunk_id: str
    raw_predicate: str

    @property
    def key(self):
        return self.subject, self.predicate, self.object


class TripletItem(BaseModel):
    model_config = ConfigDict(extra="forbid")

    subject: StrictStr
    predicate: StrictStr
    object: StrictStr


_ITEMS = TypeAdapter(list[TripletItem])


def _candidate_lists(text):
    decoder = json.JSONDecoder()
    stripped = text.strip()
    sources = [stripped] + [m.group(1).strip() for m in _FENCE.finditer(text)]
    for source in sources:
        try:
            value, _ = decoder.raw_decode(source)
        except json.JSONDecodeError:
            continue
        if isinstance(value, list):
            yield value
    position = text.find("[")
    while position != -1:
        try:
            value, _ = decoder.raw_decode(text, position)
        except json.JSONDecodeError:
            pass
        else:
            if isinstance(value, list):
                yield value
        position = text.find("[", position + 1)


def parse_triplets(response_text, chunk_id):
    """
    Returns:
        list[Triplet]: deduplicated triplets in emission order (may be empty).

    Raises:
        TripletParseError: no well-formed list, or structurally invalid entries.
    """
    lists = _candidate_lists(response_text or "")
    # citation-like lists ("[1]") in surrounding prose are skipped
    payload = next((value for value in lists if all(isinstance(item, dict) for item in value)), None)
    if payload is None:
        raise TripletParseError(f"no JSON list found in response for chunk {chunk_id}")
    try:
        items = _ITEMS.validate_python(payload)
    except ValidationError as exc:
        raise TripletParseError(f"malformed triplet list for chunk {chunk_id}: "
                                f"{exc.error_count()} invalid entries") from exc

    triplets, seen = [], set()
    for position, item in enumerate(items):
        subject, raw_predicate, obj = item.subject.strip(), item.predicate.strip(), item.object.strip()
        predicate = try_canonicalize(raw_predicate) if raw_predicate else None
        if not subject or not obj or predicate is None:
            logger.warning("stage=extract event=triplet_dropped chunk=%s position=%d reason=empty_slot",
                           chunk_id, position)
            continue
        triplet = Triplet(subject=subject, predicate=predicate, object=obj,
                          chunk_id=chunk_id, raw_predicate=raw_predicate)
        if triplet.key in seen:
            continue
        seen.add(triplet.key)
        triplets.append(triplet)
    return triplets
