"""Automatic, chunk-by-chunk ontology induction (a sequential fold of merge ∘ induce_step)."""
from __future__ import annotations

import json
import logging
import re

from modules.corpus.chunker import DEFAULT_CHUNK_SIZE, DEFAULT_OVERLAP, chunk_document
from modules.errors import CorpusError
from modules.llm_gateway.provider_types import Message, ProviderRequest, RequestTag, Role
from modules.ontology.label_normalizer import try_canonicalize
from modules.ontology.ontology_store import Concept, Ontology, OntologyProposal, Relation, merge

logger = logging.getLogger(__name__)

MAX_PARSE_RETRIES = 2

INDUCTION_SYSTEM_PROMPT = (
    "You maintain the ontology of a knowledge graph built from one corporate annual report. "
    "The ontology lists concept types and canonical snake_case relation labels."
)

INDUCTION_INSTRUCTIONS = """Below is the CURRENT ONTOLOGY and the next TEXT CHUNK of the report.
Propose ONLY the additional concept types and relation labels that are required to describe
the information in this chunk and that are not already in the current ontology.
Use short snake_case labels. If nothing is missing, return empty lists.

Answer with a single JSON object and nothing else:
{"concepts": [{"label": "...", "description": "..."}], "relations": [{"label": "...", "description": "..."}]}"""

FORMAT_REMINDER = ('Your previous answer could not be parsed. Reply with exactly one JSON object of the form '
                   '{"concepts": [...], "relations": [...]} and no other text.')

_FENCE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def _describe(ont):
    concepts = "\n".join(f"- {c.canonical_label}" + (f": {c.description}" if c.description else "")
                         for c in ont.concepts) or "(none)"
    relations = "\n".join(f"- {r.canonical_label}" + (f": {r.description}" if r.description else "")
                          for r in ont.relations) or "(none)"
    return f"Concepts:\n{concepts}\nRelations:\n{relations}"


def build_induction_prompt(current, chunk):
    user = (f"{INDUCTION_INSTRUCTIONS}\n\nCURRENT ONTOLOGY\n{_describe(current)}\n\n"
            f"TEXT CHUNK ({chunk.id})\n<<<\n{chunk.text}\n>>>")
    return ProviderRequest(
        messages=(Message(Role.SYSTEM, INDUCTION_SYSTEM_PROMPT), Message(Role.USER, user)),
        request_tag=RequestTag.INDUCTION,
        context={
            "chunk_id": chunk.id,
            "chunk_index": str(chunk.index),
            "chunk_text": chunk.text,
            "relations": "\n".join(sorted(current.relation_labels)),
            "concepts": "\n".join(sorted(current.concept_labels)),
            "attempt": "0",
        },
    )


def _load_object(text):
    candidates = [text.strip()]
    candidates.extend(m.group(1).strip() for m in _FENCE.finditer(text))
    start = text.find("{")
    if start != -1:
        candidates.append(text[start:])
    decoder = json.JSONDecoder()
    for candidate in candidates:
        try:
            value, _ = decoder.raw_decode(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(value, dict):
            return value
    return None


def _entries(raw_list):
    """Accept bare label strings or {label, description?} objects."""
    if not isinstance(raw_list, list):
        raise TypeError("expected a list")
    for item in raw_list:
        if isinstance(item, str):
            yield item, None
        elif isinstance(item, dict) and isinstance(item.get("label"), str):
            description = item.get("description")
            yield item["label"], description if isinstance(description, str) and description.strip() else None
        else:
            raise TypeError(f"unexpected entry {item!r}")


def parse_proposal(text, current, chunk_id):
    """Parse an induction answer; None when the answer is structurally unusable."""
    payload = _load_object(text)
    if payload is None:
        return None
    try:
        raw_concepts = list(_entries(payload.get("concepts", [])))
        raw_relations = list(_entries(payload.get("relations", [])))
    except TypeError:
        return None

    concepts, relations = {}, {}
    for raw, description in raw_concepts:
        label = try_canonicalize(raw)
        if label is None:
            logger.warning("stage=induce event=label_dropped chunk=%s kind=concept raw=%r", chunk_id, raw)
        elif label not in current.concept_labels and label not in concepts:
            concepts[label] = Concept(canonical_label=label, description=description)
    for raw, description in raw_relations:
        label = try_canonicalize(raw)
        if label is None:
            logger.warning("stage=induce event=label_dropped chunk=%s kind=relation raw=%r", chunk_id, raw)
        elif label not in current.relation_labels and label not in relations:
            relations[label] = Relation(canonical_label=label, description=description)
    return OntologyProposal(
        proposed_concepts=tuple(concepts.values()),
        proposed_relations=tuple(relations.values()),
        source_chunk_id=chunk_id,
    )


def induce_step(current, chunk, gateway, max_parse_retries=MAX_PARSE_RETRIES):
    """
    Ask the provider which concepts and relations this chunk still needs.

    Proposals duplicating the current ontology are dropped. After `max_parse_retries`
    unparseable answers an empty proposal flagged `parse_failed` is returned.
    Provider failures propagate.
    """
    request = build_induction_prompt(current, chunk)
    for attempt in range(max_parse_retries + 1):
        response = gateway.send(request)
        proposal = parse_proposal(response.text, current, chunk.id)
        if proposal is not None:
            return proposal
        logger.warning("stage=induce event=unparseable chunk=%s attempt=%d", chunk.id, attempt)
        request = request.with_user_suffix(FORMAT_REMINDER, attempt=str(attempt + 1))
    logger.warning("stage=induce event=proposal_skipped chunk=%s reason=unparseable_after_retries", chunk.id)
    return OntologyProposal(source_chunk_id=chunk.id, parse_failed=True)


def iter_induction(doc, gateway, chunk_size=DEFAULT_CHUNK_SIZE, overlap=DEFAULT_OVERLAP, on_step=None):
    """Yield O_0 (empty) and every intermediate ontology O_1 … O_n of the fold."""
    if not doc.sentences:
        raise CorpusError(f"document {doc.id} has no sentences to induce from")
    current = Ontology.empty_induced(doc.id)
    yield current
    for chunk in chunk_document(doc, chunk_size, overlap):
        proposal = induce_step(current, chunk, gateway)
        current = merge(current, proposal)
        logger.info("stage=induce event=chunk_done chunk=%s added_concepts=%d added_relations=%d version=%d",
                    chunk.id, len(proposal.proposed_concepts), len(proposal.proposed_relations), current.version)
        if on_step is not None:
            on_step(chunk, proposal, current)
        yield current


def induce_ontology(doc, gateway, chunk_size=DEFAULT_CHUNK_SIZE, overlap=DEFAULT_OVERLAP, on_step=None):
    """Document-specific ontology, built strictly sequentially from the empty ontology."""
    current = None
    for current in iter_induction(doc, gateway, chunk_size, overlap, on_step):
        pass
    return current
