"""Ontology O = (C, R) values, file IO and the monotone merge."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from modules.errors import LabelError, OntologyError
from modules.ontology.label_normalizer import canonicalize_label

logger = logging.getLogger(__name__)

RELATION_WARNING_THRESHOLD = 200


class Provenance(str, Enum):
    MANUAL = "manual"
    INDUCED = "induced"


@dataclass(frozen=True)
class Concept:
    canonical_label: str
    description: Optional[str] = None
    aliases: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class Relation:
    canonical_label: str
    description: Optional[str] = None
    example_usage: Optional[str] = None
    aliases: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class OntologyProposal:
    proposed_concepts: tuple[Concept, ...] = ()
    proposed_relations: tuple[Relation, ...] = ()
    source_chunk_id: str = ""
    parse_failed: bool = False

    @property
    def is_empty(self):
        return not self.proposed_concepts and not self.proposed_relations


@dataclass(frozen=True)
class Ontology:
    """Immutable snapshot; concepts and relations are kept sorted by label."""

    concepts: tuple[Concept, ...] = ()
    relations: tuple[Relation, ...] = ()
    provenance: Provenance = Provenance.MANUAL
    source_document_id: Optional[str] = None
    version: int = 0

    def __post_init__(self):
        for kind, entries in (("concept", self.concepts), ("relation", self.relations)):
            labels = [entry.canonical_label for entry in entries]
            if len(labels) != len(set(labels)):
                raise OntologyError(f"duplicate {kind} labels in ontology")
            for label in labels:
                if canonicalize_label(label) != label:
                    raise OntologyError(f"{kind} label {label!r} is not canonical")
        if self.provenance == Provenance.INDUCED and not self.source_document_id:
            raise OntologyError("an induced ontology must name its source document")
        object.__setattr__(self, "concepts", tuple(sorted(self.concepts, key=lambda c: c.canonical_label)))
        object.__setattr__(self, "relations", tuple(sorted(self.relations, key=lambda r: r.canonical_label)))

    @classmethod
    def empty_induced(cls, document_id):
        return cls(provenance=Provenance.INDUCED, source_document_id=document_id, version=0)

    @property
    def concept_labels(self):
        return frozenset(c.canonical_label for c in self.concepts)

    @property
    def relation_labels(self):
        return frozenset(r.canonical_label for r in self.relations)


def ontology_summary(ont):
    return {
        "concepts": len(ont.concepts),
        "relations": len(ont.relations),
        "provenance": ont.provenance.value,
        "version": ont.version,
        "source_document_id": ont.source_document_id,
    }


def _fill_concept(existing, proposed):
    description = existing.description or proposed.description
    aliases = existing.aliases | proposed.aliases
    if description == existing.description and aliases == existing.aliases:
        return existing
    return replace(existing, description=description, aliases=aliases)


def _fill_relation(existing, proposed):
    description = existing.description or proposed.description
    example = existing.example_usage or proposed.example_usage
    aliases = existing.aliases | proposed.aliases
    if (description, example, aliases) == (existing.description, existing.example_usage, existing.aliases):
        return existing
    return replace(existing, description=description, example_usage=example, aliases=aliases)


def merge(base, proposal):
    """
    base ∪ proposal, deduplicated on canonical label.

    Existing entries win; proposal descriptions, examples and aliases only fill gaps.
    The version is bumped iff something changed; base is never shrunk.
    """
    concepts = {c.canonical_label: c for c in base.concepts}
    relations = {r.canonical_label: r for r in base.relations}
    changed = False

    for concept in proposal.proposed_concepts:
        current = concepts.get(concept.canonical_label)
        merged = concept if current is None else _fill_concept(current, concept)
        if merged is not current:
            concepts[concept.canonical_label] = merged
            changed = True

    for relation in proposal.proposed_relations:
        current = relations.get(relation.canonical_label)
        merged = relation if current is None else _fill_relation(current, relation)
        if merged is not current:
            relations[relation.canonical_label] = merged
            changed = True

    if not changed:
        return base
    merged_ontology = replace(
        base,
        concepts=tuple(concepts.values()),
        relations=tuple(relations.values()),
        version=base.version + 1,
    )
    if len(merged_ontology.relations) > RELATION_WARNING_THRESHOLD >= len(base.relations):
        logger.warning("stage=induce event=ontology_large relations=%d threshold=%d",
                       len(merged_ontology.relations), RELATION_WARNING_THRESHOLD)
    return merged_ontology


# ---------------------------------------------------------------------------
# File schema
# ---------------------------------------------------------------------------

class ConceptEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str
    description: Optional[str] = None
    aliases: list[str] = Field(default_factory=list)


class RelationEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str
    description: Optional[str] = None
    example_usage: Optional[str] = None
    aliases: list[str] = Field(default_factory=list)


class OntologyFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    concepts: list[ConceptEntry] = Field(default_factory=list)
    relations: list[RelationEntry] = Field(default_factory=list)
    provenance: Provenance = Provenance.MANUAL
    source_document_id: Optional[str] = None
    version: int = Field(default=0, ge=0)


def _unique(entries, kind, path):
    seen = {}
    for entry in entries:
        try:
            label = canonicalize_label(entry.label)
        except LabelError as exc:
            raise OntologyError(f"{path}: {exc}") from exc
        if label in seen:
            raise OntologyError(f"{path}: duplicate {kind} label {label!r} "
                                f"(from {seen[label]!r} and {entry.label!r})")
        seen[label] = entry.label
        yield label, entry


def read_ontology(path):
    """Load an ontology file, keeping whatever provenance and version it records."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        parsed = OntologyFile.model_validate(payload)
    except OSError as exc:
        raise OntologyError(f"cannot read ontology {path}: {exc}") from exc
    except (json.JSONDecodeError, ValidationError) as exc:
        raise OntologyError(f"malformed ontology file {path}: {exc}") from exc

    concepts = tuple(
        Concept(canonical_label=label, description=entry.description, aliases=frozenset(entry.aliases))
        for label, entry in _unique(parsed.concepts, "concept", path)
    )
    relations = tuple(
        Relation(canonical_label=label, description=entry.description, example_usage=entry.example_usage,
                 aliases=frozenset(entry.aliases))
        for label, entry in _unique(parsed.relations, "relation", path)
    )
    return Ontology(
        concepts=concepts,
        relations=relations,
        provenance=parsed.provenance,
        source_document_id=parsed.source_document_id,
        version=parsed.version,
    )


def load_manual_ontology(path):
    """Static, hand-engineered ontology: provenance manual, version 0, at least one relation."""
    ont = read_ontology(path)
    if not ont.relations:
        raise OntologyError(f"manual ontology {path} defines no relations")
    return replace(ont, provenance=Provenance.MANUAL, source_document_id=None, version=0)


def ontology_to_dict(ont):
    concepts = []
    for c in ont.concepts:
        entry = {"label": c.canonical_label}
        if c.description is not None:
            entry["description"] = c.description
        if c.aliases:
            entry["aliases"] = sorted(c.aliases)
        concepts.append(entry)
    relations = []
    for r in ont.relations:
        entry = {"label": r.canonical_label}
        if r.description is not None:
            entry["description"] = r.description
        if r.example_usage is not None:
            entry["example_usage"] = r.example_usage
        if r.aliases:
            entry["aliases"] = sorted(r.aliases)
        relations.append(entry)
    payload = {
        "concepts": concepts,
        "relations": relations,
        "provenance": ont.provenance.value,
        "version": ont.version,
    }
    if ont.source_document_id is not None:
        payload["source_document_id"] = ont.source_document_id
    return payload


def save_ontology(ont, path):
    """Write keys and labels sorted so version-controlled diffs stay meaningful."""
    text = json.dumps(ontology_to_dict(ont), indent=2, sort_keys=True, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")
    return path
