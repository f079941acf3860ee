import json
from dataclasses import dataclass, field

from modules.errors import OntologyError
from modules.llm_gateway.provider_types import Message, ProviderRequest, RequestTag, Role


@dataclass(frozen=True)
class Exemplar:
    """A generic worked example: a chunk and the triplets a correct extraction returns."""

    text: str
    triplets: tuple[tuple[str, str, str], ...] = field(default_factory=tuple)

    @classmethod
    def from_dict(cls, payload):
        triplets = tuple(
            (item["subject"], item["predicate"], item["object"]) for item in payload.get("triplets", [])
        )
        return cls(text=payload["text"], triplets=triplets)


# Generic, not tied to any input chunk: one tabular, one narrative, one with nothing to extract.
DEFAULT_EXEMPLARS = (
    Exemplar(
        text="| Key figures | 2024 | 2023 |\n| EBIT margin | 3.4% | 4.9% |",
        triplets=(("EBIT_margin", "has_value", "3.4%"),),
    ),
    Exemplar(
        text="Operating income for the Group amounted to SEK 12.3 bn, "
             "and the Board proposes a dividend of SEK 7.50 per share.",
        triplets=(
            ("Group", "reports_metric", "Operating income"),
            ("Operating income", "has_value", "SEK 12.3 bn"),
            ("dividend", "has_value", "SEK 7.50 per share"),
        ),
    ),
    Exemplar(
        text="This page intentionally left blank. See the following section for details.",
        triplets=(),
    ),
)

EXTRACTION_SYSTEM_PROMPT = (
    "You extract Subject-Predicate-Object triplets from corporate report text for a knowledge graph. "
    "You only state facts that are present in the given text."
)

FORMAT_REMINDER = ('Your previous answer was not a valid JSON list. Reply with only a JSON list of objects '
                   'with exactly the keys "subject", "predicate" and "object", all strings. '
                   'Reply with [] if there is nothing to extract.')


def _ontology_block(ont):
    lines = ["CONCEPTS:"]
    lines += [f"- {c.canonical_label}" + (f": {c.description}" if c.description else "") for c in ont.concepts]
    if not ont.concepts:
        lines.append("- (none)")
    lines.append("RELATIONS (allowed predicates):")
    for r in ont.relations:
        line = f"- {r.canonical_label}"
        if r.description:
            line += f": {r.description}"
        if r.example_usage:
            line += f" (e.g. {r.example_usage})"
        lines.append(line)
    return "\n".join(lines)


def _exemplar_block(exemplars):
    blocks = []
    for number, exemplar in enumerate(exemplars, start=1):
        answer = [{"subject": s, "predicate": p, "object": o} for s, p, o in exemplar.triplets]
        blocks.append(f"Example {number}\nText:\n{exemplar.text}\nOutput:\n{json.dumps(answer, ensure_ascii=False)}")
    return "\n\n".join(blocks)


def build_extraction_prompt(chunk, ont, exemplars=DEFAULT_EXEMPLARS):
    """
    Prompt with the full ontology, the generic exemplars and the chunk text verbatim.

    Raises:
        OntologyError: the ontology has no relations to extract with.
    """
    if not ont.relations:
        raise OntologyError("cannot build an extraction prompt for an ontology without relations")
    user = "\n\n".join([
        "ONTOLOGY\n" + _ontology_block(ont),
        "EXAMPLES\n" + (_exemplar_block(exemplars) or "(none)"),
        "Extract every (subject, predicate, object) triplet stated in the TEXT CHUNK below. "
        "Use only predicates from the RELATIONS list; never invent a new predicate. "
        "Output the results in a structured JSON format: a JSON list of objects with exactly the keys "
        '"subject", "predicate" and "object". Output [] when the chunk states no such facts.',
        f"TEXT CHUNK\n<<<\n{chunk.text}\n>>>",
    ])
    return ProviderRequest(
        messages=(Message(Role.SYSTEM, EXTRACTION_SYSTEM_PROMPT), Message(Role.USER, user)),
        request_tag=RequestTag.EXTRACTION,
        temperature=0.0,
        context={
            "chunk_id": chunk.id,
            "chunk_index": str(chunk.index),
            "chunk_text": chunk.text,
            "relations": "\n".join(r.canonical_label for r in ont.relations),
            "attempt": "0",
        },
    )
