import json

from modules.extraction.triplet_extractor import ExtractionFailure, FailureReason, KnowledgeGraph
from modules.extraction.triplet_parser import Triplet


def _dump(record):
    return json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n"


def write_knowledge_graph(kg, path):
    """One triplet per line; graph metadata is repeated on each line so rows stand alone."""
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        for index, t in enumerate(kg.triplets):
            file.write(_dump({
                "index": index,
                "subject": t.subject,
                "predicate": t.predicate,
                "raw_predicate": t.raw_predicate,
                "object": t.object,
                "chunk_id": t.chunk_id,
                "document_id": kg.document_id,
                "ontology_version": kg.ontology_version,
                "config_fingerprint": kg.config_fingerprint,
            }))
    return path


def read_knowledge_graph(path, document_id=None, ontology_version=0, config_fingerprint=""):
    triplets = []
    with open(path, encoding="utf-8") as file:
        for line in file:
            if not line.strip():
                continue
            record = json.loads(line)
            document_id = record.get("document_id", document_id)
            ontology_version = record.get("ontology_version", ontology_version)
            config_fingerprint = record.get("config_fingerprint", config_fingerprint)
            triplets.append(Triplet(
                subject=record["subject"],
                predicate=record["predicate"],
                object=record["object"],
                chunk_id=record["chunk_id"],
                raw_predicate=record.get("raw_predicate", record["predicate"]),
            ))
    return KnowledgeGraph(
        triplets=tuple(triplets),
        document_id=document_id or "",
        ontology_version=ontology_version,
        config_fingerprint=config_fingerprint,
    )


def write_failures(failures, path):
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        for failure in failures:
            file.write(_dump({"chunk_id": failure.chunk_id, "reason": failure.reason.value,
                              "raw_text": failure.raw_text}))
    return path


def read_failures(path):
    failures = []
    with open(path, encoding="utf-8") as file:
        for line in file:
            if line.strip():
                record = json.loads(line)
                failures.append(ExtractionFailure(chunk_id=record["chunk_id"],
                                                  reason=FailureReason(record["reason"]),
                                                  raw_text=record["raw_text"]))
    return failures
