import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from modules.corpus.chunker import DEFAULT_CHUNK_SIZE, DEFAULT_OVERLAP, chunk_document
from modules.errors import CassetteMissError, PipelineError, ProviderError, TripletParseError
from modules.extraction.prompt_builder import DEFAULT_EXEMPLARS, FORMAT_REMINDER, build_extraction_prompt
from modules.extraction.triplet_parser import parse_triplets

logger = logging.getLogger(__name__)

MAX_FORMAT_RETRIES = 2


class FailureReason(str, Enum):
    UNPARSEABLE = "unparseable_after_retries"
    PROVIDER_ERROR = "provider_error"


@dataclass(frozen=True)
class ExtractionFailure:
    chunk_id: str
    reason: FailureReason
    raw_text: str


@dataclass(frozen=True)
class KnowledgeGraph:
    """G = ∪ T_i, ordered by (chunk index, emission order within the chunk)."""

    triplets: tuple
    document_id: str
    ontology_version: int
    config_fingerprint: str


@dataclass(frozen=True)
class ChunkExtraction:
    chunk_id: str
    triplets: tuple
    failure: ExtractionFailure = None


def extract_chunk(chunk, ont, gateway, exemplars=DEFAULT_EXEMPLARS, max_format_retries=MAX_FORMAT_RETRIES):
    """
    prompt -> send -> parse, re-prompting with a format reminder on parse failure.

    Predicates outside the ontology are kept: conformance is measured, not enforced.

    Returns:
        ChunkExtraction: triplets, plus a failure record when every attempt was unparseable.
    """
    request = build_extraction_prompt(chunk, ont, exemplars)
    raw_text = ""
    for attempt in range(max_format_retries + 1):
        response = gateway.send(request)
        raw_text = response.text
        try:
            triplets = parse_triplets(raw_text, chunk.id)
        except TripletParseError as exc:
            logger.warning("stage=extract event=unparseable chunk=%s attempt=%d reason=%s", chunk.id, attempt, exc)
            request = request.with_user_suffix(FORMAT_REMINDER, attempt=str(attempt + 1))
            continue
        logger.info("stage=extract event=chunk_done chunk=%s triplets=%d attempts=%d",
                    chunk.id, len(triplets), attempt + 1)
        return ChunkExtraction(chunk_id=chunk.id, triplets=tuple(triplets))

    failure = ExtractionFailure(chunk_id=chunk.id, reason=FailureReason.UNPARSEABLE, raw_text=raw_text)
    return ChunkExtraction(chunk_id=chunk.id, triplets=(), failure=failure)


def _extract_or_record(chunk, ont, gateway, exemplars):
    try:
        return extract_chunk(chunk, ont, gateway, exemplars)
    except CassetteMissError:
        raise
    except ProviderError as exc:
        logger.error("stage=extract event=provider_error chunk=%s reason=%s", chunk.id, exc)
        failure = ExtractionFailure(chunk_id=chunk.id, reason=FailureReason.PROVIDER_ERROR, raw_text=str(exc))
        return ChunkExtraction(chunk_id=chunk.id, triplets=(), failure=failure)


def extract_document(doc, ont, gateway, exemplars=DEFAULT_EXEMPLARS, chunk_size=DEFAULT_CHUNK_SIZE,
                     overlap=DEFAULT_OVERLAP, config_fingerprint="", max_workers=None, chunks=None):
    """
    Extract every chunk (concurrently, up to the gateway's in-flight bound) and
    concatenate the results in chunk-index order.

    Returns:
        tuple[KnowledgeGraph, list[ExtractionFailure]]

    Raises:
        PipelineError: every chunk failed.
    """
    if chunks is None:
        chunks = chunk_document(doc, chunk_size, overlap)
    workers = max_workers or getattr(gateway, "max_in_flight", 1)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda chunk: _extract_or_record(chunk, ont, gateway, exemplars), chunks))

    failures = [result.failure for result in results if result.failure is not None]
    if chunks and len(failures) == len(chunks):
        raise PipelineError(f"extraction failed for all {len(chunks)} chunks of {doc.id}")

    triplets = tuple(t for result in results for t in result.triplets)
    kg = KnowledgeGraph(
        triplets=triplets,
        document_id=doc.id,
        ontology_version=ont.version,
        config_fingerprint=config_fingerprint,
    )
    logger.info("stage=extract event=document_done doc=%s chunks=%d triplets=%d failures=%d",
                doc.id, len(chunks), len(triplets), len(failures))
    return kg, failures
