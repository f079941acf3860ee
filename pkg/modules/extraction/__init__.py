from modules.extraction.kg_store import read_failures, read_knowledge_graph, write_failures, write_knowledge_graph
from modules.extraction.prompt_builder import DEFAULT_EXEMPLARS, Exemplar, build_extraction_prompt
from modules.extraction.triplet_extractor import (
    ChunkExtraction,
    ExtractionFailure,
    FailureReason,
    KnowledgeGraph,
    extract_chunk,
    extract_document,
)
from modules.extraction.triplet_parser import Triplet, parse_triplets

__all__ = [
    "ChunkExtraction", "DEFAULT_EXEMPLARS", "Exemplar", "ExtractionFailure", "FailureReason",
    "KnowledgeGraph", "Triplet", "build_extraction_prompt", "extract_chunk", "extract_document",
    "parse_triplets", "read_failures", "read_knowledge_graph", "write_failures", "write_knowledge_graph",
]
