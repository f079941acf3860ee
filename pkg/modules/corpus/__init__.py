from modules.corpus.chunker import Chunk, chunk_document, read_chunks, write_chunks
from modules.corpus.document_loader import Document, load_document
from modules.corpus.sentence_segmenter import Sentence, segment_sentences

__all__ = [
    "Chunk", "Document", "Sentence",
    "chunk_document", "load_document", "read_chunks", "segment_sentences", "write_chunks",
]
