import json
from dataclasses import dataclass

from modules.corpus.sentence_segmenter import Sentence
from modules.errors import CorpusError

DEFAULT_CHUNK_SIZE = 5
DEFAULT_OVERLAP = 0


@dataclass(frozen=True)
class Chunk:
    id: str
    index: int
    sentences: tuple[Sentence, ...]
    text: str

    @property
    def sentence_indices(self):
        return [sentence.index for sentence in self.sentences]


def chunk_id_for(document_id, index):
    return f"{document_id}:c{index:04d}"


def chunk_document(doc, chunk_size=DEFAULT_CHUNK_SIZE, overlap=DEFAULT_OVERLAP):
    """
    Group a document's sentences into fixed-size windows.

    With overlap 0 the chunks partition the sentences: ceil(N / chunk_size) chunks,
    all full except possibly the last. With overlap k consecutive chunks share k sentences.
    """
    if not isinstance(chunk_size, int) or chunk_size < 1:
        raise CorpusError(f"chunk_size must be >= 1, got {chunk_size!r}")
    if not isinstance(overlap, int) or overlap < 0 or overlap >= chunk_size:
        raise CorpusError(f"overlap must be in [0, chunk_size), got {overlap!r}")

    sentences = doc.sentences
    step = chunk_size - overlap
    chunks = []
    for start in range(0, len(sentences), step):
        window = tuple(sentences[start:start + chunk_size])
        index = len(chunks)
        chunks.append(Chunk(
            id=chunk_id_for(doc.id, index),
            index=index,
            sentences=window,
            text=" ".join(sentence.text for sentence in window),
        ))
        if start + chunk_size >= len(sentences):
            break
    return chunks


def write_chunks(chunks, path):
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        for chunk in chunks:
            record = {
                "id": chunk.id,
                "index": chunk.index,
                "sentences": [
                    {"index": s.index, "text": s.text, "span": list(s.char_span)} for s in chunk.sentences
                ],
                "text": chunk.text,
            }
            file.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return path


def read_chunks(path):
    chunks = []
    with open(path, encoding="utf-8") as file:
        for line in file:
            if not line.strip():
                continue
            record = json.loads(line)
            sentences = tuple(
                Sentence(index=s["index"], text=s["text"], char_span=tuple(s["span"]))
                for s in record["sentences"]
            )
            chunks.append(Chunk(id=record["id"], index=record["index"], sentences=sentences, text=record["text"]))
    return chunks
