import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from modules.corpus.sentence_segmenter import Sentence, segment_sentences
from modules.errors import CorpusError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Document:
    id: str
    source_path: str
    raw_text: str
    sentences: tuple[Sentence, ...]
    total_sentences: int
    fraction: Fraction = Fraction(1)

    @property
    def text(self):
        return " ".join(sentence.text for sentence in self.sentences)


def as_fraction(value):
    """Exact rational for a user-supplied fraction; floats go through their decimal repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def document_id_for(path):
    slug = re.sub(r"[^A-Za-z0-9]+", "-", Path(path).stem).strip("-").lower()
    return slug or "document"


def retained_count(total, fraction):
    """ceil(fraction × total), computed exactly."""
    return math.ceil(as_fraction(fraction) * total)


def load_document(path, fraction=1, doc_id=None):
    """
    Read a UTF-8 report and keep the first ceil(fraction × N) sentences.

    Args:
        path (str | Path): Report file (plain text, optional markdown).
        fraction (float | Fraction): Share of the document to keep, in (0, 1].
        doc_id (str): Optional explicit id; defaults to a slug of the file stem.

    Returns:
        Document: the segmented (and possibly truncated) document.
    """
    try:
        fraction = as_fraction(fraction)
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"fraction must be a number in (0, 1], got {fraction!r}") from exc
    if not 0 < fraction <= 1:
        raise CorpusError(f"fraction must be in (0, 1], got {fraction}")

    path = Path(path)
    try:
        raw_text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusError(f"cannot read document {path}: {exc}") from exc
    if not raw_text.strip():
        raise CorpusError(f"document {path} is empty")

    sentences = segment_sentences(raw_text)
    if not sentences:
        raise CorpusError(f"document {path} contains no sentences")
    keep = retained_count(len(sentences), fraction)

    doc = Document(
        id=doc_id or document_id_for(path),
        source_path=str(path),
        raw_text=raw_text,
        sentences=tuple(sentences[:keep]),
        total_sentences=len(sentences),
        fraction=fraction,
    )
    logger.info("stage=ingest event=document_loaded doc=%s sentences=%d total=%d fraction=%s",
                doc.id, keep, len(sentences), fraction)
    return doc
