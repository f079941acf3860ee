import math
import time

import numpy as np
import pytest

from modules.corpus.chunker import chunk_document, chunk_id_for, read_chunks, write_chunks
from modules.corpus.document_loader import Document, load_document
from modules.corpus.sentence_segmenter import Sentence, segment_sentences
from modules.errors import CorpusError


def _document_from_text(tmp_path, text):
    path = tmp_path / "doc.txt"
    path.write_text(text, encoding="utf-8")
    return load_document(path)


def _texts(raw):
    return [s.text for s in segment_sentences(raw)]


def _document(n, doc_id="doc"):
    sentences = tuple(Sentence(index=i, text=f"S{i}.", char_span=(0, 0)) for i in range(n))
    return Document(id=doc_id, source_path="mem", raw_text="", sentences=sentences, total_sentences=n)


def test_segment_splits_prose_on_terminal_and_uppercase():
    raw = ("Net cash was SEK 27.1 (27.5) bn, which was largely driven by investing activities. "
           "The Group reported strong results!")
    assert _texts(raw) == [
        "Net cash was SEK 27.1 (27.5) bn, which was largely driven by investing activities.",
        "The Group reported strong results!",
    ]


def test_abbreviations_and_initials_do_not_split():
    raw = "Sales in the Nordics, e.g. Sweden, rose. The group is named after A. B. Volvo. Costs fell."
    assert _texts(raw) == [
        "Sales in the Nordics, e.g. Sweden, rose.",
        "The group is named after A. B. Volvo.",
        "Costs fell.",
    ]


def test_amount_suffix_still_ends_a_sentence():
    assert _texts("Net income was SEK 5 bn. EBIT rose.") == ["Net income was SEK 5 bn.", "EBIT rose."]
    assert _texts("Net income was SEK 5 bn. in total.") == ["Net income was SEK 5 bn. in total."]


def test_tables_headers_and_emphasis():
    raw = (
        "## Key figures\n"
        "\n"
        "| Metric | 2024 | 2023 |\n"
        "|---|:--:|---:|\n"
        "| **Net cash** | 27.1 | 27.5 |\n"
        "\n"
        "The *EBIT_margin* improved. Outlook is *stable*.\n"
    )
    assert _texts(raw) == [
        "Key figures",
        "Metric | 2024 | 2023",
        "Net cash | 27.1 | 27.5",
        "The EBIT_margin improved.",
        "Outlook is stable.",
    ]


def test_tables_without_outer_pipes():
    raw = (
        "Segment | 2024 | 2023\n"
        "---|---:|---:\n"
        "Marine Propulsion | 21,840 | 18,660\n"
        "Energy Storage | 14,157 | 12,320\n"
        "Both segments grew. Prices rose.\n"
    )
    assert _texts(raw) == [
        "Segment | 2024 | 2023",
        "Marine Propulsion | 21,840 | 18,660",
        "Energy Storage | 14,157 | 12,320",
        "Both segments grew.",
        "Prices rose.",
    ]
    assert _texts("Revenue rose | see note 4. Costs fell.") == ["Revenue rose | see note 4.", "Costs fell."]


def test_line_break_inside_paragraph_ends_sentence():
    raw = "Revenue grew in all regions.\nmargins held up well"
    assert _texts(raw) == ["Revenue grew in all regions.", "margins held up well"]


def test_sentence_spans_point_into_raw_text():
    raw = "First sentence here. Second one follows.\n\nA new paragraph."
    for sentence in segment_sentences(raw):
        start, end = sentence.char_span
        assert raw[start:end] == sentence.text
    assert [s.index for s in segment_sentences(raw)] == [0, 1, 2]


def test_load_document_keeps_exact_fraction(tmp_path):
    path = tmp_path / "Annual Report 2024.txt"
    path.write_text(" ".join(f"Sentence number {i} is here." for i in range(10)), encoding="utf-8")

    doc = load_document(path, fraction=0.25)
    assert doc.id == "annual-report-2024"
    assert doc.total_sentences == 10
    assert len(doc.sentences) == 3

    # 0.3 * 10 is exactly 3 in decimal arithmetic, not 3.0000000000000004
    assert len(load_document(path, fraction=0.3).sentences) == 3
    assert len(load_document(path).sentences) == 10


@pytest.mark.parametrize("fraction", [0, -0.5, 1.5, "half"])
def test_load_document_rejects_bad_fraction(tmp_path, fraction):
    path = tmp_path / "report.txt"
    path.write_text("One sentence.", encoding="utf-8")
    with pytest.raises(CorpusError):
        load_document(path, fraction=fraction)


def test_load_document_rejects_missing_and_empty_files(tmp_path):
    with pytest.raises(CorpusError):
        load_document(tmp_path / "missing.txt")
    empty = tmp_path / "empty.txt"
    empty.write_text("  \n\n", encoding="utf-8")
    with pytest.raises(CorpusError):
        load_document(empty)


def test_chunk_count_and_partition_property():
    rng = np.random.default_rng(7)
    sizes = [1, 4, 5, 6, 10, 50_000] + [int(n) for n in rng.integers(1, 50_001, size=20)]
    for n in sizes:
        chunks = chunk_document(_document(n))
        assert len(chunks) == math.ceil(n / 5)
        flat = [i for chunk in chunks for i in chunk.sentence_indices]
        assert flat == list(range(n))
        assert all(len(chunk.sentences) == 5 for chunk in chunks[:-1])
        assert 1 <= len(chunks[-1].sentences) <= 5
        assert [chunk.index for chunk in chunks] == list(range(len(chunks)))


def test_overlapping_chunks_share_exactly_overlap_sentences():
    rng = np.random.default_rng(11)
    for n in rng.integers(1, 500, size=30):
        chunks = chunk_document(_document(int(n)), chunk_size=5, overlap=2)
        covered = {i for chunk in chunks for i in chunk.sentence_indices}
        assert covered == set(range(int(n)))
        for left, right in zip(chunks, chunks[1:]):
            assert left.sentence_indices[-2:] == right.sentence_indices[:2]


def test_chunk_ids_and_text():
    chunks = chunk_document(_document(7, doc_id="volvo"), chunk_size=5)
    assert [c.id for c in chunks] == ["volvo:c0000", "volvo:c0001"]
    assert chunk_id_for("volvo", 12) == "volvo:c0012"
    assert chunks[1].text == "S5. S6."


@pytest.mark.parametrize("chunk_size,overlap", [(0, 0), (5, 5), (5, -1), (3, 7)])
def test_chunk_document_rejects_bad_parameters(chunk_size, overlap):
    with pytest.raises(CorpusError):
        chunk_document(_document(10), chunk_size=chunk_size, overlap=overlap)


def test_chunks_survive_a_trip_through_the_run_directory(tmp_path):
    doc = _document_from_text(tmp_path, "Alpha rose. Beta fell.\n\n| Gamma | 1.5 |\n")
    chunks = chunk_document(doc, chunk_size=2)
    path = write_chunks(chunks, tmp_path / "chunks.jsonl")
    assert read_chunks(path) == chunks


def test_ten_thousand_sentences_segment_and_chunk_quickly():
    paragraphs = []
    for p in range(2_000):
        paragraphs.append(" ".join(f"Segment {p} reported value {k} of SEK {p}.{k} bn." for k in range(5)))
    raw = "\n\n".join(paragraphs)

    started = time.perf_counter()
    sentences = segment_sentences(raw)
    doc = Document(id="big", source_path="mem", raw_text=raw, sentences=tuple(sentences),
                   total_sentences=len(sentences))
    chunks = chunk_document(doc)
    elapsed = time.perf_counter() - started

    assert len(sentences) == 10_000
    assert len(chunks) == 2_000
    assert elapsed < 1.0
