"""Sentence segmentation for markdown-flavoured report text.

Rules:
- table rows (`|`-delimited lines, outer pipes optional) become one pseudo-sentence each,
  pipes kept between cells; separator rows (`|---|:--:|`) are skipped;
- `#` headers become one sentence each with the hash markers stripped;
- prose lines are grouped into paragraphs (blank lines, headers and tables end a paragraph)
  and split on `.`, `!` or `?` followed by whitespace and an uppercase letter, or by a line end;
- abbreviations, single-letter initials and decimal numbers never end a sentence;
- emphasis markers (`*`, `_`) are stripped from sentence text.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

# Tokens that never end a sentence when they precede a period (compared lowercased,
# without the final period). Amount suffixes like "bn" are left out on purpose:
# "SEK 5 bn. EBIT rose." has to split.
ABBREVIATIONS = frozenset({
    "approx", "no", "nos", "vs", "e.g", "i.e", "incl", "excl", "ca", "cf",
    "fig", "figs", "nr", "resp", "mr", "mrs", "ms", "dr", "prof", "st", "inc", "ltd",
    "corp", "co", "dept", "est", "jan", "feb", "mar", "apr", "jun", "jul", "aug",
    "sep", "sept", "oct", "nov", "dec", "p", "pp", "vol",
})

_TERMINAL = re.compile(r"[.!?]+[\"'\)\]\*_]*")
_AFTER_TERMINAL = re.compile(r"(\s*)[*_\"'(]*(.?)")
_TABLE_SEPARATOR = re.compile(r"^\|?\s*:?-{2,}:?\s*(\|\s*:?-{2,}:?\s*)*\|?$")
_HEADER = re.compile(r"^(#{1,6})\s*(.*?)\s*#*\s*$")
_EMPHASIS = re.compile(r"(?<![A-Za-z0-9])[*_]+|[*_]+(?![A-Za-z0-9])|\*+")
_WHITESPACE = re.compile(r"\s+")
_LEADING_MARKERS = "*_\"'([ \t"


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    char_span: tuple[int, int]


def strip_emphasis(text):
    """Drop `*`/`_` emphasis markers while keeping intra-word underscores (EBIT_margin)."""
    cleaned = _EMPHASIS.sub("", text)
    return _WHITESPACE.sub(" ", cleaned).strip()


def _is_table_row(stripped, in_table=False, next_stripped=""):
    if stripped.startswith("|"):
        return True
    # outer pipes are optional once a table is open or a separator row follows
    if "|" not in stripped:
        return False
    return in_table or ("|" in next_stripped and bool(_TABLE_SEPARATOR.match(next_stripped)))


def _table_row_text(stripped):
    cells = [cell.strip() for cell in stripped.strip("|").split("|")]
    return strip_emphasis(" | ".join(cells))


def _previous_token(text, end):
    start = max(text.rfind(" ", 0, end), text.rfind("\n", 0, end), text.rfind("\t", 0, end)) + 1
    return text[start:end].lstrip(_LEADING_MARKERS).lower()


def _is_protected(token):
    if not token:
        return False
    if token in ABBREVIATIONS:
        return True
    # single-letter initials ("A. B. Volvo", "U.S.")
    return bool(re.fullmatch(r"(?:[a-z]\.)*[a-z]", token))


def _split_points(paragraph):
    """Yield end offsets (exclusive) of sentences inside one paragraph."""
    content_end = len(paragraph.rstrip())
    for match in _TERMINAL.finditer(paragraph):
        end = match.end()
        if end >= content_end:
            continue  # paragraph end closes the sentence anyway
        if not paragraph[end].isspace():
            continue  # "3.4", "e.g.x", "approx.5"
        after = _AFTER_TERMINAL.match(paragraph, end)
        if "\n" not in after.group(1) and not after.group(2).isupper():
            continue
        if _is_protected(_previous_token(paragraph, match.start())):
            continue
        yield end


def _segment_paragraph(raw_text, start, end):
    """Split raw_text[start:end] into (text, span) pairs."""
    paragraph = raw_text[start:end]
    pieces = []
    cursor = 0
    for split_at in list(_split_points(paragraph)) + [len(paragraph)]:
        chunk = paragraph[cursor:split_at]
        lead = len(chunk) - len(chunk.lstrip())
        text = strip_emphasis(chunk)
        if text:
            piece_start = start + cursor + lead
            piece_end = start + cursor + len(chunk.rstrip())
            pieces.append((text, (piece_start, piece_end)))
        cursor = split_at
    return pieces


def segment_sentences(raw_text):
    """Deterministically split raw report text into an ordered list of Sentence."""
    pieces = []
    paragraph_start = None
    paragraph_end = None
    offset = 0
    in_table = False
    lines = raw_text.splitlines(keepends=True)

    def flush():
        if paragraph_start is not None:
            pieces.extend(_segment_paragraph(raw_text, paragraph_start, paragraph_end))

    for position, line in enumerate(lines):
        line_start = offset
        offset += len(line)
        content = line.rstrip("\r\n")
        stripped = content.strip()
        lead = len(content) - len(content.lstrip())
        span = (line_start + lead, line_start + lead + len(stripped))

        if not stripped:
            flush()
            paragraph_start = None
            in_table = False
            continue

        next_stripped = lines[position + 1].strip() if position + 1 < len(lines) else ""
        is_row = _is_table_row(stripped, in_table, next_stripped)
        in_table = is_row
        header = None if is_row else _HEADER.match(stripped)
        if is_row or header:
            flush()
            paragraph_start = None
            if is_row:
                if _TABLE_SEPARATOR.match(stripped):
                    continue
                text = _table_row_text(stripped)
            else:
                text = strip_emphasis(header.group(2))
            if text:
                pieces.append((text, span))
            continue

        if paragraph_start is None:
            paragraph_start = span[0]
        paragraph_end = span[1]

    flush()
    return [Sentence(index=i, text=text, char_span=span) for i, (text, span) in enumerate(pieces)]
