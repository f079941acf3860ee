import re
import unicodedata

_STRIPPED = re.compile(r"[*|]")
_WHITESPACE = re.compile(r"\s+")


def normalize_for_match(text):
    """
    NFC, casefold, underscores read as spaces, `*` emphasis and `|` pipes dropped,
    whitespace collapsed and trimmed. Idempotent.
    """
    text = unicodedata.normalize("NFC", unicodedata.normalize("NFC", text or "").casefold())
    text = text.replace("_", " ")
    text = _STRIPPED.sub(" ", text)
    return _WHITESPACE.sub(" ", text).strip()


def regex_grounded(entity, chunk):
    """Strict check: the normalized entity occurs verbatim (escaped, never a pattern) in the chunk."""
    needle = normalize_for_match(entity)
    if not needle:
        return False
    return re.search(re.escape(needle), normalize_for_match(chunk.text)) is not None


# Example usage
if __name__ == "__main__":
    from modules.corpus.chunker import Chunk

    chunk = Chunk(id="demo:c0000", index=0, sentences=(),
                  text="Net cash was SEK 27.1 (27.5) bn, which was largely driven by investing activities.")
    for entity in ["Net cash", "The Group", "SEK 27.2 bn"]:
        print(f"{entity!r}: {regex_grounded(entity, chunk)}")
