import re
import unicodedata

from modules.errors import LabelError

_SEPARATORS = re.compile(r"[\s\-]+")
_DISALLOWED = re.compile(r"[^a-z0-9_]")
_UNDERSCORES = re.compile(r"_+")
# Latin letters NFKD leaves whole
_TRANSLITERATION = str.maketrans({"ø": "o", "æ": "ae", "œ": "oe", "đ": "d", "ł": "l", "þ": "th", "ð": "d"})


def _fold_ascii(text):
    """Casefold and strip diacritics: "Årsredovisning" -> "arsredovisning"."""
    decomposed = unicodedata.normalize("NFKD", text.casefold().translate(_TRANSLITERATION))
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def canonicalize_label(raw):
    """
    Canonical snake_case form of a concept or relation label.

    Folds to ASCII (diacritics stripped, ø -> o), turns whitespace and hyphen runs
    into one underscore, drops anything that is not [a-z0-9_], collapses underscore
    runs and trims them at both ends.
    Idempotent: canonicalize_label(canonicalize_label(x)) == canonicalize_label(x).
    """
    if raw is None or not str(raw).strip():
        raise LabelError("label is empty")
    label = _SEPARATORS.sub("_", _fold_ascii(str(raw).strip()))
    label = _DISALLOWED.sub("", label)
    label = _UNDERSCORES.sub("_", label).strip("_")
    if not label:
        raise LabelError(f"label {raw!r} is empty after canonicalization")
    return label


def try_canonicalize(raw):
    """canonicalize_label, or None when the label cannot be canonicalized."""
    try:
        return canonicalize_label(raw)
    except LabelError:
        return None


# Example usage
if __name__ == "__main__":
    for raw in ["driven by", "has_value", "Reports--Metric "]:
        print(f"{raw!r} -> {canonicalize_label(raw)!r}")
