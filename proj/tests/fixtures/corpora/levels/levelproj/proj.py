import util
from util import normalize


def tidy_name(raw):
    """Normalize the raw name and strip the surrounding whitespace."""
    text = normalize(raw)
    if not text:
        return ""
    return text.strip()


def count_words(raw):
    """Count whitespace-separated words after normalization."""
    text = util.normalize(raw)
    if not text:
        return 0
    parts = text.split()
    return len(parts)
