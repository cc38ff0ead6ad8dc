"""Identifier and comment tokenization.

Splits identifiers on naming-convention boundaries (camelCase humps,
underscores, digits, punctuation), lowercases, removes programming-language
keywords and English stop words, drops tokens shorter than two characters,
and stems what survives. Multiplicity is preserved: downstream the matrix
needs counts, not a set.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable

from .stemmer import stem

# Lowercase hump followed by an uppercase start ("drawFigure" -> draw|Figure),
# then acronym runs followed by a capitalized word ("XMLHttp" -> XML|Http).
_HUMP = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_ACRONYM = re.compile(r"(?<=[A-Z])(?=[A-Z][a-z])")
_NON_ALPHA = re.compile(r"[^A-Za-z]+")

# Keyword list for one mainstream object-oriented language (Java), plus its
# literals; overridable via keywords=.
JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null
    var record sealed permits yield""".split()
)

# Fixed English stop list (~120 words).
STOP_WORDS = frozenset(
    """a about above after again all also am an and any are as at be because
    been before being below between both but by can cannot could did do does
    doing down during each few for from further get had has have having he her
    here hers him his how i if in into is it its itself just me more most my
    no nor not now of off on once only or other our ours out over own same she
    should so some such than that the their theirs them then there these they
    this those through to too under until up upon very was we were what when
    where which while who whom why will with would you your yours""".split()
)


def split_identifier(raw: str) -> list[str]:
    """Split one raw identifier into lowercase word fragments.

    Digits and non-alphabetic characters act as separators and are dropped.
    No filtering or stemming happens here.
    """
    parts = []
    for chunk in _NON_ALPHA.split(raw):
        if not chunk:
            continue
        chunk = _ACRONYM.sub(" ", chunk)
        chunk = _HUMP.sub(" ", chunk)
        parts.extend(p.lower() for p in chunk.split())
    return parts


class Tokenizer:
    """Deterministic raw-text -> term pipeline shared by every stage.

    The same instance must be used for source facts and for free-text
    queries so that both sides agree on stems.
    """

    def __init__(
        self,
        stop_words: Iterable[str] = STOP_WORDS,
        keywords: Iterable[str] = JAVA_KEYWORDS,
    ):
        self.stop_words = frozenset(w.lower() for w in stop_words)
        self.keywords = frozenset(w.lower() for w in keywords)
        self._dropped = self.stop_words | self.keywords

    def tokenize(self, raw: str) -> list[str]:
        """Tokenize raw text into stemmed terms, preserving multiplicity."""
        terms = []
        for word in split_identifier(raw):
            if len(word) < 2 or word in self._dropped:
                continue
            stemmed = stem(word)
            # degenerate stems ("ies" -> "i") would break the dictionary's
            # minimum-length invariant
            if len(stemmed) >= 2:
                terms.append(stemmed)
        return terms


def load_word_list(path: str | Path) -> frozenset[str]:
    """Read one word per line; blank lines and # comments ignored."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word.lower())
    return frozenset(words)


DEFAULT_TOKENIZER = Tokenizer()


def tokenize(raw: str) -> list[str]:
    """Tokenize with the default stop and keyword lists."""
    return DEFAULT_TOKENIZER.tokenize(raw)
