"""Tokenizing, stopword removal, stemming and POS tagging.

``preprocess`` runs tokenize -> remove_stopwords -> stem -> pos_tag and
packages the result as (token, tag) pairs.  Only the tokens reach the
embedder; tags are annotations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .porter import stem_word

_TOKEN = re.compile(r"[^\W_]+(?:-[^\W_]+)*")


class Part(str, Enum):
    P1 = "p1"
    P2 = "p2"
    TARGET_TEXT = "target_text"
    EXCLUDE_TEXT = "exclude_text"


class Tag(str, Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    NUM = "NUM"
    OTHER = "OTHER"


@dataclass(frozen=True)
class ProcessedDoc:
    doc_id: str
    part: Part
    pairs: tuple[tuple[str, Tag], ...]

    @property
    def tokens(self) -> list[str]:
        return [tok for tok, _ in self.pairs]


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def load_stoplist(path=None) -> frozenset[str]:
    """Read a stopword file: one token per line, ``#`` starts a comment."""
    if path is None:
        return default_stoplist()
    return _parse_stoplist(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_stoplist() -> frozenset[str]:
    text = resources.files("kgrec.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return _parse_stoplist(text)


def _parse_stoplist(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def remove_stopwords(tokens: Iterable[str], stoplist) -> list[str]:
    return [t for t in tokens if t not in stoplist]


def stem(tokens: Iterable[str]) -> list[str]:
    return [stem_word(t) for t in tokens]


# closed-class and frequent open-class words; everything else goes to suffix rules
_LEXICON = {
    **dict.fromkeys(["well", "also", "very", "often", "however", "thus", "not", "never",
                     "almost", "rather", "further"], Tag.ADV),
    **dict.fromkeys(["new", "good", "bad", "high", "low", "poor", "better", "best",
                     "worse", "worst", "great", "large", "small", "short", "long",
                     "existing", "novel", "effective", "efficient"], Tag.ADJ),
    **dict.fromkeys(["is", "are", "be", "use", "used", "propose", "show", "improve",
                     "achieve", "fail", "suffer", "present", "make", "get"], Tag.VERB),
    **dict.fromkeys(["and", "or", "but", "the", "a", "an", "of", "in", "on", "to",
                     "for", "with", "by", "from", "no", "nor"], Tag.OTHER),
}

_SUFFIX_RULES = [
    (("ly", "li"), Tag.ADV),
    (("ize", "ise", "ify", "ing", "ed"), Tag.VERB),
    (("ous", "ful", "ive", "able", "ible", "less", "ical", "ish"), Tag.ADJ),
]

_NUMERIC = re.compile(r"^[\d][\d.,-]*$")


def _tag(token: str) -> Tag:
    if _NUMERIC.match(token) or token.isdigit():
        return Tag.NUM
    tag = _LEXICON.get(token)
    if tag is not None:
        return tag
    for suffixes, tag in _SUFFIX_RULES:
        if len(token) > 3 and token.endswith(suffixes):
            return tag
    return Tag.NOUN


def pos_tag(tokens: Iterable[str]) -> list[tuple[str, Tag]]:
    return [(t, _tag(t)) for t in tokens]


def preprocess(doc_id: str, part, text: str, stoplist=None) -> ProcessedDoc:
    if stoplist is None:
        stoplist = default_stoplist()
    tokens = remove_stopwords(tokenize(text), stoplist)
    # a stem can collapse onto a stopword ("doing" -> "do")
    tokens = remove_stopwords(stem(tokens), stoplist)
    return ProcessedDoc(doc_id=doc_id, part=Part(part), pairs=tuple(pos_tag(tokens)))


def preprocess_tokens(text: str, stoplist=None) -> list[str]:
    return preprocess("", Part.P1, text, stoplist).tokens
