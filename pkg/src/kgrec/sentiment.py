"""Multinomial Naive Bayes sentiment scoring.

``emo`` is P(positive) - P(negative), so a negatively worded first half of
an abstract flips the sign of its cosine term in the similarity score.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import MissingClassError, ParseError, SchemaError
from .textprep import preprocess_tokens

POSITIVE = "positive"
NEGATIVE = "negative"
LABELS = (POSITIVE, NEGATIVE)
UNK = "<unk>"


@dataclass(frozen=True)
class SentimentModel:
    class_log_priors: dict[str, float]
    token_log_likelihoods: dict[str, dict[str, float]]
    unk_log_likelihoods: dict[str, float]
    alpha: float
    vocab_size: int

    def log_likelihood(self, token: str, label: str) -> float:
        table = self.token_log_likelihoods.get(token)
        if table is None:
            return self.unk_log_likelihoods[label]
        return table[label]


def train_nb(labeled_docs: Iterable[tuple[Sequence[str], str]], alpha: float = 1.0) -> SentimentModel:
    """Fit class priors and Laplace-smoothed token likelihoods.

    Each class reserves smoothing mass for one shared unknown-token slot, so
    the denominator is ``N_c + alpha * (|V| + 1)``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    doc_counts = Counter()
    token_counts = {label: Counter() for label in LABELS}
    for tokens, label in labeled_docs:
        if label not in LABELS:
            raise SchemaError(f"unknown sentiment label {label!r}")
        doc_counts[label] += 1
        token_counts[label].update(tokens)
    for label in LABELS:
        if doc_counts[label] == 0:
            raise MissingClassError(f"no training documents labeled {label!r}")

    vocab = sorted(set(token_counts[POSITIVE]) | set(token_counts[NEGATIVE]))
    n_docs = sum(doc_counts.values())
    priors = {label: math.log(doc_counts[label] / n_docs) for label in LABELS}
    denom = {label: sum(token_counts[label].values()) + alpha * (len(vocab) + 1)
             for label in LABELS}
    likelihoods = {
        tok: {label: math.log((token_counts[label][tok] + alpha) / denom[label]) for label in LABELS}
        for tok in vocab
    }
    unk = {label: math.log(alpha / denom[label]) for label in LABELS}
    return SentimentModel(priors, likelihoods, unk, alpha, len(vocab))


def prob_classify(model: SentimentModel, tokens: Iterable[str]) -> dict[str, float]:
    scores = dict(model.class_log_priors)
    for tok in tokens:
        for label in LABELS:
            scores[label] += model.log_likelihood(tok, label)
    top = max(scores.values())
    weights = {label: math.exp(s - top) for label, s in scores.items()}
    total = sum(weights.values())
    return {label: w / total for label, w in weights.items()}


def emo(model: SentimentModel, tokens: Sequence[str]) -> float:
    tokens = list(tokens)
    if not tokens:
        return 0.0
    dist = prob_classify(model, tokens)
    return dist[POSITIVE] - dist[NEGATIVE]


def _read_corpus(fh, name) -> list[tuple[str, str]]:
    reader = csv.reader(fh, strict=True)
    rows = []
    try:
        header = [h.strip() for h in next(reader)]
        for col in ("label", "text"):
            if col not in header:
                raise SchemaError(f"{name}: missing required column {col!r}")
        li, ti = header.index("label"), header.index("text")
        for row in reader:
            if not row:
                continue
            label = row[li].strip()
            if label not in LABELS:
                raise SchemaError(f"{name}:{reader.line_num}: unknown label {label!r}")
            rows.append((label, row[ti]))
    except StopIteration:
        raise SchemaError(f"{name}: missing header row") from None
    except csv.Error as exc:
        raise ParseError(f"{name}: {exc}", reader.line_num) from None
    return rows


def load_sentiment_corpus(path=None, stoplist=None) -> list[tuple[list[str], str]]:
    """Read a ``label,text`` CSV and preprocess each text.

    With no path, the bundled seed corpus is used.
    """
    if path is None:
        src = resources.files("kgrec.data").joinpath("sentiment_seed.csv")
        with src.open("r", encoding="utf-8", newline="") as fh:
            rows = _read_corpus(fh, "sentiment_seed.csv")
    else:
        with Path(path).open(encoding="utf-8", newline="") as fh:
            rows = _read_corpus(fh, str(path))
    return [(preprocess_tokens(text, stoplist), label) for label, text in rows]
