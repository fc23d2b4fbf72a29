"""PV-DM paragraph vectors trained with negative sampling.

The context of each position is the average of the document vector and
the word vectors within ``window`` of it; that average predicts the centre
token against ``negative`` noise tokens drawn from the unigram^0.75
distribution.  Training is single-threaded so a fixed seed reproduces the
model bit for bit.

Input vectors (document and context words) step along their gradient
scaled by the context size, the same update word2vec applies in CBOW-mean
mode; without it the document vector, which holds only a 1/(context size)
share of the average, barely moves on small corpora.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, EmptyInputError, EmptyVocabError, ModelVersionError, ParameterError

FORMAT_VERSION = "kgrec-pvdm/1"
NOISE_POWER = 0.75


@dataclass(frozen=True)
class EmbedParams:
    dim: int = 100
    window: int = 5
    negative: int = 5
    epochs: int = 40
    lr_start: float = 0.025
    lr_end: float = 0.0001
    min_count: int = 2
    seed: int = 0
    infer_epochs: int = 50

    def __post_init__(self):
        for name in ("dim", "window", "epochs", "min_count", "infer_epochs"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be a positive integer")
        if self.negative < 0:
            raise ParameterError("negative must be non-negative")
        if not (self.lr_start >= self.lr_end > 0):
            raise ParameterError("learning rates must satisfy lr_start >= lr_end > 0")
        if not (-(2**63) <= self.seed < 2**64):
            raise ParameterError("seed must fit in 64 bits")


@dataclass
class Vocab:
    tokens: list[str]
    counts: np.ndarray
    index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        idx = self.index
        return np.fromiter((idx[t] for t in tokens if t in idx), dtype=np.int64)


def _tokens_of(doc) -> list[str]:
    return list(doc.tokens) if hasattr(doc, "tokens") else list(doc)


def build_vocab(docs, min_count: int) -> Vocab:
    """Keep tokens seen at least ``min_count`` times, in first-appearance order."""
    if not docs:
        raise EmptyInputError("no documents to build a vocabulary from")
    counts: Counter = Counter()
    order: dict[str, None] = {}
    for doc in docs:
        toks = _tokens_of(doc)
        counts.update(toks)
        order.update(dict.fromkeys(toks))
    kept = [t for t in order if counts[t] >= min_count]
    if not kept:
        raise EmptyVocabError(f"no token occurs at least {min_count} times")
    return Vocab(kept, np.array([counts[t] for t in kept], dtype=np.int64))


@dataclass
class EmbeddingModel:
    vocab: Vocab
    word_vectors: np.ndarray
    output_vectors: np.ndarray
    doc_ids: list[str]
    doc_matrix: np.ndarray
    params: EmbedParams
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def doc_vectors(self) -> dict[str, np.ndarray]:
        return {d: self.doc_matrix[i] for i, d in enumerate(self.doc_ids)}

    def doc_vector(self, doc_id: str) -> np.ndarray:
        return self.doc_matrix[self.doc_ids.index(doc_id)]

    def noise_cdf(self) -> np.ndarray:
        weights = self.vocab.counts.astype(np.float64) ** NOISE_POWER
        return np.cumsum(weights / weights.sum())


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def negative_sampling_loss(hidden: np.ndarray, outputs: np.ndarray, labels: np.ndarray):
    """Loss and gradients for one prediction.

    ``outputs`` holds one output vector per target row, ``labels`` is 1 for
    the true token and 0 for noise.  Returns ``(loss, d_hidden, d_outputs)``.
    """
    scores = outputs @ hidden
    signs = 2.0 * labels - 1.0
    loss = float(np.logaddexp(0.0, -signs * scores).sum())
    err = _sigmoid(scores) - labels
    return loss, outputs.T @ err, np.outer(err, hidden)


def pvdm_loss_and_grads(doc_vec, context_vecs, outputs, labels):
    """Chain the negative-sampling gradient back through the context average.

    Returns ``(loss, d_doc, d_context, d_outputs)`` where ``d_context`` has
    one row per context word.
    """
    count = 1 + len(context_vecs)
    hidden = (doc_vec + context_vecs.sum(axis=0)) / count
    loss, d_hidden, d_out = negative_sampling_loss(hidden, outputs, labels)
    d_in = d_hidden / count
    return loss, d_in, np.broadcast_to(d_in, context_vecs.shape), d_out


def _noise(rng, cdf, k, exclude):
    if k == 0:
        return np.empty(0, dtype=np.int64)
    draws = np.searchsorted(cdf, rng.random(k) * cdf[-1], side="right")
    draws = np.minimum(draws, len(cdf) - 1)
    return draws[draws != exclude]


def _context(ids, pos, window):
    lo, hi = max(0, pos - window), min(len(ids), pos + window + 1)
    return np.concatenate((ids[lo:pos], ids[pos + 1:hi]))


def _labels(n):
    labels = np.zeros(n)
    labels[0] = 1.0
    return labels


def train_pvdm(docs, params: EmbedParams = EmbedParams(), doc_ids: Optional[Sequence[str]] = None) -> EmbeddingModel:
    """Train word, document and output vectors on ``docs``.

    ``docs`` are ProcessedDocs or plain token lists; in the latter case
    ``doc_ids`` names them (default: their positions).
    """
    if not docs:
        raise EmptyInputError("no documents to train on")
    if doc_ids is None:
        doc_ids = [getattr(d, "doc_id", None) or str(i) for i, d in enumerate(docs)]
    doc_ids = list(doc_ids)
    if len(set(doc_ids)) != len(doc_ids):
        raise ParameterError("document ids must be unique")
    vocab = build_vocab(docs, params.min_count)
    rng = np.random.default_rng(params.seed)
    dim = params.dim
    W = (rng.random((len(vocab), dim)) - 0.5) / dim
    D = (rng.random((len(docs), dim)) - 0.5) / dim
    U = np.zeros((len(vocab), dim))
    model = EmbeddingModel(vocab, W, U, doc_ids, D, params)
    cdf = model.noise_cdf()

    encoded = [vocab.encode(_tokens_of(d)) for d in docs]
    total = params.epochs * sum(len(e) for e in encoded)
    span = max(total - 1, 1)
    step = 0
    for _ in range(params.epochs):
        epoch_loss, n_pred = 0.0, 0
        for d in rng.permutation(len(docs)):
            ids = encoded[d]
            for pos in range(len(ids)):
                lr = params.lr_start - (params.lr_start - params.lr_end) * step / span
                step += 1
                ctx = _context(ids, pos, params.window)
                targets = np.concatenate(([ids[pos]], _noise(rng, cdf, params.negative, ids[pos])))
                loss, g_doc, g_ctx, g_out = pvdm_loss_and_grads(
                    D[d], W[ctx], U[targets], _labels(len(targets)))
                step_in = lr * (1 + len(ctx))
                np.subtract.at(U, targets, lr * g_out)
                D[d] -= step_in * g_doc
                if len(ctx):
                    np.subtract.at(W, ctx, step_in * g_ctx)
                epoch_loss += loss
                n_pred += 1
        model.epoch_losses.append(epoch_loss / max(n_pred, 1))
    return model


def infer_vector(model: EmbeddingModel, tokens: Sequence[str], infer_epochs: Optional[int] = None,
                 seed: Optional[int] = None) -> np.ndarray:
    """Fit a fresh document vector with word and output vectors frozen.

    Out-of-vocabulary tokens are skipped; if nothing is left the zero vector
    is returned.
    """
    params = model.params
    ids = model.vocab.encode(list(tokens))
    if len(ids) == 0:
        return np.zeros(params.dim)
    epochs = params.infer_epochs if infer_epochs is None else int(infer_epochs)
    rng = np.random.default_rng(params.seed if seed is None else seed)
    vec = (rng.random(params.dim) - 0.5) / params.dim
    cdf = model.noise_cdf()
    W, U = model.word_vectors, model.output_vectors
    span = max(epochs * len(ids) - 1, 1)
    step = 0
    for _ in range(epochs):
        for pos in range(len(ids)):
            lr = params.lr_start - (params.lr_start - params.lr_end) * step / span
            step += 1
            ctx = _context(ids, pos, params.window)
            targets = np.concatenate(([ids[pos]], _noise(rng, cdf, params.negative, ids[pos])))
            _, g_doc, _, _ = pvdm_loss_and_grads(vec, W[ctx], U[targets], _labels(len(targets)))
            vec -= lr * (1 + len(ctx)) * g_doc
    return vec


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"vector lengths differ: {a.shape} vs {b.shape}")
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, max(-1.0, float(np.dot(a, b)) / (na * nb)))


def save_model(model: EmbeddingModel, path) -> None:
    meta = {
        "format": FORMAT_VERSION,
        "params": asdict(model.params),
        "tokens": model.vocab.tokens,
        "doc_ids": model.doc_ids,
        "epoch_losses": model.epoch_losses,
    }
    with Path(path).open("wb") as fh:
        np.savez(fh, meta=np.array(json.dumps(meta)), counts=model.vocab.counts,
                 word_vectors=model.word_vectors, output_vectors=model.output_vectors,
                 doc_matrix=model.doc_matrix)


def load_model(path) -> EmbeddingModel:
    with np.load(Path(path), allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format") != FORMAT_VERSION:
            raise ModelVersionError(
                f"model format {meta.get('format')!r} does not match {FORMAT_VERSION!r}")
        return EmbeddingModel(
            vocab=Vocab(meta["tokens"], data["counts"].copy()),
            word_vectors=data["word_vectors"].copy(),
            output_vectors=data["output_vectors"].copy(),
            doc_ids=meta["doc_ids"],
            doc_matrix=data["doc_matrix"].copy(),
            params=EmbedParams(**meta["params"]),
            epoch_losses=meta["epoch_losses"],
        )
