"""Sentiment-weighted similarity and two-round ranking.

For a candidate split into halves p1 and p2 and a technology vector t::

    sim(p, t) = cos(p1, t) * emo(p1) + cos(p2, t)

Round one sorts by similarity to the target text (descending) and keeps the
top ``k``; round two re-sorts those by similarity to the exclude text
(ascending) and the first ``n`` are recommended.  Ties go to the smaller
paper id.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from . import embed, sentiment
from .corpus import SplitAbstract
from .errors import EmptyInputError, ParameterError
from .textprep import Part, preprocess

DEFAULT_K = 20
DEFAULT_N = 5


@dataclass(frozen=True)
class SimilarityScore:
    paper_id: str
    cos_p1_target: float
    cos_p2_target: float
    cos_p1_exclude: float
    cos_p2_exclude: float
    emo_p1: float
    sim_target: float
    sim_exclude: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RankedList:
    round1: tuple[str, ...]
    round1_cutoff: int
    round2: tuple[str, ...]
    top5: tuple[str, ...]


def score_vectors(paper_id: str, p1, p2, t_target, t_exclude, emo_p1: float) -> SimilarityScore:
    c1t, c2t = embed.cosine(p1, t_target), embed.cosine(p2, t_target)
    c1x, c2x = embed.cosine(p1, t_exclude), embed.cosine(p2, t_exclude)
    return SimilarityScore(
        paper_id=paper_id,
        cos_p1_target=c1t,
        cos_p2_target=c2t,
        cos_p1_exclude=c1x,
        cos_p2_exclude=c2x,
        emo_p1=emo_p1,
        sim_target=c1t * emo_p1 + c2t,
        sim_exclude=c1x * emo_p1 + c2x,
    )


def score_paper(embed_model, sent_model, split: SplitAbstract, t_target, t_exclude,
                stoplist=None, infer_epochs: Optional[int] = None) -> SimilarityScore:
    p1_tokens = preprocess(split.paper_id, Part.P1, split.p1_text, stoplist).tokens
    p2_tokens = preprocess(split.paper_id, Part.P2, split.p2_text, stoplist).tokens
    p1 = embed.infer_vector(embed_model, p1_tokens, infer_epochs)
    p2 = embed.infer_vector(embed_model, p2_tokens, infer_epochs)
    return score_vectors(split.paper_id, p1, p2, t_target, t_exclude,
                         sentiment.emo(sent_model, p1_tokens))


def rank(scores: Sequence[SimilarityScore], k: int = DEFAULT_K, n: int = DEFAULT_N) -> RankedList:
    if not scores:
        raise EmptyInputError("no scores to rank")
    if n < 1 or k < n:
        raise ParameterError(f"need k >= n >= 1, got k={k}, n={n}")
    first = sorted(scores, key=lambda s: (-s.sim_target, s.paper_id))
    pool = first[:k]
    second = sorted(pool, key=lambda s: (s.sim_exclude, s.paper_id))
    round2 = tuple(s.paper_id for s in second)
    return RankedList(
        round1=tuple(s.paper_id for s in first),
        round1_cutoff=k,
        round2=round2,
        top5=round2[:n],
    )
