"""Recommendation quality metrics.

Exact-match metrics (precision@k, recall@k) compare (label, type) pairs:
labels whitespace-collapsed but case-sensitive, types compared
structurally.  Text metrics (bleu, meteor_lite, cosine_score) compare a
candidate sentence against reference sentences; candidates and truth
elements are rendered the same way slice sentences are, so a changed
element type also registers as a text difference.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Protocol, Sequence

from .embedding import Provider, cosine, tokenize
from .model import ElementType
from .slicing import element_sentence


class Suggestion(Protocol):
    label: str | None
    type: ElementType


@dataclass(frozen=True)
class GroundTruth:
    """The (label, type) pairs that actually follow a query target."""

    elements: tuple[tuple[str | None, ElementType], ...]

    def __len__(self) -> int:
        return len(self.elements)

    def texts(self) -> list[str]:
        return [element_sentence(label, etype) for label, etype in self.elements]


def _norm_label(label: str | None) -> str | None:
    if label is None:
        return None
    collapsed = " ".join(label.split())
    return collapsed or None


def _matches(rec_label: str | None, rec_type: ElementType, truth: GroundTruth) -> bool:
    rec_key = (_norm_label(rec_label), rec_type)
    return any((_norm_label(lbl), etype) == rec_key for lbl, etype in truth.elements)


def precision_at_k(recs: Sequence[Suggestion], truth: GroundTruth, k: int) -> float:
    """Fraction of the top-k recommendations matching some truth element.

    The denominator stays k even when fewer recommendations exist.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = sum(1 for r in recs[:k] if _matches(r.label, r.type, truth))
    return hits / k


def recall_at_k(recs: Sequence[Suggestion], truth: GroundTruth, k: int) -> float:
    """Fraction of truth elements matched by some top-k recommendation."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not truth.elements:
        return 0.0
    top = [(_norm_label(r.label), r.type) for r in recs[:k]]
    hits = sum(1 for lbl, etype in truth.elements if (_norm_label(lbl), etype) in top)
    return hits / len(truth.elements)


def _ngrams(tokens: list[str], order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def bleu(candidate: str, references: Sequence[str], max_order: int = 4) -> float:
    """Sentence BLEU with clipped n-gram precision and add-one smoothing.

    Tokenization matches the embedding tokenizer (lowercase, split on
    non-alphanumerics).  Precisions of orders 1..max_order enter a
    geometric mean; at orders above 1 a zero clipped-match count is
    smoothed to (0+1)/(total+1).  The brevity penalty uses the reference
    length closest to the candidate length (ties prefer the shorter).
    An empty candidate or a zero unigram precision scores 0.0.
    """
    cand = tokenize(candidate)
    refs = [tokenize(r) for r in references]
    if not cand or not refs:
        return 0.0

    log_sum = 0.0
    for order in range(1, max_order + 1):
        cand_ngrams = _ngrams(cand, order)
        ref_ngrams = [_ngrams(r, order) for r in refs]
        total = sum(cand_ngrams.values())
        clipped = 0
        for ngram, count in cand_ngrams.items():
            best = max(rc.get(ngram, 0) for rc in ref_ngrams)
            clipped += min(count, best)
        if clipped == 0:
            if order == 1:
                return 0.0
            precision = (clipped + 1) / (total + 1)
        else:
            precision = clipped / total
        log_sum += math.log(precision)
    geo_mean = math.exp(log_sum / max_order)

    c = len(cand)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * geo_mean


_STEM_SUFFIXES = (
    "ization",
    "ational",
    "ations",
    "ation",
    "ingly",
    "ement",
    "ance",
    "ence",
    "ness",
    "ions",
    "ion",
    "ies",
    "ied",
    "ing",
    "ate",
    "es",
    "ed",
    "ly",
    "s",
    "e",
)


def stem(token: str) -> str:
    """Single-pass suffix stripper used for stage-2 unigram matching.

    The first (longest-first) suffix whose removal leaves at least three
    characters is stripped; otherwise the token is returned unchanged.
    """
    for suffix in _STEM_SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


def _align(cand: list[str], ref: list[str]) -> list[tuple[int, int]]:
    # Stage 1: exact unigram matches, leftmost-first; stage 2: stem matches.
    pairs: list[tuple[int, int]] = []
    used_ref: set[int] = set()
    matched_cand: set[int] = set()
    for stage_key in (lambda t: t, stem):
        ref_keys = [stage_key(t) for t in ref]
        for i, token in enumerate(cand):
            if i in matched_cand:
                continue
            key = stage_key(token)
            for j, ref_key in enumerate(ref_keys):
                if j in used_ref or ref_key != key:
                    continue
                pairs.append((i, j))
                used_ref.add(j)
                matched_cand.add(i)
                break
    pairs.sort()
    return pairs


def _chunks(pairs: list[tuple[int, int]]) -> int:
    count = 0
    prev: tuple[int, int] | None = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            count += 1
        prev = (i, j)
    return count


def meteor_lite(candidate: str, references: Sequence[str]) -> float:
    """Unigram-alignment score with a fragmentation penalty.

    Two-stage alignment (exact, then stemmed) between candidate and
    reference tokens, each token matched at most once.  F-mean weights
    recall 9:1; the penalty is 0.5 * (chunks / matches)^3.  The best
    score over the references is returned; no match at all scores 0.0.
    """
    cand = tokenize(candidate)
    if not cand:
        return 0.0
    best = 0.0
    for reference in references:
        ref = tokenize(reference)
        if not ref:
            continue
        pairs = _align(cand, ref)
        m = len(pairs)
        if m == 0:
            continue
        precision = m / len(cand)
        recall = m / len(ref)
        f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
        penalty = 0.5 * (_chunks(pairs) / m) ** 3
        best = max(best, f_mean * (1.0 - penalty))
    return best


def cosine_score(candidate: str, references: Sequence[str], provider: Provider) -> float:
    """Best cosine similarity between candidate and reference embeddings."""
    if not references:
        return 0.0
    cand_vec = provider.embed(candidate)
    return max(cosine(cand_vec, provider.embed(ref)) for ref in references)


@dataclass(frozen=True)
class MetricSample:
    """All five metric values for one recommendation list vs one truth set."""

    precision: float
    recall: float
    bleu: float
    meteor: float
    cosine: float


def score_sample(
    recs: Sequence[Suggestion],
    truth: GroundTruth,
    k: int,
    provider: Provider,
) -> MetricSample:
    """Score one recommendation list against one truth set.

    Text metrics take the best (candidate, reference) pair over the
    top-k candidates and the truth elements.
    """
    top = recs[:k]
    cand_texts = [element_sentence(r.label, r.type) for r in top]
    truth_texts = truth.texts()
    best_bleu = 0.0
    best_meteor = 0.0
    best_cos = 0.0
    for cand in cand_texts:
        for ref in truth_texts:
            best_bleu = max(best_bleu, bleu(cand, [ref]))
            best_meteor = max(best_meteor, meteor_lite(cand, [ref]))
            best_cos = max(best_cos, cosine_score(cand, [ref], provider))
    return MetricSample(
        precision=precision_at_k(recs, truth, k),
        recall=recall_at_k(recs, truth, k),
        bleu=best_bleu,
        meteor=best_meteor,
        cosine=best_cos,
    )
