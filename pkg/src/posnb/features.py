"""Attribute extraction and position-dependent fractional-count weighting.

An attribute is a word unigram or an adjacent-word bigram, represented as a
tuple of tokens. An occurrence starting at token position p in a document of
length L gets the fractional count ``a + q * p / (L - 1)``, so weights grow
linearly from ``a`` at the document start to ``a + q`` at the last word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Document

Attribute = tuple  # tuple of 1 (unigram) or 2 (bigram) tokens

OCCURRENCE_RULES = ("last", "sum", "presence")


@dataclass(frozen=True)
class WeightScheme:
    """The (a, q) pair of the linear positional weighting."""

    a: float
    q: float

    def __post_init__(self):
        if self.a < 0 or self.q < 0:
            raise ValueError(f"scheme parameters must be >= 0, got a={self.a}, q={self.q}")
        if self.a == 0 and self.q == 0:
            raise ValueError("scheme (a=0, q=0) would zero out every attribute")

    @property
    def b(self) -> float:
        """Weight of an occurrence starting at the last word."""
        return self.a + self.q


#: Classical binary word presence: every occurring attribute counts 1.
PRESENCE = WeightScheme(1.0, 0.0)


@dataclass(frozen=True)
class AttributeVector:
    """Sparse attribute weights for one document; zero weights are absent."""

    weights: Mapping[Attribute, float]
    doc_length: int

    def __post_init__(self):
        if self.doc_length < 1:
            raise ValueError("doc_length must be >= 1")


def extract_attributes(
    doc: Document,
    orders: Iterable[int] = (1,),
    cross_sentence_bigrams: bool = False,
) -> list[tuple[Attribute, int]]:
    """All attribute occurrences with their start positions.

    Positions are 0-based over the whole document; output is ordered by
    position, unigram before bigram at the same position. Bigrams spanning a
    sentence boundary are skipped unless ``cross_sentence_bigrams`` is set.
    """
    wanted = set(orders)
    if not wanted:
        raise ValueError("orders must be non-empty")
    if not wanted <= {1, 2}:
        raise ValueError(f"orders must be within {{1, 2}}, got {sorted(wanted)}")

    tokens: list[str] = []
    starts_sentence: list[bool] = []
    for sentence in doc.sentences:
        for i, token in enumerate(sentence):
            tokens.append(token)
            starts_sentence.append(i == 0)

    occurrences: list[tuple[Attribute, int]] = []
    n = len(tokens)
    for p in range(n):
        if 1 in wanted:
            occurrences.append(((tokens[p],), p))
        if 2 in wanted and p + 1 < n:
            if cross_sentence_bigrams or not starts_sentence[p + 1]:
                occurrences.append(((tokens[p], tokens[p + 1]), p))
    return occurrences


def positional_weight(p: int, doc_length: int, scheme: WeightScheme) -> float:
    """Fractional count for an occurrence starting at position p.

    A single-token document has no interior to interpolate over; its only
    token is also the last word and gets the full weight a + q.
    """
    if doc_length < 1:
        raise ValueError(f"doc_length must be >= 1, got {doc_length}")
    if not 0 <= p <= doc_length - 1:
        raise ValueError(f"position {p} out of range for doc_length {doc_length}")
    if doc_length == 1:
        return scheme.a + scheme.q
    return scheme.a + scheme.q * p / (doc_length - 1)


def prefix_filter(
    occurrences: Sequence[tuple[Attribute, int]],
    doc_length: int,
    k_fraction: float = 0.0,
) -> list[tuple[Attribute, int]]:
    """Drop occurrences starting in the first floor(k_fraction * L) positions."""
    if not 0.0 <= k_fraction <= 1.0:
        raise ValueError(f"k_fraction must be in [0, 1], got {k_fraction}")
    if k_fraction == 0.0:
        return list(occurrences)
    cutoff = math.floor(k_fraction * doc_length)
    return [(attr, p) for attr, p in occurrences if p >= cutoff]


def vectorize(
    doc: Document,
    orders: Iterable[int] = (1,),
    scheme: WeightScheme = PRESENCE,
    rule: str = "last",
    k_fraction: float = 0.0,
    cross_sentence_bigrams: bool = False,
) -> AttributeVector:
    """Weighted sparse vector for one document.

    ``last`` keeps the fractional count of each attribute's final surviving
    occurrence; ``sum`` adds the counts of all surviving occurrences;
    ``presence`` is shorthand for scheme (a=1, q=0) with rule ``last``.
    Prefix filtering applies before the last-occurrence selection. Attributes
    whose resulting weight is 0 are dropped, so an all-filtered document
    yields an empty vector.
    """
    if rule not in OCCURRENCE_RULES:
        raise ValueError(f"rule must be one of {OCCURRENCE_RULES}, got {rule!r}")
    if rule == "presence":
        scheme, rule = PRESENCE, "last"
    doc_length = doc.n_tokens
    if doc_length < 1:
        raise ValueError(f"document {doc.doc_id!r} has no tokens")

    occurrences = prefix_filter(
        extract_attributes(doc, orders, cross_sentence_bigrams), doc_length, k_fraction
    )
    weights: dict[Attribute, float] = {}
    if rule == "last":
        last_position: dict[Attribute, int] = {}
        for attr, p in occurrences:  # ordered by position, so later wins
            last_position[attr] = p
        for attr, p in last_position.items():
            w = positional_weight(p, doc_length, scheme)
            if w > 0:
                weights[attr] = w
    else:
        for attr, p in occurrences:
            w = positional_weight(p, doc_length, scheme)
            if w > 0:
                weights[attr] = weights.get(attr, 0.0) + w
    return AttributeVector(weights=weights, doc_length=doc_length)
