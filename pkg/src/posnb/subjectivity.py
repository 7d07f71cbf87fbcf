"""Sentence-level subjectivity scoring and document transformation.

A naive Bayes model trained on labeled sentences scores each sentence of a
review; documents can then be reordered so the most subjective sentences sit
at the end, where the positional weighting is largest, and optionally have
their low-scoring sentences dropped first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import nbayes
from .corpus import SUBJECTIVE, SUBJECTIVITY_CLASSES, Document, Sentence
from .features import vectorize

TRANSFORM_MODES = ("none", "sort", "filter_and_sort")
SORT_DIRECTIONS = ("ascending", "descending", "off")


@dataclass(frozen=True)
class SubjectivityModel:
    """Sentence-level model plus the feature configuration it was trained with."""

    model: nbayes.NBModel
    orders: tuple[int, ...] = (1,)
    rule: str = "presence"


def train_subjectivity_model(
    labeled_sentences: Sequence[tuple[Sentence, str]],
    orders: tuple[int, ...] = (1,),
    rule: str = "presence",
    smoothing: float = 1.0,
) -> SubjectivityModel:
    """Train on (sentence, label) pairs; presence-weighted unigrams by default."""
    vectors = []
    labels = []
    for i, (sentence, label) in enumerate(labeled_sentences):
        doc = Document(doc_id=f"s{i}", sentences=(sentence,))
        vectors.append(vectorize(doc, orders=orders, rule=rule))
        labels.append(label)
    model = nbayes.train(vectors, labels, smoothing=smoothing, classes=SUBJECTIVITY_CLASSES)
    return SubjectivityModel(model=model, orders=tuple(orders), rule=rule)


def sentence_subjectivity(smodel: SubjectivityModel, sentence: Sentence) -> float:
    """Posterior probability that the sentence is subjective.

    A sentence with no in-vocabulary attributes falls back to the class
    prior.
    """
    doc = Document(doc_id="", sentences=(tuple(sentence),))
    vector = vectorize(doc, orders=smodel.orders, rule=smodel.rule)
    return nbayes.posterior(smodel.model, vector)[SUBJECTIVE]


def score_sentences(smodel: SubjectivityModel, doc: Document) -> list[float]:
    """Subjectivity posterior for every sentence of the document, in order."""
    return [sentence_subjectivity(smodel, sentence) for sentence in doc.sentences]


def transform_document(
    doc: Document,
    smodel: SubjectivityModel,
    mode: str,
    threshold: float = 0.5,
    direction: str = "ascending",
    scores: Sequence[float] | None = None,
) -> Document:
    """Reorder and/or filter a document's sentences by subjectivity.

    ``sort`` stably sorts sentences by score, ascending by default so the
    most subjective sentence ends up last. ``filter_and_sort`` first drops
    sentences scoring below the threshold, then sorts; ``direction="off"``
    disables the sorting step, which turns it into a pure filter. A document
    is never emptied: if everything falls below the threshold the single
    highest-scoring sentence is kept. Precomputed ``scores`` (one per
    sentence) skip the model evaluation.
    """
    if mode not in TRANSFORM_MODES:
        raise ValueError(f"mode must be one of {TRANSFORM_MODES}, got {mode!r}")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if direction not in SORT_DIRECTIONS:
        raise ValueError(f"direction must be one of {SORT_DIRECTIONS}, got {direction!r}")
    if mode == "none":
        return doc

    if scores is None:
        scores = score_sentences(smodel, doc)
    elif len(scores) != len(doc.sentences):
        raise ValueError(
            f"{len(scores)} scores for {len(doc.sentences)} sentences in {doc.doc_id!r}"
        )
    scored = list(zip(scores, doc.sentences))

    if mode == "filter_and_sort":
        kept = [(s, sent) for s, sent in scored if s >= threshold]
        if not kept:
            kept = [max(scored, key=lambda pair: pair[0])]
        scored = kept
    if direction == "ascending":
        scored.sort(key=lambda pair: pair[0])
    elif direction == "descending":
        scored.sort(key=lambda pair: pair[0], reverse=True)  # stable for equal scores

    return Document(
        doc_id=doc.doc_id,
        sentences=tuple(sentence for _, sentence in scored),
        label=doc.label,
    )


def transform_trace(
    doc: Document,
    smodel: SubjectivityModel,
    mode: str,
    threshold: float = 0.5,
    scores: Sequence[float] | None = None,
) -> list[tuple[str, int, float, bool]]:
    """Audit rows (doc id, sentence index, score, kept) for one document."""
    if scores is None:
        scores = score_sentences(smodel, doc)
    if mode != "filter_and_sort":
        kept = [True] * len(scores)
    else:
        kept = [s >= threshold for s in scores]
        if not any(kept):
            kept[scores.index(max(scores))] = True
    return [(doc.doc_id, i, s, k) for i, (s, k) in enumerate(zip(scores, kept))]
