"""Array-backed experiment engine behind the cross-validation pipeline.

Documents are encoded once per feature configuration into integer attribute
ids with per-occurrence coefficients (c0, c1) such that the weight under
scheme (a, q) is ``a * c0 + q * c1``. This holds for both occurrence rules:

  last: c0 = 1,      c1 = last_position / (L - 1)
  sum:  c0 = count,  c1 = sum_of_positions / (L - 1)

(single-token documents use c1 = c0, matching the degenerate a + q weight).
Weights for any (a, q) are then one fused multiply-add away, per-class
masses are kernel accumulations over CSR slices, and held-out scoring is a
kernel call. Equivalence with the public ``features.vectorize`` +
``nbayes`` route is asserted by tests; training masses are accumulated
fresh per training set so vocabulary support stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .corpus import Document
from .features import WeightScheme, extract_attributes, prefix_filter


@dataclass
class EncodedCorpus:
    """Interned occurrence data for one feature configuration."""

    classes: tuple[str, ...]
    doc_ids: list[str]
    labels: np.ndarray  # int8[n_docs], index into classes
    indptr: np.ndarray  # int64[n_docs + 1]
    ids: np.ndarray  # int32[nnz]
    c0: np.ndarray  # float64[nnz]
    c1: np.ndarray  # float64[nnz]
    n_attributes: int

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)


@dataclass
class WeightedCorpus:
    """CSR weights for one scheme; zero-weight entries are dropped."""

    indptr: np.ndarray
    ids: np.ndarray
    weights: np.ndarray
    occ_doc: np.ndarray  # int32[nnz], document index of each occurrence
    n_attributes: int


def encode_corpus(
    documents: list[Document],
    classes: tuple[str, ...],
    orders: tuple[int, ...],
    rule: str,
    k_fraction: float = 0.0,
    cross_sentence_bigrams: bool = False,
) -> EncodedCorpus:
    if rule == "presence":
        rule = "last"  # scheme is forced to (1, 0) by the caller
    class_index = {c: i for i, c in enumerate(classes)}
    interner: dict[tuple, int] = {}

    indptr = [0]
    ids: list[int] = []
    c0: list[float] = []
    c1: list[float] = []
    labels = np.empty(len(documents), dtype=np.int8)

    for d, doc in enumerate(documents):
        labels[d] = class_index[doc.label]
        length = doc.n_tokens
        denom = length - 1 if length > 1 else None
        occurrences = prefix_filter(
            extract_attributes(doc, orders, cross_sentence_bigrams), length, k_fraction
        )
        if rule == "last":
            per_attr: dict[tuple, float] = {}
            for attr, p in occurrences:  # ordered by position, later wins
                per_attr[attr] = 1.0 if denom is None else p / denom
            entries = ((attr, 1.0, frac) for attr, frac in per_attr.items())
        else:
            sums: dict[tuple, list[float]] = {}
            for attr, p in occurrences:
                frac = 1.0 if denom is None else p / denom
                entry = sums.setdefault(attr, [0.0, 0.0])
                entry[0] += 1.0
                entry[1] += frac
            entries = ((attr, n, frac) for attr, (n, frac) in sums.items())
        for attr, n, frac in entries:
            attr_id = interner.setdefault(attr, len(interner))
            ids.append(attr_id)
            c0.append(n)
            c1.append(frac)
        indptr.append(len(ids))

    return EncodedCorpus(
        classes=classes,
        doc_ids=[doc.doc_id for doc in documents],
        labels=labels,
        indptr=np.asarray(indptr, dtype=np.int64),
        ids=np.asarray(ids, dtype=np.int32),
        c0=np.asarray(c0, dtype=np.float64),
        c1=np.asarray(c1, dtype=np.float64),
        n_attributes=len(interner),
    )


def build_weights(encoded: EncodedCorpus, scheme: WeightScheme) -> WeightedCorpus:
    """Materialize CSR weights for one scheme, dropping zero entries.

    Zero weights arise only for a = 0 when an attribute's surviving
    occurrence mass sits entirely at position 0; keeping them out preserves
    the sparse-vector invariant (and the vocabulary support) exactly.
    """
    weights = scheme.a * encoded.c0 + scheme.q * encoded.c1
    counts = np.diff(encoded.indptr)
    occ_doc = np.repeat(np.arange(encoded.n_docs, dtype=np.int32), counts)
    if np.all(weights > 0):
        return WeightedCorpus(
            indptr=encoded.indptr,
            ids=encoded.ids,
            weights=weights,
            occ_doc=occ_doc,
            n_attributes=encoded.n_attributes,
        )
    keep = weights > 0
    kept_before = np.concatenate(([0], np.cumsum(keep)))
    return WeightedCorpus(
        indptr=kept_before[encoded.indptr],
        ids=encoded.ids[keep],
        weights=weights[keep],
        occ_doc=occ_doc[keep],
        n_attributes=encoded.n_attributes,
    )


@dataclass
class SplitResult:
    predictions: np.ndarray  # int8[n_test], class indices in test order
    n_ties: int
    scores: np.ndarray  # float64[n_test, n_classes] log scores


def evaluate_split(
    weighted: WeightedCorpus,
    labels: np.ndarray,
    train_mask: np.ndarray,
    test_docs: np.ndarray,
    smoothing: float,
    use_prior: bool,
    n_classes: int,
) -> SplitResult:
    """Train on the masked documents and score the test documents.

    Ties (equal top scores) go to the lowest class index and are counted.
    """
    V = weighted.n_attributes
    occ_train = train_mask[weighted.occ_doc]
    occ_labels = labels[weighted.occ_doc]

    mass = np.zeros((n_classes, V))
    class_docs = np.zeros(n_classes, dtype=np.int64)
    for c in range(n_classes):
        selected = occ_train & (occ_labels == c)
        kernels.accumulate_mass(
            np.ascontiguousarray(weighted.ids[selected]),
            np.ascontiguousarray(weighted.weights[selected]),
            mass[c],
        )
        class_docs[c] = int(np.count_nonzero(train_mask & (labels == c)))
    if np.any(class_docs == 0):
        raise ValueError("a class has no training documents in this split")

    seen = mass.sum(axis=0) > 0
    vocab_size = int(np.count_nonzero(seen))
    denom = mass.sum(axis=1) + smoothing * vocab_size
    log_denom = np.where(denom > 0, np.log(np.maximum(denom, 1.0e-300)), 0.0)
    if use_prior:
        log_prior = np.log(class_docs / class_docs.sum())
    else:
        log_prior = np.zeros(n_classes)

    # gather the test documents' CSR slices
    spans = [np.arange(weighted.indptr[t], weighted.indptr[t + 1]) for t in test_docs]
    gathered = np.concatenate(spans) if spans else np.empty(0, dtype=np.int64)
    test_indptr = np.zeros(len(test_docs) + 1, dtype=np.int64)
    np.cumsum([span.shape[0] for span in spans], out=test_indptr[1:])

    scores = np.empty((len(test_docs), n_classes))
    kernels.score_documents(
        test_indptr,
        np.ascontiguousarray(weighted.ids[gathered]),
        np.ascontiguousarray(weighted.weights[gathered]),
        mass,
        seen.astype(np.uint8),
        float(smoothing),
        log_denom,
        log_prior,
        scores,
    )
    predictions = np.argmax(scores, axis=1).astype(np.int8)  # first max wins
    n_ties = int(np.count_nonzero((scores == scores.max(axis=1, keepdims=True)).sum(axis=1) > 1))
    return SplitResult(predictions=predictions, n_ties=n_ties, scores=scores)
