"""Corpus loading, tokenization, and cross-validation fold assignment.

Documents are ordered sequences of tokenized sentences; token positions are
0-based over the concatenation of sentences. The movie-review layout is a
directory with ``pos/`` and ``neg/`` subdirectories of plain-text files, one
sentence per line; the subjectivity dataset is two plain-text files of
labeled sentences.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Sequence

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"
SUBJECTIVE = "subjective"
OBJECTIVE = "objective"

# Class order is the classifier tie-break order (first class wins ties).
POLARITY_CLASSES = (POSITIVE, NEGATIVE)
SUBJECTIVITY_CLASSES = (SUBJECTIVE, OBJECTIVE)

FILENAME_PREFIX = "filename-prefix"
STRATIFIED_ROUND_ROBIN = "stratified-round-robin"

Sentence = tuple  # tuple[str, ...], non-empty

_FOLD_ID_RE = re.compile(r"cv(\d+)_.*")


class CorpusError(Exception):
    """Fatal problem with a dataset's layout or contents."""


def tokenize(line: str, lowercase: bool = True) -> list[str]:
    """Split a line on runs of whitespace, dropping empty pieces."""
    if lowercase:
        line = line.lower()
    return line.split()


@dataclass(frozen=True)
class Document:
    """Ordered tokenized sentences with a global 0-based token index."""

    doc_id: str
    sentences: tuple[Sentence, ...]
    label: str | None = None

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def tokens(self) -> Iterator[str]:
        for sentence in self.sentences:
            yield from sentence


@dataclass(frozen=True)
class LabeledCorpus:
    """Immutable labeled document collection with a fixed class order."""

    documents: tuple[Document, ...]
    classes: tuple[str, ...]
    n_skipped_empty: int = 0

    def __post_init__(self):
        seen: set[str] = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise CorpusError(f"duplicate document id: {doc.doc_id!r}")
            seen.add(doc.doc_id)
            if doc.label not in self.classes:
                raise CorpusError(
                    f"document {doc.doc_id!r} has label {doc.label!r}, "
                    f"expected one of {self.classes}"
                )

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def class_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in self.classes}
        for doc in self.documents:
            counts[doc.label] += 1
        return counts


@dataclass(frozen=True)
class DirectoryLayout:
    """Where the polarity classes live under the corpus root."""

    pos_dir: str = "pos"
    neg_dir: str = "neg"
    pattern: str = "*.txt"


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every document id to one fold in [0, k)."""

    k: int
    assignment: Mapping[str, int]

    def fold_of(self, doc_id: str) -> int:
        return self.assignment[doc_id]

    def test_ids(self, fold: int) -> list[str]:
        return sorted(d for d, f in self.assignment.items() if f == fold)

    def train_ids(self, fold: int) -> list[str]:
        return sorted(d for d, f in self.assignment.items() if f != fold)


def _read_document(path: Path, doc_id: str, label: str, lowercase: bool) -> Document | None:
    text = path.read_text(encoding="utf-8")
    sentences = []
    for line in text.splitlines():
        tokens = tokenize(line, lowercase=lowercase)
        if tokens:
            sentences.append(tuple(tokens))
    if not sentences:
        return None
    return Document(doc_id=doc_id, sentences=tuple(sentences), label=label)


def load_polarity_corpus(
    root: str | Path,
    layout: DirectoryLayout | None = None,
    lowercase: bool = True,
) -> LabeledCorpus:
    """Load the two-class review corpus: one document per file.

    Empty files are skipped with a warning (the count is kept on the corpus);
    a missing class directory is fatal.
    """
    layout = layout or DirectoryLayout()
    root = Path(root)
    documents: list[Document] = []
    skipped = 0
    for dirname, label in ((layout.pos_dir, POSITIVE), (layout.neg_dir, NEGATIVE)):
        directory = root / dirname
        if not directory.is_dir():
            raise CorpusError(f"missing corpus directory: {directory}")
        for path in sorted(directory.glob(layout.pattern)):
            doc = _read_document(path, path.stem, label, lowercase)
            if doc is None:
                skipped += 1
                logger.warning("skipping empty file: %s", path)
            else:
                documents.append(doc)
    documents.sort(key=lambda d: d.doc_id)
    if skipped:
        logger.warning("skipped %d empty file(s) under %s", skipped, root)
    return LabeledCorpus(
        documents=tuple(documents), classes=POLARITY_CLASSES, n_skipped_empty=skipped
    )


def load_subjectivity_corpus(
    subjective_file: str | Path,
    objective_file: str | Path,
    lowercase: bool = True,
) -> list[tuple[Sentence, str]]:
    """Load labeled sentences, one per line, subjective file first."""
    pairs: list[tuple[Sentence, str]] = []
    for path, label in ((Path(subjective_file), SUBJECTIVE), (Path(objective_file), OBJECTIVE)):
        if not path.is_file():
            raise CorpusError(f"missing sentence file: {path}")
        n_before = len(pairs)
        for line in path.read_text(encoding="utf-8").splitlines():
            tokens = tokenize(line, lowercase=lowercase)
            if tokens:
                pairs.append((tuple(tokens), label))
        if len(pairs) == n_before:
            logger.warning("no sentences loaded for class %r from %s", label, path)
    return pairs


def subjectivity_documents(pairs: Sequence[tuple[Sentence, str]]) -> LabeledCorpus:
    """Wrap labeled sentences as one-sentence documents, e.g. for self-CV."""
    width = len(str(max(len(pairs) - 1, 0)))
    prefix = {SUBJECTIVE: "subj", OBJECTIVE: "obj"}
    documents = tuple(
        Document(doc_id=f"{prefix[label]}_{i:0{width}d}", sentences=(sentence,), label=label)
        for i, (sentence, label) in enumerate(pairs)
    )
    return LabeledCorpus(documents=documents, classes=SUBJECTIVITY_CLASSES)


def assign_folds(
    corpus: LabeledCorpus,
    k: int,
    strategy: str = FILENAME_PREFIX,
    seed: int = 0,
) -> FoldPlan:
    """Deterministically assign every document to one of k folds.

    ``filename-prefix`` derives the fold from the ``cvNNN_`` id prefix
    (fold = NNN div 100, requires k=10). ``stratified-round-robin`` sorts ids
    per class, shuffles them with a seed-keyed RNG, and deals round-robin,
    which keeps folds class-balanced within one document.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > len(corpus):
        raise CorpusError(f"k={k} exceeds corpus size {len(corpus)}")

    assignment: dict[str, int] = {}
    if strategy == FILENAME_PREFIX:
        if k != 10:
            raise ValueError(f"{FILENAME_PREFIX} requires k=10, got {k}")
        for doc in corpus.documents:
            match = _FOLD_ID_RE.fullmatch(doc.doc_id)
            if match is None:
                raise CorpusError(
                    f"id {doc.doc_id!r} does not match the cvNNN_* pattern "
                    f"required by {FILENAME_PREFIX}"
                )
            fold = int(match.group(1)) // 100
            if not 0 <= fold < k:
                raise CorpusError(f"id {doc.doc_id!r} maps to fold {fold}, outside [0, {k})")
            assignment[doc.doc_id] = fold
    elif strategy == STRATIFIED_ROUND_ROBIN:
        for label in corpus.classes:
            ids = sorted(d.doc_id for d in corpus.documents if d.label == label)
            random.Random(f"{seed}/{label}").shuffle(ids)
            for i, doc_id in enumerate(ids):
                assignment[doc_id] = i % k
    else:
        raise ValueError(f"unknown fold strategy: {strategy!r}")

    sizes = [0] * k
    for fold in assignment.values():
        sizes[fold] += 1
    if any(size == 0 for size in sizes):
        raise CorpusError(f"fold plan has empty folds (sizes {sizes})")
    return FoldPlan(k=k, assignment=assignment)
