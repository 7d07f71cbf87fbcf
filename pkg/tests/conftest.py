import zipfile
from pathlib import Path

import pytest

from posnb.corpus import (
    NEGATIVE,
    POSITIVE,
    POLARITY_CLASSES,
    Document,
    LabeledCorpus,
    load_polarity_corpus,
    load_subjectivity_corpus,
)
from posnb.evaluate import compute_sentence_scores
from posnb.subjectivity import train_subjectivity_model

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def _ensure_extracted(zip_name: str, member_dir: str) -> Path | None:
    """Extract a vendored dataset zip next to itself, once."""
    target = DATA_DIR / member_dir
    if target.is_dir():
        return target
    archive = DATA_DIR / zip_name
    if not archive.is_file():
        return None
    with zipfile.ZipFile(archive) as zf:
        zf.extractall(DATA_DIR)
    return target if target.is_dir() else None


@pytest.fixture(scope="session")
def polarity_root() -> Path:
    root = _ensure_extracted("movie_reviews.zip", "movie_reviews")
    if root is None:
        pytest.skip("review corpus not available under data/ (see data/README.md)")
    return root


@pytest.fixture(scope="session")
def subjectivity_files() -> tuple[Path, Path]:
    root = _ensure_extracted("subjectivity.zip", "subjectivity")
    if root is None:
        pytest.skip("subjectivity dataset not available under data/ (see data/README.md)")
    return root / "quote.tok.gt9.5000", root / "plot.tok.gt9.5000"


@pytest.fixture(scope="session")
def polarity_corpus(polarity_root):
    return load_polarity_corpus(polarity_root)


@pytest.fixture(scope="session")
def subjectivity_pairs(subjectivity_files):
    subj_file, obj_file = subjectivity_files
    return load_subjectivity_corpus(subj_file, obj_file)


@pytest.fixture(scope="session")
def subjectivity_model(subjectivity_pairs):
    return train_subjectivity_model(subjectivity_pairs)


@pytest.fixture(scope="session")
def sentence_scores(polarity_corpus, subjectivity_model):
    """Memoized per-document sentence posteriors shared across dataset tests."""
    return compute_sentence_scores(polarity_corpus, subjectivity_model)


def make_doc(doc_id: str, *sentences: str, label: str | None = None) -> Document:
    """Build a document from whitespace-tokenized sentence strings."""
    return Document(
        doc_id=doc_id,
        sentences=tuple(tuple(s.split()) for s in sentences),
        label=label,
    )


@pytest.fixture
def separable_corpus() -> LabeledCorpus:
    """Four documents with class-exclusive vocabularies."""
    docs = (
        make_doc("a0", "great fun great", label=POSITIVE),
        make_doc("a1", "fun lovely", label=POSITIVE),
        make_doc("b0", "awful boring", label=NEGATIVE),
        make_doc("b1", "boring dreadful boring", label=NEGATIVE),
    )
    return LabeledCorpus(documents=docs, classes=POLARITY_CLASSES)
