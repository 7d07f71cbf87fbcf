"""Multinomial naive Bayes with Laplace smoothing, scored in log space.

The class-conditional likelihood of a document is a multinomial over its
attribute weights. The multinomial coefficient and the document-length prior
are class-independent, cancel out of the posterior, and are therefore never
computed. Scores are accumulated in log space only; probability-space
products appear solely in the final softmax of ``posterior``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .features import Attribute, AttributeVector

_NEG_INF = float("-inf")

_MODEL_FORMAT = "posnb-model"
_MODEL_VERSION = "1"


@dataclass(frozen=True)
class NBModel:
    """Trained model: per-class attribute mass, priors, and vocabulary.

    ``mass[c][d]`` is the summed weight of attribute d over the training
    documents of class c; absent entries are zero. ``vocabulary`` is the
    union of attributes seen (with positive weight) in any class.
    """

    classes: tuple[str, ...]
    class_doc_counts: Mapping[str, int]
    mass: Mapping[str, Mapping[Attribute, float]]
    class_mass_totals: Mapping[str, float]
    vocabulary: frozenset
    smoothing: float

    def log_prior(self, label: str) -> float:
        total = sum(self.class_doc_counts.values())
        return math.log(self.class_doc_counts[label] / total)


def train(
    vectors: Sequence[AttributeVector],
    labels: Sequence[str],
    smoothing: float = 1.0,
    classes: Iterable[str] | None = None,
) -> NBModel:
    """Accumulate per-class attribute mass from labeled vectors.

    ``classes`` fixes the class order (the tie-break order at decision
    time); by default classes appear in order of first occurrence. Every
    class must have at least one training document.
    """
    if len(vectors) != len(labels):
        raise ValueError(f"{len(vectors)} vectors vs {len(labels)} labels")
    if smoothing < 0:
        raise ValueError(f"smoothing must be >= 0, got {smoothing}")
    if classes is None:
        ordered = tuple(dict.fromkeys(labels))
    else:
        ordered = tuple(classes)
    if len(ordered) < 2:
        raise ValueError(f"need at least two classes, got {ordered}")

    doc_counts = {c: 0 for c in ordered}
    mass: dict[str, dict[Attribute, float]] = {c: defaultdict(float) for c in ordered}
    for vector, label in zip(vectors, labels):
        if label not in doc_counts:
            raise ValueError(f"label {label!r} not in classes {ordered}")
        doc_counts[label] += 1
        class_mass = mass[label]
        for attr, weight in vector.weights.items():
            class_mass[attr] += weight
    empty = [c for c, n in doc_counts.items() if n == 0]
    if empty:
        raise ValueError(f"classes with zero training documents: {empty}")

    vocabulary = frozenset(attr for class_mass in mass.values() for attr in class_mass)
    return NBModel(
        classes=ordered,
        class_doc_counts=doc_counts,
        mass={c: dict(m) for c, m in mass.items()},
        class_mass_totals={c: math.fsum(m.values()) for c, m in mass.items()},
        vocabulary=vocabulary,
        smoothing=smoothing,
    )


def cond_log_prob(model: NBModel, attribute: Attribute, label: str) -> float:
    """log Pr(attribute | class) under Laplace smoothing.

    Raises KeyError for attributes outside the vocabulary; callers must skip
    unseen attributes.
    """
    if attribute not in model.vocabulary:
        raise KeyError(f"attribute {attribute!r} not in vocabulary")
    numerator = model.mass[label].get(attribute, 0.0) + model.smoothing
    denominator = model.class_mass_totals[label] + model.smoothing * len(model.vocabulary)
    if numerator <= 0 or denominator <= 0:
        return _NEG_INF
    return math.log(numerator) - math.log(denominator)


def log_posterior_scores(
    model: NBModel, vector: AttributeVector, use_prior: bool = True
) -> dict[str, float]:
    """Per-class decision scores: [log prior +] sum of x_d * log Pr(d | c).

    Attributes outside the vocabulary are skipped; an empty intersection
    reduces the scores to the priors (or all zeros without the prior term).
    """
    smoothing = model.smoothing
    vocab_size = len(model.vocabulary)
    scores: dict[str, float] = {}
    for label in model.classes:
        score = model.log_prior(label) if use_prior else 0.0
        class_mass = model.mass[label]
        denominator = model.class_mass_totals[label] + smoothing * vocab_size
        log_denom = math.log(denominator) if denominator > 0 else 0.0
        for attr, x in vector.weights.items():
            if attr not in model.vocabulary:
                continue
            numerator = class_mass.get(attr, 0.0) + smoothing
            if numerator > 0:
                score += x * (math.log(numerator) - log_denom)
            else:
                score = _NEG_INF  # class eliminated
                break
        scores[label] = score
    return scores


def argmax_label(scores: Mapping[str, float], class_order: Sequence[str]) -> tuple[str, bool]:
    """Highest-scoring label, first in ``class_order`` on ties; flags the tie."""
    best = class_order[0]
    for label in class_order[1:]:
        if scores[label] > scores[best]:
            best = label
    tied = sum(1 for label in class_order if scores[label] == scores[best]) > 1
    return best, tied


def classify(model: NBModel, vector: AttributeVector, use_prior: bool = True) -> str:
    """Most likely class; ties go to the first class in the model's order."""
    scores = log_posterior_scores(model, vector, use_prior)
    return argmax_label(scores, model.classes)[0]


def posterior(model: NBModel, vector: AttributeVector) -> dict[str, float]:
    """Normalized class posteriors via a max-shifted softmax of the scores.

    With smoothing 0, eliminated classes get probability 0 and the rest are
    renormalized; if every class is eliminated the result is uniform.
    """
    scores = log_posterior_scores(model, vector, use_prior=True)
    peak = max(scores.values())
    if peak == _NEG_INF:
        return {label: 1.0 / len(model.classes) for label in model.classes}
    shifted = {label: math.exp(score - peak) for label, score in scores.items()}
    total = math.fsum(shifted.values())
    return {label: value / total for label, value in shifted.items()}


def save_model(model: NBModel, path: str | Path) -> None:
    """Write the model in the versioned line-oriented text format.

    Header carries the format version, class names, smoothing, vocabulary
    size, and per-class document counts; then one tab-separated line per
    (class, attribute, mass) entry in lexicographic order, so files diff
    cleanly. Tokens never contain whitespace, which keeps the format
    unambiguous.
    """
    lines = [
        "\t".join(
            [
                _MODEL_FORMAT,
                _MODEL_VERSION,
                "classes=" + ",".join(model.classes),
                f"smoothing={model.smoothing!r}",
                f"vocabulary={len(model.vocabulary)}",
                "doc_counts=" + ",".join(str(model.class_doc_counts[c]) for c in model.classes),
            ]
        )
    ]
    for label in model.classes:
        for attr in sorted(model.mass[label]):
            lines.append("\t".join([label, *attr, repr(model.mass[label][attr])]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> NBModel:
    """Read a model written by ``save_model``; totals are recomputed."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ValueError(f"empty model file: {path}")
    header = lines[0].split("\t")
    if header[:2] != [_MODEL_FORMAT, _MODEL_VERSION]:
        raise ValueError(f"unrecognized model header in {path}: {lines[0]!r}")
    fields = dict(part.split("=", 1) for part in header[2:])
    classes = tuple(fields["classes"].split(","))
    smoothing = float(fields["smoothing"])
    declared_vocab = int(fields["vocabulary"])
    doc_counts = dict(zip(classes, (int(n) for n in fields["doc_counts"].split(","))))

    mass: dict[str, dict[Attribute, float]] = {c: {} for c in classes}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) < 3:
            raise ValueError(f"{path}:{lineno}: malformed mass line {line!r}")
        label, terms, value = parts[0], tuple(parts[1:-1]), float(parts[-1])
        if label not in mass:
            raise ValueError(f"{path}:{lineno}: unknown class {label!r}")
        mass[label][terms] = value
    vocabulary = frozenset(attr for class_mass in mass.values() for attr in class_mass)
    if len(vocabulary) != declared_vocab:
        raise ValueError(
            f"{path}: header declares {declared_vocab} vocabulary entries, "
            f"file contains {len(vocabulary)}"
        )
    return NBModel(
        classes=classes,
        class_doc_counts=doc_counts,
        mass=mass,
        class_mass_totals={c: math.fsum(m.values()) for c, m in mass.items()},
        vocabulary=vocabulary,
        smoothing=smoothing,
    )
