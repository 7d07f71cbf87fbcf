"""Cross-validated evaluation: outer k-fold CV, nested parameter tuning for
the positional weight q, accuracy pooling, and Wilson confidence intervals.

All evaluations are deterministic given (corpus, config): fold assignment is
seed-keyed, grid points are visited in ascending order, and fold results are
merged in fold order regardless of thread scheduling.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from statistics import NormalDist
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _engine
from .corpus import (
    FILENAME_PREFIX,
    STRATIFIED_ROUND_ROBIN,
    Document,
    FoldPlan,
    LabeledCorpus,
    assign_folds,
)
from .features import OCCURRENCE_RULES, PRESENCE, WeightScheme
from .subjectivity import (
    SORT_DIRECTIONS,
    TRANSFORM_MODES,
    SubjectivityModel,
    score_sentences,
    transform_document,
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


#: Default q grid for nested tuning and sweeps.
DEFAULT_GRID = tuple(round(0.1 * i, 10) for i in range(1, 21))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that defines one evaluation run."""

    orders: tuple[int, ...] = (1,)
    scheme: WeightScheme = PRESENCE
    rule: str = "presence"
    k_fraction: float = 0.0
    transform_mode: str = "none"
    threshold: float = 0.5
    sort_direction: str = "ascending"
    smoothing: float = 1.0
    use_prior: bool = True
    tune_grid: tuple[float, ...] | None = None
    outer_k: int = 10
    inner_k: int = 5
    seed: int = 0
    fold_strategy: str = FILENAME_PREFIX
    cross_sentence_bigrams: bool = False

    def validate(self) -> None:
        if not self.orders or not set(self.orders) <= {1, 2}:
            raise ConfigError(f"orders must be a non-empty subset of {{1, 2}}: {self.orders}")
        if self.rule not in OCCURRENCE_RULES:
            raise ConfigError(f"rule must be one of {OCCURRENCE_RULES}, got {self.rule!r}")
        if not 0.0 <= self.k_fraction <= 1.0:
            raise ConfigError(f"k_fraction must be in [0, 1], got {self.k_fraction}")
        if self.transform_mode not in TRANSFORM_MODES:
            raise ConfigError(
                f"transform_mode must be one of {TRANSFORM_MODES}, got {self.transform_mode!r}"
            )
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.sort_direction not in SORT_DIRECTIONS:
            raise ConfigError(
                f"sort_direction must be one of {SORT_DIRECTIONS}, got {self.sort_direction!r}"
            )
        if self.smoothing < 0:
            raise ConfigError(f"smoothing must be >= 0, got {self.smoothing}")
        if self.outer_k < 2 or self.inner_k < 2:
            raise ConfigError(
                f"outer_k and inner_k must be >= 2, got {self.outer_k}/{self.inner_k}"
            )
        if self.tune_grid is not None:
            if len(self.tune_grid) == 0:
                raise ConfigError("tune_grid must be non-empty when tuning is requested")
            if list(self.tune_grid) != sorted(set(self.tune_grid)):
                raise ConfigError("tune_grid must be strictly increasing")
        if self.fold_strategy not in (FILENAME_PREFIX, STRATIFIED_ROUND_ROBIN):
            raise ConfigError(f"unknown fold_strategy {self.fold_strategy!r}")

    def effective_scheme(self) -> WeightScheme:
        """Presence shorthand pins the scheme to (1, 0)."""
        return PRESENCE if self.rule == "presence" else self.scheme


@dataclass(frozen=True)
class EvalReport:
    """Pooled cross-validation outcome."""

    per_fold_accuracy: tuple[float, ...]
    pooled_accuracy: float
    n: int
    wilson_low: float
    wilson_high: float
    chosen_q_per_fold: tuple[float, ...] | None
    tie_count: int

    def to_dict(self) -> dict:
        return {
            "per_fold_accuracy": list(self.per_fold_accuracy),
            "pooled_accuracy": self.pooled_accuracy,
            "n": self.n,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
            "chosen_q_per_fold": (
                None if self.chosen_q_per_fold is None else list(self.chosen_q_per_fold)
            ),
            "tie_count": self.tie_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "EvalReport":
        chosen = data["chosen_q_per_fold"]
        return cls(
            per_fold_accuracy=tuple(data["per_fold_accuracy"]),
            pooled_accuracy=data["pooled_accuracy"],
            n=data["n"],
            wilson_low=data["wilson_low"],
            wilson_high=data["wilson_high"],
            chosen_q_per_fold=None if chosen is None else tuple(chosen),
            tie_count=data["tie_count"],
        )


@dataclass(frozen=True)
class SweepResult:
    """Accuracy (with interval) per grid point, q strictly increasing."""

    rows: tuple[tuple[float, float, float, float], ...]

    def to_csv(self) -> str:
        lines = ["q,accuracy,wilson_low,wilson_high"]
        for q, acc, low, high in self.rows:
            lines.append(f"{q!r},{acc!r},{low!r},{high!r}")
        return "\n".join(lines) + "\n"


def accuracy(predictions: Sequence, gold: Sequence) -> float:
    """Fraction of exact matches."""
    if len(predictions) != len(gold):
        raise ValueError(f"{len(predictions)} predictions vs {len(gold)} gold labels")
    if not predictions:
        raise ValueError("accuracy of empty sequences is undefined")
    return sum(p == g for p, g in zip(predictions, gold)) / len(predictions)


def wilson_interval(
    successes: int, n: int, confidence: float = 0.95
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= successes <= n:
        raise ValueError(f"successes must be in [0, {n}], got {successes}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p_hat = successes / n
    shrink = 1.0 + z * z / n
    center = (p_hat + z * z / (2 * n)) / shrink
    half_width = z * math.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n)) / shrink
    # the exact interval brackets p_hat within [0, 1]; clamp away float noise
    low = max(0.0, min(center - half_width, p_hat))
    high = min(1.0, max(center + half_width, p_hat))
    return low, high


# ---------------------------------------------------------------------------
# pipeline plumbing


def _transformed_documents(
    corpus: LabeledCorpus,
    config: ExperimentConfig,
    smodel: SubjectivityModel | None,
    sentence_scores: Mapping[str, Sequence[float]] | None,
) -> list[Document]:
    if config.transform_mode == "none":
        return list(corpus.documents)
    if smodel is None:
        raise ConfigError(
            f"transform_mode={config.transform_mode!r} requires a subjectivity model"
        )
    docs = []
    for doc in corpus.documents:
        scores = sentence_scores.get(doc.doc_id) if sentence_scores else None
        docs.append(
            transform_document(
                doc,
                smodel,
                mode=config.transform_mode,
                threshold=config.threshold,
                direction=config.sort_direction,
                scores=scores,
            )
        )
    return docs


def compute_sentence_scores(
    corpus: LabeledCorpus, smodel: SubjectivityModel
) -> dict[str, list[float]]:
    """Per-document sentence subjectivity scores, reusable across runs."""
    return {doc.doc_id: score_sentences(smodel, doc) for doc in corpus.documents}


@dataclass
class _Prepared:
    encoded: _engine.EncodedCorpus
    plan: FoldPlan
    fold_of_doc: np.ndarray  # int16[n_docs]
    doc_index: dict[str, int]


def _prepare(
    corpus: LabeledCorpus,
    config: ExperimentConfig,
    smodel: SubjectivityModel | None,
    sentence_scores: Mapping[str, Sequence[float]] | None,
) -> _Prepared:
    config.validate()
    plan = assign_folds(corpus, config.outer_k, config.fold_strategy, config.seed)
    documents = _transformed_documents(corpus, config, smodel, sentence_scores)
    encoded = _engine.encode_corpus(
        documents,
        classes=corpus.classes,
        orders=config.orders,
        rule=config.rule,
        k_fraction=config.k_fraction,
        cross_sentence_bigrams=config.cross_sentence_bigrams,
    )
    fold_of_doc = np.asarray(
        [plan.assignment[doc_id] for doc_id in encoded.doc_ids], dtype=np.int16
    )
    doc_index = {doc_id: i for i, doc_id in enumerate(encoded.doc_ids)}
    return _Prepared(encoded=encoded, plan=plan, fold_of_doc=fold_of_doc, doc_index=doc_index)


def _validate_grid_schemes(grid: Sequence[float], config: ExperimentConfig) -> None:
    """Every grid point must form a valid scheme with the configured a."""
    for q in grid:
        if q < 0 or (q == 0 and config.scheme.a == 0):
            raise ConfigError(
                f"grid value q={q} is invalid with a={config.scheme.a} "
                f"(weights must not all be zero)"
            )


def _map_ordered(fn: Callable, items: Sequence, threads: int | None) -> list:
    if threads is not None and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _fold_outcome(
    weighted: _engine.WeightedCorpus,
    prepared: _Prepared,
    config: ExperimentConfig,
    fold: int,
) -> tuple[int, int, int]:
    """(n_correct, n_test, n_ties) for one held-out fold."""
    encoded = prepared.encoded
    test_docs = np.flatnonzero(prepared.fold_of_doc == fold)
    train_mask = prepared.fold_of_doc != fold
    result = _engine.evaluate_split(
        weighted,
        encoded.labels,
        train_mask,
        test_docs,
        smoothing=config.smoothing,
        use_prior=config.use_prior,
        n_classes=len(encoded.classes),
    )
    n_correct = int(np.count_nonzero(result.predictions == encoded.labels[test_docs]))
    return n_correct, len(test_docs), result.n_ties


def _report_from_folds(fold_outcomes: Sequence[tuple[int, int, int]],
                       chosen_q: Sequence[float] | None) -> EvalReport:
    per_fold = tuple(c / n for c, n, _ in fold_outcomes)
    correct = sum(c for c, _, _ in fold_outcomes)
    n = sum(n for _, n, _ in fold_outcomes)
    low, high = wilson_interval(correct, n)
    return EvalReport(
        per_fold_accuracy=per_fold,
        pooled_accuracy=correct / n,
        n=n,
        wilson_low=low,
        wilson_high=high,
        chosen_q_per_fold=None if chosen_q is None else tuple(chosen_q),
        tie_count=sum(t for _, _, t in fold_outcomes),
    )


def cross_validate(
    corpus: LabeledCorpus,
    config: ExperimentConfig,
    subjectivity_model: SubjectivityModel | None = None,
    *,
    threads: int | None = None,
    sentence_scores: Mapping[str, Sequence[float]] | None = None,
) -> EvalReport:
    """Outer k-fold cross-validation at the configured fixed parameters.

    Accuracy is pooled over all held-out predictions (micro average).
    ``sentence_scores`` optionally memoizes per-document subjectivity
    posteriors; the transform logic itself always runs.
    """
    prepared = _prepare(corpus, config, subjectivity_model, sentence_scores)
    weighted = _engine.build_weights(prepared.encoded, config.effective_scheme())
    outcomes = _map_ordered(
        lambda fold: _fold_outcome(weighted, prepared, config, fold),
        range(config.outer_k),
        threads,
    )
    return _report_from_folds(outcomes, None)


@dataclass(frozen=True)
class NestedFoldPlan:
    """Outer fold with its inner train/validation splits, for leakage audits."""

    fold: int
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    inner_splits: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]  # (train, dev) pairs


def plan_nested_folds(corpus: LabeledCorpus, config: ExperimentConfig) -> list[NestedFoldPlan]:
    """The exact nested split structure ``nested_tune`` uses.

    Inner folds partition each outer training set with a stratified
    round-robin keyed by seed and outer fold index, so no held-out document
    ever reaches an inner split.
    """
    config.validate()
    plan = assign_folds(corpus, config.outer_k, config.fold_strategy, config.seed)
    by_id = {doc.doc_id: doc for doc in corpus.documents}
    nested = []
    for fold in range(config.outer_k):
        train_ids = tuple(plan.train_ids(fold))
        test_ids = tuple(plan.test_ids(fold))
        subcorpus = LabeledCorpus(
            documents=tuple(by_id[i] for i in train_ids), classes=corpus.classes
        )
        inner_plan = assign_folds(
            subcorpus,
            config.inner_k,
            STRATIFIED_ROUND_ROBIN,
            seed=config.seed * 1000 + fold,
        )
        inner_splits = tuple(
            (tuple(inner_plan.train_ids(j)), tuple(inner_plan.test_ids(j)))
            for j in range(config.inner_k)
        )
        nested.append(
            NestedFoldPlan(
                fold=fold, train_ids=train_ids, test_ids=test_ids, inner_splits=inner_splits
            )
        )
    return nested


def nested_tune(
    corpus: LabeledCorpus,
    config: ExperimentConfig,
    subjectivity_model: SubjectivityModel | None = None,
    *,
    threads: int | None = None,
    sentence_scores: Mapping[str, Sequence[float]] | None = None,
) -> EvalReport:
    """Outer CV with per-fold selection of q by inner cross-validation.

    For each outer fold, every grid q is scored by inner_k-fold CV over the
    outer training documents only; the q with the highest mean inner
    accuracy (smallest q on ties) is retrained on the full outer training
    set and evaluated on the held-out fold.
    """
    grid = config.tune_grid if config.tune_grid is not None else DEFAULT_GRID
    if not grid:
        raise ConfigError("nested tuning requires a non-empty grid")
    if config.rule == "presence":
        raise ConfigError("tuning q requires rule 'last' or 'sum' (presence pins q to 0)")
    _validate_grid_schemes(grid, config)
    config = replace(config, tune_grid=tuple(grid))
    prepared = _prepare(corpus, config, subjectivity_model, sentence_scores)
    encoded = prepared.encoded
    nested_plans = plan_nested_folds(corpus, config)

    def evaluate_against(weighted, train_mask, test_docs):
        result = _engine.evaluate_split(
            weighted,
            encoded.labels,
            train_mask,
            test_docs,
            smoothing=config.smoothing,
            use_prior=config.use_prior,
            n_classes=len(encoded.classes),
        )
        n_correct = int(np.count_nonzero(result.predictions == encoded.labels[test_docs]))
        return n_correct, result.n_ties

    def inner_mean(args) -> float:
        weighted, nested = args
        outer_train_mask = prepared.fold_of_doc != nested.fold
        accs = []
        for _, inner_dev in nested.inner_splits:
            dev_docs = np.asarray(
                sorted(prepared.doc_index[i] for i in inner_dev), dtype=np.int64
            )
            train_mask = outer_train_mask.copy()
            train_mask[dev_docs] = False
            n_correct, _ = evaluate_against(weighted, train_mask, dev_docs)
            accs.append(n_correct / len(dev_docs))
        return sum(accs) / len(accs)

    # grid-major so only one weighted corpus is materialized at a time
    best_q = [grid[0]] * config.outer_k
    best_mean = [-1.0] * config.outer_k
    for q in grid:  # ascending, so ties keep the smallest q
        weighted = _engine.build_weights(encoded, WeightScheme(config.scheme.a, q))
        means = _map_ordered(inner_mean, [(weighted, n) for n in nested_plans], threads)
        for fold, mean_acc in enumerate(means):
            if mean_acc > best_mean[fold]:
                best_q[fold], best_mean[fold] = q, mean_acc

    outcomes: list[tuple[int, int, int] | None] = [None] * config.outer_k
    for q in sorted(set(best_q)):
        weighted = _engine.build_weights(encoded, WeightScheme(config.scheme.a, q))
        for fold in range(config.outer_k):
            if best_q[fold] != q:
                continue
            train_mask = prepared.fold_of_doc != fold
            test_docs = np.flatnonzero(~train_mask)
            n_correct, n_ties = evaluate_against(weighted, train_mask, test_docs)
            outcomes[fold] = (n_correct, len(test_docs), n_ties)
    return _report_from_folds(outcomes, best_q)


def sweep_q(
    corpus: LabeledCorpus,
    config: ExperimentConfig,
    grid: Sequence[float],
    subjectivity_model: SubjectivityModel | None = None,
    *,
    threads: int | None = None,
    sentence_scores: Mapping[str, Sequence[float]] | None = None,
) -> SweepResult:
    """One full cross-validation per grid q, with folds fixed across points."""
    if not grid:
        raise ConfigError("sweep requires a non-empty grid")
    grid = list(grid)
    if grid != sorted(set(grid)):
        raise ConfigError("sweep grid must be strictly increasing")
    if config.rule == "presence":
        raise ConfigError("sweeping q requires rule 'last' or 'sum' (presence pins q to 0)")
    _validate_grid_schemes(grid, config)
    prepared = _prepare(corpus, config, subjectivity_model, sentence_scores)

    def run_point(q: float) -> tuple[float, float, float, float]:
        weighted = _engine.build_weights(prepared.encoded, WeightScheme(config.scheme.a, q))
        outcomes = [
            _fold_outcome(weighted, prepared, config, fold) for fold in range(config.outer_k)
        ]
        report = _report_from_folds(outcomes, None)
        return (q, report.pooled_accuracy, report.wilson_low, report.wilson_high)

    rows = _map_ordered(run_point, grid, threads)
    return SweepResult(rows=tuple(rows))
