"""Position-weighted multinomial naive Bayes for sentiment polarity
classification, with subjectivity-based sentence reordering and a
cross-validated evaluation harness."""

__version__ = "0.1.0"

from .corpus import (
    Document,
    FoldPlan,
    LabeledCorpus,
    assign_folds,
    load_polarity_corpus,
    load_subjectivity_corpus,
    tokenize,
)
from .features import (
    PRESENCE,
    AttributeVector,
    WeightScheme,
    extract_attributes,
    positional_weight,
    vectorize,
)
from .nbayes import NBModel, classify, load_model, posterior, save_model, train
from .subjectivity import (
    SubjectivityModel,
    sentence_subjectivity,
    train_subjectivity_model,
    transform_document,
)
from .evaluate import (
    EvalReport,
    ExperimentConfig,
    SweepResult,
    accuracy,
    cross_validate,
    nested_tune,
    sweep_q,
    wilson_interval,
)

__all__ = [
    "__version__",
    "Document",
    "FoldPlan",
    "LabeledCorpus",
    "assign_folds",
    "load_polarity_corpus",
    "load_subjectivity_corpus",
    "tokenize",
    "PRESENCE",
    "AttributeVector",
    "WeightScheme",
    "extract_attributes",
    "positional_weight",
    "vectorize",
    "NBModel",
    "classify",
    "load_model",
    "posterior",
    "save_model",
    "train",
    "SubjectivityModel",
    "sentence_subjectivity",
    "train_subjectivity_model",
    "transform_document",
    "EvalReport",
    "ExperimentConfig",
    "SweepResult",
    "accuracy",
    "cross_validate",
    "nested_tune",
    "sweep_q",
    "wilson_interval",
]
