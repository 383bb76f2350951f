"""Issue detection: question banks, ternary featurization, OvR classifiers."""

from .families import FAMILIES, FamilyError, Model, fit_family, model_from_dict
from .features import (
    FeatureError,
    FeatureRecord,
    FeatureVector,
    featurize,
    load_features,
    qa_request,
    save_features,
)
from .questions import (
    BankGenerationError,
    QuestionBank,
    bank_request,
    generate_question_bank,
    generic_bank,
    parse_qa_answer,
    parse_question_list,
)
from .training import (
    DEFAULT_BETA,
    THRESHOLD_GRID,
    PredictionResult,
    TrainedDetector,
    TrainingError,
    f_beta,
    load_detector,
    predict,
    save_detector,
    train_detector,
    tune_threshold,
)

__all__ = [
    "FAMILIES",
    "FamilyError",
    "Model",
    "fit_family",
    "model_from_dict",
    "FeatureError",
    "FeatureRecord",
    "FeatureVector",
    "featurize",
    "load_features",
    "qa_request",
    "save_features",
    "BankGenerationError",
    "QuestionBank",
    "bank_request",
    "generate_question_bank",
    "generic_bank",
    "parse_qa_answer",
    "parse_question_list",
    "DEFAULT_BETA",
    "THRESHOLD_GRID",
    "PredictionResult",
    "TrainedDetector",
    "TrainingError",
    "f_beta",
    "load_detector",
    "predict",
    "save_detector",
    "train_detector",
    "tune_threshold",
]
