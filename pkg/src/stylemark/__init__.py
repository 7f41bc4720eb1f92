"""Stylometric authorship identification toolkit.

Pipeline: segmented/annotated documents -> stylistic feature vectors and
per-author TF-IDF keyword profiles -> similarity-based and trainable
classifiers -> a cross-validation evaluation harness with agreement,
ablation, and baseline comparisons. A seeded synthetic-corpus generator
provides reproducible test data.
"""

from .corpus import (
    AnnotatedToken,
    Document,
    annotations_to_string,
    detect_dialogs,
    document_from_text,
    heuristic_annotate,
    load_corpus,
    load_document,
    segment,
    write_annotations,
)
from .exceptions import (
    AnnotationError,
    ConfigError,
    CorpusError,
    FeatureError,
    ModelFormatError,
    SchemaError,
    StylemarkError,
    SynthSpecError,
)
from .eval import (
    AblationReport,
    ConfusionMatrix,
    CvReport,
    ablate,
    cohen_kappa,
    cross_validate,
    cross_validate_baseline,
    error_attribution,
    kfold_split,
    model_agreement,
    ngram_baseline,
    stratified_folds,
    vocabulary_richness,
    vr_baseline,
)
from .features import (
    AuthorProfile,
    FeatureVector,
    build_centroid,
    build_profiles,
    drop_coordinate,
    extract_features,
    feature_schema,
    tfidf_keywords,
)
from .models import TrainConfig
from .mlp import MlpModel, predict_mlp, train_mlp
from .stat_models import (
    StatPrediction,
    chi_square_distance,
    classify_stat,
    cosine_similarity,
    euclidean_distance,
)
from .svm import SvmModel, predict_svm, train_svm
from .synth import AuthorStyle, SynthSpec, generate_synthetic_corpus, load_synth_spec
from .tree import TreeModel, predict_tree, train_tree

__version__ = "0.1.0"

__all__ = [
    "AnnotatedToken",
    "Document",
    "annotations_to_string",
    "detect_dialogs",
    "document_from_text",
    "heuristic_annotate",
    "load_corpus",
    "load_document",
    "segment",
    "write_annotations",
    "AnnotationError",
    "ConfigError",
    "CorpusError",
    "FeatureError",
    "ModelFormatError",
    "SchemaError",
    "StylemarkError",
    "SynthSpecError",
    "AblationReport",
    "ConfusionMatrix",
    "CvReport",
    "ablate",
    "cohen_kappa",
    "cross_validate",
    "cross_validate_baseline",
    "error_attribution",
    "kfold_split",
    "model_agreement",
    "ngram_baseline",
    "stratified_folds",
    "vocabulary_richness",
    "vr_baseline",
    "AuthorProfile",
    "FeatureVector",
    "build_centroid",
    "build_profiles",
    "drop_coordinate",
    "extract_features",
    "feature_schema",
    "tfidf_keywords",
    "TrainConfig",
    "MlpModel",
    "predict_mlp",
    "train_mlp",
    "StatPrediction",
    "chi_square_distance",
    "classify_stat",
    "cosine_similarity",
    "euclidean_distance",
    "SvmModel",
    "predict_svm",
    "train_svm",
    "AuthorStyle",
    "SynthSpec",
    "generate_synthetic_corpus",
    "load_synth_spec",
    "TreeModel",
    "predict_tree",
    "train_tree",
]
