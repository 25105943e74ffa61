"""simpgrid: a local workbench for comparing LLM text simplifications.

Runs a prompt x model generation grid concurrently, aligns each simplified
output to the source sentence-by-sentence through a tiered similarity
cascade with a tunable linearity bias, computes readability deltas, and
stores everything as portable JSON documents with CSV export for analysis.
"""

from .config import AppConfig, ChatConfig, EmbeddingConfig, config_from_env
from .model import (
    DEFAULT_LAMBDA,
    LAMBDA_MAX,
    LAMBDA_MIN,
    AlignmentLink,
    CriterionDefinition,
    EvaluationSession,
    ModelSpec,
    PromptSpec,
    ReadabilityReport,
    SentenceRecord,
    SettingsDocument,
    SimilarityMatrix,
    SimilarityTier,
    SimplificationVariant,
    VariantStatus,
    new_session,
)

__all__ = [
    "AppConfig",
    "ChatConfig",
    "EmbeddingConfig",
    "config_from_env",
    "DEFAULT_LAMBDA",
    "LAMBDA_MAX",
    "LAMBDA_MIN",
    "AlignmentLink",
    "CriterionDefinition",
    "EvaluationSession",
    "ModelSpec",
    "PromptSpec",
    "ReadabilityReport",
    "SentenceRecord",
    "SettingsDocument",
    "SimilarityMatrix",
    "SimilarityTier",
    "SimplificationVariant",
    "VariantStatus",
    "new_session",
]

__version__ = "0.1.0"
