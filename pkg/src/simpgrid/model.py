"""Shared domain model for prompt-model evaluation sessions.

Every other module exchanges these value objects. They are frozen
dataclasses: once constructed they are safe to share across concurrent
tasks, and all mutation happens by building a replacement (usually via
``dataclasses.replace``) that is then persisted through the store's
single-writer path.

The document (de)serialization helpers at the bottom define the wire and
on-disk JSON shape. Key order is fixed so that a serialize/parse/serialize
round trip is byte-identical.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any


class EmptySource(ValueError):
    """Source text is empty after trimming."""


class EmptyMatrix(ValueError):
    """No prompts or no models were supplied."""


class LambdaOutOfRange(ValueError):
    """Linearity bias outside the legal [0, 2] range."""


LAMBDA_MIN = 0.0
LAMBDA_MAX = 2.0
DEFAULT_LAMBDA = 0.5

WEIGHT_MIN = 0.1
WEIGHT_MAX = 10.0


def check_lambda(value: float) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise LambdaOutOfRange(f"lambda must be a number, got {value!r}")
    value = float(value)
    if not (LAMBDA_MIN <= value <= LAMBDA_MAX):
        raise LambdaOutOfRange(f"lambda must lie in [0, 2], got {value}")
    return value


class VariantStatus(str, Enum):
    PENDING = "pending"
    SUCCEEDED = "succeeded"
    FAILED = "failed"


class SimilarityTier(str, Enum):
    SEMANTIC = "semantic"
    LEXICAL = "lexical"
    POSITIONAL = "positional"


def rel_position(index: int, total: int) -> float:
    """Normalized position of sentence `index` in a document of `total` sentences.

    0-based, spans exactly [0, 1]; a single-sentence document sits at 0.
    """
    return index / max(total - 1, 1)


@dataclass(frozen=True)
class SentenceRecord:
    """One sentence of a document.

    Attributes:
        index:          0-based ordinal within its document, contiguous from 0.
        text:           the sentence string, non-empty after trimming.
        rel_pos:        index / max(N - 1, 1) for a document of N sentences.
        word_count:     number of tokens produced by the tokenizer.
        syllable_count: summed syllable estimate over those tokens.
    """

    index: int
    text: str
    rel_pos: float
    word_count: int
    syllable_count: int


@dataclass(frozen=True)
class SimilarityMatrix:
    """Base sentence-to-sentence similarity, row = original, col = simplified.

    `tier` records which cascade level produced the values; the positional
    tier is all exact zeros by construction.
    """

    tier: SimilarityTier
    values: list[list[float]]

    @property
    def rows(self) -> int:
        return len(self.values)

    @property
    def cols(self) -> int:
        return len(self.values[0]) if self.values else 0


@dataclass(frozen=True)
class AlignmentLink:
    """Chosen original sentence for one simplified sentence.

    `score` is the penalized value the assignment maximized;
    `base_similarity` is the raw matrix entry before the positional penalty.
    """

    simplified_index: int
    original_index: int
    score: float
    base_similarity: float


@dataclass(frozen=True)
class ReadabilityReport:
    """Structural and readability statistics for one document.

    `compression_ratio` is simplified/source word count; it is absent (None)
    on the source document's own report.
    """

    word_count: int
    sentence_count: int
    avg_sentence_length: float
    syllable_count: int
    fk_grade: float
    fre: float
    compression_ratio: float | None = None


@dataclass(frozen=True)
class PromptSpec:
    prompt_id: str
    label: str
    body: str

    def __post_init__(self) -> None:
        if not self.body.strip():
            raise ValueError("prompt body must be non-empty")


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    label: str

    def __post_init__(self) -> None:
        if not self.model_id.strip():
            raise ValueError("model_id must be non-empty")


@dataclass(frozen=True)
class CriterionDefinition:
    """A user-defined annotation dimension.

    Any integer scale from binary (1-2) up to 100-point sliders is legal;
    degenerate scales (max <= min) are rejected at construction. The weight
    sets the criterion's relative impact in the overall percentage.
    """

    criterion_id: str
    name: str
    scale_min: int
    scale_max: int
    weight: float

    def __post_init__(self) -> None:
        if self.scale_max <= self.scale_min:
            raise ValueError(
                f"degenerate scale: scale_max ({self.scale_max}) must exceed "
                f"scale_min ({self.scale_min})"
            )
        if not (WEIGHT_MIN <= self.weight <= WEIGHT_MAX):
            raise ValueError(f"weight must lie in [0.1, 10.0], got {self.weight}")


@dataclass(frozen=True)
class SimplificationVariant:
    """One (prompt, model) cell of the evaluation matrix.

    Failed cells are first-class records so the P x M shape stays intact:
    they carry a failure_reason and no sentences, similarity, or metrics.
    """

    prompt_id: str
    model_id: str
    status: VariantStatus
    generated_text: str = ""
    failure_reason: str | None = None
    sentences: list[SentenceRecord] = field(default_factory=list)
    similarity: SimilarityMatrix | None = None
    alignments: list[AlignmentLink] = field(default_factory=list)
    metrics: ReadabilityReport | None = None
    duration_ms: int = 0


@dataclass(frozen=True)
class EvaluationSession:
    """One source text plus all P x M generated variants and their annotations.

    `linearity_bias` (serialized as "lambda") is the positional-penalty
    coefficient the stored alignments were computed at. Annotations map
    (prompt_id, model_id, criterion_id) to the raw manual score.
    """

    session_id: str
    created_at: datetime
    source_text: str
    source_sentences: list[SentenceRecord]
    source_metrics: ReadabilityReport
    prompts: list[PromptSpec]
    models: list[ModelSpec]
    linearity_bias: float
    variants: list[SimplificationVariant]
    annotations: dict[tuple[str, str, str], float] = field(default_factory=dict)

    def variant_for(self, prompt_id: str, model_id: str) -> SimplificationVariant | None:
        for v in self.variants:
            if v.prompt_id == prompt_id and v.model_id == model_id:
                return v
        return None

    @property
    def is_terminal(self) -> bool:
        return all(v.status is not VariantStatus.PENDING for v in self.variants)


@dataclass(frozen=True)
class SettingsDocument:
    """Persisted workbench configuration: prompt library, model registry,
    annotation criteria, and the default linearity bias for new sessions."""

    prompts: list[PromptSpec]
    models: list[ModelSpec]
    criteria: list[CriterionDefinition]
    default_lambda: float = DEFAULT_LAMBDA


def new_session_id() -> str:
    # 128 random bits as lowercase hex: collision-safe without coordination
    return secrets.token_hex(16)


def new_session(
    source_text: str,
    prompts: list[PromptSpec],
    models: list[ModelSpec],
    linearity_bias: float = DEFAULT_LAMBDA,
) -> EvaluationSession:
    """Build a session skeleton: source segmented and measured, one pending
    variant per (prompt, model) permutation, generation not yet run."""
    from . import textstats

    if not source_text or not source_text.strip():
        raise EmptySource("source text is empty")
    if not prompts or not models:
        raise EmptyMatrix("at least one prompt and one model are required")
    if len({p.prompt_id for p in prompts}) != len(prompts):
        raise ValueError("duplicate prompt_id in prompt list")
    if len({m.model_id for m in models}) != len(models):
        raise ValueError("duplicate model_id in model list")
    linearity_bias = check_lambda(linearity_bias)

    sentences = textstats.segment(source_text)
    metrics = textstats.readability([textstats.tokenize(s) for s in sentences])
    variants = [
        SimplificationVariant(prompt_id=p.prompt_id, model_id=m.model_id, status=VariantStatus.PENDING)
        for p in prompts
        for m in models
    ]
    return EvaluationSession(
        session_id=new_session_id(),
        created_at=datetime.now(timezone.utc),
        source_text=source_text,
        source_sentences=sentences,
        source_metrics=metrics,
        prompts=list(prompts),
        models=list(models),
        linearity_bias=linearity_bias,
        variants=variants,
    )


# --------------------------------------------------------------------------
# Document (de)serialization. Dict insertion order is the canonical key
# order; floats round-trip through json at full precision (repr shortest
# form), so parse(serialize(x)) == x field-for-field and a re-serialize is
# byte-identical.
# --------------------------------------------------------------------------


def sentence_to_doc(s: SentenceRecord) -> dict[str, Any]:
    return {
        "index": s.index,
        "text": s.text,
        "rel_pos": s.rel_pos,
        "word_count": s.word_count,
        "syllable_count": s.syllable_count,
    }


def sentence_from_doc(d: dict[str, Any]) -> SentenceRecord:
    return SentenceRecord(
        index=d["index"],
        text=d["text"],
        rel_pos=d["rel_pos"],
        word_count=d["word_count"],
        syllable_count=d["syllable_count"],
    )


def matrix_to_doc(m: SimilarityMatrix) -> dict[str, Any]:
    return {"tier": m.tier.value, "rows": m.rows, "cols": m.cols, "values": m.values}


def matrix_from_doc(d: dict[str, Any]) -> SimilarityMatrix:
    return SimilarityMatrix(tier=SimilarityTier(d["tier"]), values=d["values"])


def link_to_doc(l: AlignmentLink) -> dict[str, Any]:
    return {
        "simplified_index": l.simplified_index,
        "original_index": l.original_index,
        "score": l.score,
        "base_similarity": l.base_similarity,
    }


def link_from_doc(d: dict[str, Any]) -> AlignmentLink:
    return AlignmentLink(
        simplified_index=d["simplified_index"],
        original_index=d["original_index"],
        score=d["score"],
        base_similarity=d["base_similarity"],
    )


def metrics_to_doc(r: ReadabilityReport) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "word_count": r.word_count,
        "sentence_count": r.sentence_count,
        "avg_sentence_length": r.avg_sentence_length,
        "syllable_count": r.syllable_count,
        "fk_grade": r.fk_grade,
        "fre": r.fre,
    }
    if r.compression_ratio is not None:
        doc["compression_ratio"] = r.compression_ratio
    return doc


def metrics_from_doc(d: dict[str, Any]) -> ReadabilityReport:
    return ReadabilityReport(
        word_count=d["word_count"],
        sentence_count=d["sentence_count"],
        avg_sentence_length=d["avg_sentence_length"],
        syllable_count=d["syllable_count"],
        fk_grade=d["fk_grade"],
        fre=d["fre"],
        compression_ratio=d.get("compression_ratio"),
    )


def prompt_to_doc(p: PromptSpec) -> dict[str, Any]:
    return {"prompt_id": p.prompt_id, "label": p.label, "body": p.body}


def prompt_from_doc(d: dict[str, Any]) -> PromptSpec:
    return PromptSpec(prompt_id=d["prompt_id"], label=d["label"], body=d["body"])


def model_to_doc(m: ModelSpec) -> dict[str, Any]:
    return {"model_id": m.model_id, "label": m.label}


def model_from_doc(d: dict[str, Any]) -> ModelSpec:
    return ModelSpec(model_id=d["model_id"], label=d["label"])


def criterion_to_doc(c: CriterionDefinition) -> dict[str, Any]:
    return {
        "criterion_id": c.criterion_id,
        "name": c.name,
        "scale_min": c.scale_min,
        "scale_max": c.scale_max,
        "weight": c.weight,
    }


def criterion_from_doc(d: dict[str, Any]) -> CriterionDefinition:
    return CriterionDefinition(
        criterion_id=d["criterion_id"],
        name=d["name"],
        scale_min=d["scale_min"],
        scale_max=d["scale_max"],
        weight=d["weight"],
    )


def variant_to_doc(v: SimplificationVariant) -> dict[str, Any]:
    return {
        "prompt_id": v.prompt_id,
        "model_id": v.model_id,
        "status": v.status.value,
        "generated_text": v.generated_text,
        "failure_reason": v.failure_reason,
        "sentences": [sentence_to_doc(s) for s in v.sentences],
        "similarity": matrix_to_doc(v.similarity) if v.similarity is not None else None,
        "alignments": [link_to_doc(l) for l in v.alignments],
        "metrics": metrics_to_doc(v.metrics) if v.metrics is not None else None,
        "duration_ms": v.duration_ms,
    }


def variant_from_doc(d: dict[str, Any]) -> SimplificationVariant:
    return SimplificationVariant(
        prompt_id=d["prompt_id"],
        model_id=d["model_id"],
        status=VariantStatus(d["status"]),
        generated_text=d["generated_text"],
        failure_reason=d["failure_reason"],
        sentences=[sentence_from_doc(s) for s in d["sentences"]],
        similarity=matrix_from_doc(d["similarity"]) if d["similarity"] is not None else None,
        alignments=[link_from_doc(l) for l in d["alignments"]],
        metrics=metrics_from_doc(d["metrics"]) if d["metrics"] is not None else None,
        duration_ms=d["duration_ms"],
    )


def session_to_doc(s: EvaluationSession) -> dict[str, Any]:
    return {
        "session_id": s.session_id,
        "created_at": s.created_at.isoformat(),
        "source_text": s.source_text,
        "source_sentences": [sentence_to_doc(r) for r in s.source_sentences],
        "source_metrics": metrics_to_doc(s.source_metrics),
        "prompts": [prompt_to_doc(p) for p in s.prompts],
        "models": [model_to_doc(m) for m in s.models],
        "lambda": s.linearity_bias,
        "variants": [variant_to_doc(v) for v in s.variants],
        "annotations": [
            {
                "prompt_id": pid,
                "model_id": mid,
                "criterion_id": cid,
                "raw_score": score,
            }
            for (pid, mid, cid), score in sorted(s.annotations.items())
        ],
    }


def session_from_doc(d: dict[str, Any]) -> EvaluationSession:
    return EvaluationSession(
        session_id=d["session_id"],
        created_at=datetime.fromisoformat(d["created_at"]),
        source_text=d["source_text"],
        source_sentences=[sentence_from_doc(r) for r in d["source_sentences"]],
        source_metrics=metrics_from_doc(d["source_metrics"]),
        prompts=[prompt_from_doc(p) for p in d["prompts"]],
        models=[model_from_doc(m) for m in d["models"]],
        linearity_bias=d["lambda"],
        variants=[variant_from_doc(v) for v in d["variants"]],
        annotations={
            (a["prompt_id"], a["model_id"], a["criterion_id"]): a["raw_score"]
            for a in d["annotations"]
        },
    )


def settings_to_doc(s: SettingsDocument) -> dict[str, Any]:
    return {
        "prompts": [prompt_to_doc(p) for p in s.prompts],
        "models": [model_to_doc(m) for m in s.models],
        "criteria": [criterion_to_doc(c) for c in s.criteria],
        "default_lambda": s.default_lambda,
    }


def settings_from_doc(d: dict[str, Any]) -> SettingsDocument:
    return SettingsDocument(
        prompts=[prompt_from_doc(p) for p in d["prompts"]],
        models=[model_from_doc(m) for m in d["models"]],
        criteria=[criterion_from_doc(c) for c in d["criteria"]],
        default_lambda=d["default_lambda"],
    )
