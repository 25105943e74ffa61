"""Weighted aggregation of human annotation scores.

Each criterion is scored on its own scale and carries a weight; the overall
quality of a variant is the weighted mean of the min-max normalized scores,
reported as a percentage. Criteria without a recorded score are skipped
rather than treated as zero, and a variant with no scored criteria at all is
Unscored (None) instead of 0%.
"""

from __future__ import annotations

from dataclasses import replace

from .model import CriterionDefinition, EvaluationSession, VariantStatus


class OutOfScale(ValueError):
    pass


class UnknownCriterion(KeyError):
    pass


class VariantFailedOrMissing(LookupError):
    pass


def validate_score(criterion: CriterionDefinition, value: float) -> float:
    """A score must be a finite number within the criterion's scale."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"score for '{criterion.criterion_id}' must be a number")
    value = float(value)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"score for '{criterion.criterion_id}' must be finite")
    if not criterion.scale_min <= value <= criterion.scale_max:
        raise OutOfScale(
            f"score for '{criterion.criterion_id}' must lie in "
            f"[{criterion.scale_min}, {criterion.scale_max}], got {value}"
        )
    return value


def upsert_score(
    session: EvaluationSession,
    criteria: list[CriterionDefinition],
    prompt_id: str,
    model_id: str,
    criterion_id: str,
    raw_score: float,
) -> EvaluationSession:
    """Record one manual score; a later write for the same (variant, criterion)
    replaces the earlier one.

    Only succeeded variants accept scores: a failed variant has nothing to
    judge and stays Unscored.
    """
    criterion = next((c for c in criteria if c.criterion_id == criterion_id), None)
    if criterion is None:
        raise UnknownCriterion(criterion_id)
    variant = session.variant_for(prompt_id, model_id)
    if variant is None or variant.status is not VariantStatus.SUCCEEDED:
        raise VariantFailedOrMissing(f"({prompt_id}, {model_id})")
    value = validate_score(criterion, raw_score)
    annotations = dict(session.annotations)
    annotations[(prompt_id, model_id, criterion_id)] = value
    return replace(session, annotations=annotations)


def overall_percentage(
    criteria: list[CriterionDefinition],
    scores: dict[str, float],
) -> float | None:
    """Weighted overall score in [0, 100], or None when nothing is scored.

        100 * sum(w_c * (s_c - min_c) / (max_c - min_c)) / sum(w_c)

    restricted to criteria that have a score. All-minimum scores give exactly
    0.0 and all-maximum exactly 100.0.
    """
    total_weight = 0.0
    weighted = 0.0
    for criterion in criteria:
        if criterion.criterion_id not in scores:
            continue
        value = validate_score(criterion, scores[criterion.criterion_id])
        span = criterion.scale_max - criterion.scale_min
        normalized = (value - criterion.scale_min) / span
        weighted += criterion.weight * normalized
        total_weight += criterion.weight
    if total_weight == 0.0:
        return None
    return 100.0 * weighted / total_weight


def variant_scores(
    session: EvaluationSession, prompt_id: str, model_id: str
) -> dict[str, float]:
    """The recorded scores for one variant, keyed by criterion id."""
    return {
        cid: value
        for (pid, mid, cid), value in session.annotations.items()
        if pid == prompt_id and mid == model_id
    }


def session_percentages(
    session: EvaluationSession, criteria: list[CriterionDefinition]
) -> list[dict]:
    """Overall percentage for every variant cell of the session, in the
    session's prompt-major order. Value is None for unscored variants."""
    out = []
    for prompt in session.prompts:
        for model in session.models:
            scores = variant_scores(session, prompt.prompt_id, model.model_id)
            out.append(
                {
                    "prompt_id": prompt.prompt_id,
                    "model_id": model.model_id,
                    "value": overall_percentage(criteria, scores),
                }
            )
    return out
