"""Document persistence and export.

Sessions and settings live as single JSON documents under a data directory.
Every write goes through a temp-file-then-rename sequence so a crash mid-write
leaves either the old document or the new one, never a torn file. Exports use
one canonical serialization (fixed key order, repr floats) so that
export -> import -> export is byte-identical.
"""

from __future__ import annotations

import io
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime

from . import model
from .annotations import overall_percentage, variant_scores
from .model import (
    CriterionDefinition,
    EvaluationSession,
    SettingsDocument,
    VariantStatus,
)


class SessionNotFound(KeyError):
    pass


PREVIEW_CHARS = 120


@dataclass(frozen=True)
class SessionSummary:
    session_id: str
    created_at: datetime
    source_preview: str


class SessionPending(Exception):
    """Export refused while any variant is still being generated."""


SETTINGS_FILENAME = "settings.json"


def default_settings() -> SettingsDocument:
    """Initial settings: five prompt styles targeting graded reading levels,
    no models or criteria until the user configures them."""
    prompts = [
        model.PromptSpec(
            prompt_id="cefr-a1",
            label="CEFR A1",
            body=(
                "Rewrite the text for a beginner reader (CEFR A1). Use only "
                "very common words and short sentences. Keep every fact."
            ),
        ),
        model.PromptSpec(
            prompt_id="cefr-a2",
            label="CEFR A2",
            body=(
                "Rewrite the text for an elementary reader (CEFR A2). Use "
                "common vocabulary and simple sentence structures. Keep every fact."
            ),
        ),
        model.PromptSpec(
            prompt_id="cefr-b1",
            label="CEFR B1",
            body=(
                "Rewrite the text for an intermediate reader (CEFR B1). "
                "Prefer everyday vocabulary and avoid long clauses. Keep every fact."
            ),
        ),
        model.PromptSpec(
            prompt_id="cefr-b2",
            label="CEFR B2",
            body=(
                "Rewrite the text for an upper-intermediate reader (CEFR B2). "
                "Simplify rare terms but keep technical precision. Keep every fact."
            ),
        ),
        model.PromptSpec(
            prompt_id="plain",
            label="Plain language",
            body=(
                "Rewrite the text in plain language. Split long sentences, "
                "replace jargon, and keep the original meaning and order of ideas."
            ),
        ),
    ]
    return SettingsDocument(
        prompts=prompts,
        models=[],
        criteria=[],
        default_lambda=model.DEFAULT_LAMBDA,
    )


class DocumentStore:
    """Filesystem-backed store: sessions/<session_id>.json plus settings.json."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        self.sessions_dir = os.path.join(data_dir, "sessions")
        os.makedirs(self.sessions_dir, exist_ok=True)

    # -- atomic write -----------------------------------------------------

    def _atomic_write(self, path: str, text: str) -> None:
        directory = os.path.dirname(path)
        fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise

    # -- sessions ----------------------------------------------------------

    def _session_path(self, session_id: str) -> str:
        if not session_id or "/" in session_id or session_id.startswith("."):
            raise SessionNotFound(session_id)
        return os.path.join(self.sessions_dir, f"{session_id}.json")

    def save_session(self, session: EvaluationSession) -> None:
        # persistence accepts any state; only the export operation is gated
        self._atomic_write(self._session_path(session.session_id), _session_text(session))

    def load_session(self, session_id: str) -> EvaluationSession:
        path = self._session_path(session_id)
        try:
            with open(path, encoding="utf-8") as handle:
                doc = json.load(handle)
        except FileNotFoundError:
            raise SessionNotFound(session_id) from None
        return model.session_from_doc(doc)

    def list_sessions(self) -> list[SessionSummary]:
        """Summaries of all readable sessions, newest first. Unparsable files
        (including in-flight temp files) are skipped so one corrupt document
        cannot take down the listing."""
        summaries = []
        for name in os.listdir(self.sessions_dir):
            if not name.endswith(".json"):
                continue
            try:
                session = self.load_session(name[: -len(".json")])
            except (SessionNotFound, ValueError, KeyError, json.JSONDecodeError):
                continue
            preview = " ".join(session.source_text.split())
            if len(preview) > PREVIEW_CHARS:
                preview = preview[: PREVIEW_CHARS - 1].rstrip() + "…"
            summaries.append(
                SessionSummary(
                    session_id=session.session_id,
                    created_at=session.created_at,
                    source_preview=preview,
                )
            )
        summaries.sort(key=lambda s: s.created_at, reverse=True)
        return summaries

    # -- settings ----------------------------------------------------------

    def load_settings(self) -> SettingsDocument:
        path = os.path.join(self.data_dir, SETTINGS_FILENAME)
        try:
            with open(path, encoding="utf-8") as handle:
                return model.settings_from_doc(json.load(handle))
        except FileNotFoundError:
            return default_settings()

    def save_settings(self, settings: SettingsDocument) -> None:
        path = os.path.join(self.data_dir, SETTINGS_FILENAME)
        doc = model.settings_to_doc(settings)
        self._atomic_write(path, json.dumps(doc, ensure_ascii=False, indent=2) + "\n")


# --------------------------------------------------------------------------
# Canonical JSON export / import
# --------------------------------------------------------------------------


def require_terminal(session: EvaluationSession) -> None:
    if not session.is_terminal:
        raise SessionPending(session.session_id)


def _session_text(session: EvaluationSession) -> str:
    return json.dumps(model.session_to_doc(session), ensure_ascii=False, indent=2) + "\n"


def export_json(session: EvaluationSession) -> str:
    require_terminal(session)
    return _session_text(session)


def import_json(text: str) -> EvaluationSession:
    return model.session_from_doc(json.loads(text))


# --------------------------------------------------------------------------
# CSV export: one row per aligned simplified sentence, variant-level values
# repeated on each of its rows; a sentence-less (failed) variant still
# contributes one row so every variant is visible in the flat file.
# --------------------------------------------------------------------------

_CSV_NEEDS_QUOTING = set(',"\n\r')


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        text = repr(value)
    elif isinstance(value, int):
        text = str(value)
    else:
        text = str(value)
    if any(c in _CSV_NEEDS_QUOTING for c in text):
        text = '"' + text.replace('"', '""') + '"'
    return text


def csv_header(criteria: list[CriterionDefinition]) -> list[str]:
    return [
        "session_id",
        "prompt_id",
        "prompt_label",
        "model_id",
        "model_label",
        "status",
        "similarity_tier",
        "simplified_index",
        "original_index",
        "alignment_score",
        "base_similarity",
        "simplified_sentence",
        "original_sentence",
        "fk_grade",
        "fre",
        "compression_ratio",
        "word_count",
        "sentence_count",
        "avg_sentence_length",
        "overall_percentage",
    ] + [f"criterion_{c.criterion_id}" for c in criteria]


def export_csv(session: EvaluationSession, criteria: list[CriterionDefinition]) -> str:
    require_terminal(session)
    buffer = io.StringIO()
    buffer.write(",".join(csv_header(criteria)) + "\n")

    prompt_labels = {p.prompt_id: p.label for p in session.prompts}
    model_labels = {m.model_id: m.label for m in session.models}

    for variant in session.variants:
        scores = variant_scores(session, variant.prompt_id, variant.model_id)
        overall = overall_percentage(criteria, scores)
        shared_left = [
            session.session_id,
            variant.prompt_id,
            prompt_labels.get(variant.prompt_id, ""),
            variant.model_id,
            model_labels.get(variant.model_id, ""),
            variant.status.value,
            variant.similarity.tier.value if variant.similarity is not None else None,
        ]
        metrics = variant.metrics
        shared_right = [
            metrics.fk_grade if metrics is not None else None,
            metrics.fre if metrics is not None else None,
            metrics.compression_ratio if metrics is not None else None,
            metrics.word_count if metrics is not None else None,
            metrics.sentence_count if metrics is not None else None,
            metrics.avg_sentence_length if metrics is not None else None,
            overall,
        ] + [scores.get(c.criterion_id) for c in criteria]

        if variant.status is VariantStatus.SUCCEEDED and variant.sentences:
            link_by_col = {link.simplified_index: link for link in variant.alignments}
            for j, sentence in enumerate(variant.sentences):
                link = link_by_col.get(j)
                row = shared_left + [
                    j,
                    link.original_index if link is not None else None,
                    link.score if link is not None else None,
                    link.base_similarity if link is not None else None,
                    sentence.text,
                    (
                        session.source_sentences[link.original_index].text
                        if link is not None
                        else None
                    ),
                ] + shared_right
                buffer.write(",".join(_csv_cell(v) for v in row) + "\n")
        else:
            row = shared_left + [None, None, None, None, None, None] + shared_right
            buffer.write(",".join(_csv_cell(v) for v in row) + "\n")

    return buffer.getvalue()
