import dataclasses
import json
import os
from datetime import timedelta

import pytest

from golden import GOLDEN_CRITERIA, golden_session
from simpgrid import model
from simpgrid.model import VariantStatus
from simpgrid.store import (
    DocumentStore,
    SessionNotFound,
    SessionPending,
    csv_header,
    default_settings,
    export_csv,
    export_json,
    import_json,
)

GOLDEN_CSV = os.path.join(os.path.dirname(__file__), "data", "golden_2x2.csv")


@pytest.fixture
def doc_store(tmp_path):
    return DocumentStore(str(tmp_path / "data"))


def _pending(session):
    first = dataclasses.replace(session.variants[0], status=VariantStatus.PENDING)
    return dataclasses.replace(session, variants=[first] + session.variants[1:])


class TestSessionStorage:
    def test_save_then_load_is_field_identical(self, doc_store):
        session = golden_session()
        doc_store.save_session(session)
        assert doc_store.load_session(session.session_id) == session

    def test_unknown_id_not_found(self, doc_store):
        with pytest.raises(SessionNotFound):
            doc_store.load_session("0" * 32)

    def test_path_traversal_treated_as_not_found(self, doc_store):
        for bad in ("../settings", ".hidden", ""):
            with pytest.raises(SessionNotFound):
                doc_store.load_session(bad)

    def test_second_save_replaces_first(self, doc_store):
        session = golden_session()
        doc_store.save_session(session)
        relabeled = dataclasses.replace(session, linearity_bias=1.5)
        doc_store.save_session(relabeled)
        assert doc_store.load_session(session.session_id).linearity_bias == 1.5

    def test_list_sessions_newest_first(self, doc_store):
        base = golden_session()
        ids = []
        for k in range(3):
            session = dataclasses.replace(
                base,
                session_id=f"{k:032x}",
                created_at=base.created_at + timedelta(minutes=k),
            )
            doc_store.save_session(session)
            ids.append(session.session_id)
        listed = doc_store.list_sessions()
        assert [s.session_id for s in listed] == list(reversed(ids))
        assert listed[0].source_preview.startswith("The committee")

    def test_list_skips_corrupt_and_foreign_files(self, doc_store):
        doc_store.save_session(golden_session())
        with open(os.path.join(doc_store.sessions_dir, "broken.json"), "w") as fh:
            fh.write("{ not json")
        with open(os.path.join(doc_store.sessions_dir, "note.txt"), "w") as fh:
            fh.write("unrelated")
        assert len(doc_store.list_sessions()) == 1

    def test_empty_directory_lists_nothing(self, doc_store):
        assert doc_store.list_sessions() == []


class TestAtomicity:
    def test_interrupted_write_preserves_existing_file(self, doc_store, monkeypatch):
        session = golden_session()
        doc_store.save_session(session)
        original_bytes = open(
            os.path.join(doc_store.sessions_dir, f"{session.session_id}.json"), "rb"
        ).read()

        def exploding_replace(src, dst):
            raise OSError("simulated crash during rename")

        monkeypatch.setattr(os, "replace", exploding_replace)
        mutated = dataclasses.replace(session, linearity_bias=2.0)
        with pytest.raises(OSError):
            doc_store.save_session(mutated)
        monkeypatch.undo()

        on_disk = open(
            os.path.join(doc_store.sessions_dir, f"{session.session_id}.json"), "rb"
        ).read()
        assert on_disk == original_bytes
        assert doc_store.load_session(session.session_id) == session

    def test_no_temp_files_left_behind(self, doc_store, monkeypatch):
        session = golden_session()

        def exploding_replace(src, dst):
            raise OSError("boom")

        monkeypatch.setattr(os, "replace", exploding_replace)
        with pytest.raises(OSError):
            doc_store.save_session(session)
        monkeypatch.undo()
        assert [n for n in os.listdir(doc_store.sessions_dir) if n.endswith(".tmp")] == []

    def test_every_file_parses_after_interleaved_saves(self, doc_store, monkeypatch):
        session = golden_session()
        fail = {"on": False}
        real_replace = os.replace

        def flaky_replace(src, dst):
            if fail["on"]:
                raise OSError("flaky")
            return real_replace(src, dst)

        monkeypatch.setattr(os, "replace", flaky_replace)
        for k in range(8):
            fail["on"] = k % 3 == 1
            try:
                doc_store.save_session(
                    dataclasses.replace(session, linearity_bias=(k % 5) / 2.0)
                )
            except OSError:
                pass
        monkeypatch.undo()
        for name in os.listdir(doc_store.sessions_dir):
            if name.endswith(".json"):
                with open(os.path.join(doc_store.sessions_dir, name)) as fh:
                    json.load(fh)


class TestJsonExport:
    def test_export_import_export_byte_identical(self):
        first = export_json(golden_session())
        second = export_json(import_json(first))
        assert first == second

    def test_import_reproduces_field_identical_session(self):
        session = golden_session()
        assert import_json(export_json(session)) == session

    def test_export_refused_while_pending(self):
        with pytest.raises(SessionPending):
            export_json(_pending(golden_session()))

    def test_pending_session_still_persists(self, doc_store):
        pending = _pending(golden_session())
        doc_store.save_session(pending)
        assert doc_store.load_session(pending.session_id) == pending

    def test_export_includes_alignment_and_tier(self):
        doc = json.loads(export_json(golden_session()))
        variant = doc["variants"][0]
        assert variant["similarity"]["tier"] == "semantic"
        assert variant["alignments"][0] == {
            "simplified_index": 0,
            "original_index": 0,
            "score": 0.9,
            "base_similarity": 0.9,
        }


class TestCsvExport:
    def test_matches_golden_file_byte_for_byte(self):
        produced = export_csv(golden_session(), GOLDEN_CRITERIA)
        with open(GOLDEN_CSV, encoding="utf-8") as fh:
            assert produced == fh.read()

    def test_header_schema(self):
        header = csv_header(GOLDEN_CRITERIA)
        assert header[:7] == [
            "session_id",
            "prompt_id",
            "prompt_label",
            "model_id",
            "model_label",
            "status",
            "similarity_tier",
        ]
        assert header[-2:] == ["criterion_fluency", "criterion_meaning"]
        assert len(header) == 20 + len(GOLDEN_CRITERIA)

    def test_row_count_rule(self):
        session = golden_session()
        text = export_csv(session, GOLDEN_CRITERIA)
        lines = text.split("\n")
        assert lines[-1] == ""
        expected_rows = sum(max(len(v.sentences), 1) for v in session.variants)
        assert len(lines) - 2 == expected_rows  # minus header and trailing newline

    def test_failed_variant_gets_one_sparse_row(self):
        rows = export_csv(golden_session(), GOLDEN_CRITERIA).splitlines()
        failed = [r for r in rows if ",failed," in r]
        assert len(failed) == 1
        cells = failed[0].split(",")
        assert cells[5] == "failed"
        assert all(c == "" for c in cells[6:])

    def test_quoting_of_embedded_commas_and_quotes(self):
        text = export_csv(golden_session(), GOLDEN_CRITERIA)
        assert '"She said ""stop, now""."' in text

    def test_csv_refused_while_pending(self):
        with pytest.raises(SessionPending):
            export_csv(_pending(golden_session()), GOLDEN_CRITERIA)


class TestSettings:
    def test_defaults_when_missing(self, doc_store):
        settings = doc_store.load_settings()
        assert len(settings.prompts) == 5
        assert settings.models == []
        assert settings.criteria == []
        assert settings.default_lambda == 0.5

    def test_save_then_load_round_trip(self, doc_store):
        settings = dataclasses.replace(
            default_settings(),
            models=[model.ModelSpec(model_id="m", label="M")],
            criteria=list(GOLDEN_CRITERIA),
            default_lambda=1.25,
        )
        doc_store.save_settings(settings)
        assert doc_store.load_settings() == settings
