"""REST surface for the evaluation workbench.

Request bodies are validated by hand so every failure, whatever the route,
comes back in one shape: {"code", "message", "field_path"?}. Only
POST /api/simplify ever contacts the generation or embedding providers; every
other route works from stored documents, including the lambda route, which
re-runs assignment on the persisted similarity matrices.

Per-session mutations run under an in-process asyncio lock per session id, so
concurrent annotation and lambda updates serialize instead of clobbering each
other's read-modify-write cycles.
"""

from __future__ import annotations

import asyncio
import math
from dataclasses import replace

import httpx
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import alignment, annotations, model, orchestrator, store as store_mod
from .config import AppConfig
from .model import (
    EvaluationSession,
    LambdaOutOfRange,
    SettingsDocument,
    VariantStatus,
)
from .store import DocumentStore, SessionNotFound, SessionPending


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field_path: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field_path = field_path


def _bad_request(message: str, field_path: str | None = None, code: str = "validation_error") -> ApiError:
    return ApiError(400, code, message, field_path)


async def _json_body(request: Request):
    try:
        return await request.json()
    except Exception:
        raise _bad_request("request body is not valid JSON", code="bad_json")


def _require_string(body: dict, key: str, allow_empty: bool = False) -> str:
    value = body.get(key)
    if not isinstance(value, str) or (not allow_empty and not value.strip()):
        raise _bad_request(f"'{key}' must be a non-empty string", field_path=key)
    return value


def _require_id_list(body: dict, key: str) -> list[str]:
    value = body.get(key)
    if not isinstance(value, list) or not value or not all(isinstance(x, str) and x for x in value):
        raise _bad_request(f"'{key}' must be a non-empty list of ids", field_path=key)
    if len(set(value)) != len(value):
        raise _bad_request(f"'{key}' contains duplicate ids", field_path=key)
    return value


def _check_number(value, field_path: str, minimum: float | None = None, maximum: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise _bad_request(f"'{field_path}' must be a finite number", field_path=field_path)
    value = float(value)
    if minimum is not None and value < minimum:
        raise _bad_request(f"'{field_path}' must be >= {minimum}", field_path=field_path)
    if maximum is not None and value > maximum:
        raise _bad_request(f"'{field_path}' must be <= {maximum}", field_path=field_path)
    return value


def session_payload(session: EvaluationSession, settings: SettingsDocument) -> dict:
    return {
        "session": model.session_to_doc(session),
        "overall_percentages": annotations.session_percentages(session, settings.criteria),
    }


def _parse_settings(body) -> SettingsDocument:
    """Full-document settings validation; error paths name the offending entry."""
    if not isinstance(body, dict):
        raise _bad_request("settings body must be an object")
    for key in ("prompts", "models", "criteria"):
        if not isinstance(body.get(key), list):
            raise _bad_request(f"'{key}' must be a list", field_path=key)

    prompts = []
    seen = set()
    for i, item in enumerate(body["prompts"]):
        path = f"prompts[{i}]"
        if not isinstance(item, dict):
            raise _bad_request(f"'{path}' must be an object", field_path=path)
        pid = item.get("prompt_id")
        if not isinstance(pid, str) or not pid:
            raise _bad_request("prompt_id must be a non-empty string", field_path=f"{path}.prompt_id")
        if pid in seen:
            raise _bad_request(f"duplicate prompt_id '{pid}'", field_path=f"{path}.prompt_id", code="duplicate_id")
        seen.add(pid)
        label = item.get("label", "")
        if not isinstance(label, str):
            raise _bad_request("label must be a string", field_path=f"{path}.label")
        prompt_body = item.get("body")
        if not isinstance(prompt_body, str) or not prompt_body.strip():
            raise _bad_request("prompt body must be non-empty", field_path=f"{path}.body")
        prompts.append(model.PromptSpec(prompt_id=pid, label=label, body=prompt_body))

    models = []
    seen = set()
    for i, item in enumerate(body["models"]):
        path = f"models[{i}]"
        if not isinstance(item, dict):
            raise _bad_request(f"'{path}' must be an object", field_path=path)
        mid = item.get("model_id")
        if not isinstance(mid, str) or not mid.strip():
            raise _bad_request("model_id must be a non-empty string", field_path=f"{path}.model_id")
        if mid in seen:
            raise _bad_request(f"duplicate model_id '{mid}'", field_path=f"{path}.model_id", code="duplicate_id")
        seen.add(mid)
        label = item.get("label", "")
        if not isinstance(label, str):
            raise _bad_request("label must be a string", field_path=f"{path}.label")
        models.append(model.ModelSpec(model_id=mid, label=label))

    criteria = []
    seen = set()
    for i, item in enumerate(body["criteria"]):
        path = f"criteria[{i}]"
        if not isinstance(item, dict):
            raise _bad_request(f"'{path}' must be an object", field_path=path)
        cid = item.get("criterion_id")
        if not isinstance(cid, str) or not cid:
            raise _bad_request("criterion_id must be a non-empty string", field_path=f"{path}.criterion_id")
        if cid in seen:
            raise _bad_request(f"duplicate criterion_id '{cid}'", field_path=f"{path}.criterion_id", code="duplicate_id")
        seen.add(cid)
        name = item.get("name", "")
        if not isinstance(name, str):
            raise _bad_request("name must be a string", field_path=f"{path}.name")
        for bound in ("scale_min", "scale_max"):
            if isinstance(item.get(bound), bool) or not isinstance(item.get(bound), int):
                raise _bad_request(f"{bound} must be an integer", field_path=f"{path}.{bound}")
        if item["scale_max"] <= item["scale_min"]:
            raise _bad_request(
                "scale_max must exceed scale_min", field_path=f"{path}.scale_max", code="degenerate_scale"
            )
        weight = _check_number(
            item.get("weight"), f"{path}.weight", minimum=model.WEIGHT_MIN, maximum=model.WEIGHT_MAX
        )
        criteria.append(
            model.CriterionDefinition(
                criterion_id=cid,
                name=name,
                scale_min=item["scale_min"],
                scale_max=item["scale_max"],
                weight=weight,
            )
        )

    default_lambda = body.get("default_lambda", model.DEFAULT_LAMBDA)
    try:
        default_lambda = model.check_lambda(default_lambda)
    except LambdaOutOfRange as exc:
        raise _bad_request(str(exc), field_path="default_lambda", code="lambda_out_of_range")

    return SettingsDocument(
        prompts=prompts, models=models, criteria=criteria, default_lambda=default_lambda
    )


def realign_session(session: EvaluationSession, linearity_bias: float) -> EvaluationSession:
    """Recompute every succeeded variant's links from its stored matrix at a
    new bias. Pure local computation: no generation, no embedding."""
    linearity_bias = model.check_lambda(linearity_bias)
    orig_pos = [r.rel_pos for r in session.source_sentences]
    variants = []
    for variant in session.variants:
        if variant.status is VariantStatus.SUCCEEDED and variant.similarity is not None:
            simp_pos = [r.rel_pos for r in variant.sentences]
            links = alignment.align(variant.similarity, orig_pos, simp_pos, linearity_bias)
            variants.append(replace(variant, alignments=links))
        else:
            variants.append(variant)
    return replace(session, linearity_bias=linearity_bias, variants=variants)


def create_app(
    config: AppConfig | None = None,
    store: DocumentStore | None = None,
    embedder=None,
    chat_transport: httpx.AsyncBaseTransport | None = None,
) -> FastAPI:
    """Build the application; tests inject a store, a mock embedder, and a
    mock chat transport. A None embedder with no configured endpoint means
    tier 1 is skipped and similarity starts at the lexical tier."""
    config = config or AppConfig()
    store = store or DocumentStore(config.data_dir)
    if embedder is None and config.embedding.endpoint_url:
        embedder = alignment.HttpEmbeddingProvider(
            endpoint_url=config.embedding.endpoint_url,
            model=config.embedding.model,
            api_key=config.embedding.api_key,
            timeout_ms=config.embedding.timeout_ms,
        )

    app = FastAPI(title="simpgrid", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.store = store
    app.state.embedder = embedder
    app.state.chat_transport = chat_transport
    app.state.session_locks = {}

    if config.cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        body = {"code": exc.code, "message": exc.message}
        if exc.field_path is not None:
            body["field_path"] = exc.field_path
        return JSONResponse(status_code=exc.status, content=body)

    def _session_lock(session_id: str) -> asyncio.Lock:
        lock = app.state.session_locks.get(session_id)
        if lock is None:
            lock = app.state.session_locks[session_id] = asyncio.Lock()
        return lock

    def _load_session(session_id: str) -> EvaluationSession:
        try:
            return store.load_session(session_id)
        except SessionNotFound:
            raise ApiError(404, "not_found", f"unknown session '{session_id}'")

    # -- generation ---------------------------------------------------------

    @app.post("/api/simplify")
    async def simplify(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise _bad_request("request body must be an object")
        source_text = _require_string(body, "source_text")
        prompt_ids = _require_id_list(body, "prompt_ids")
        model_ids = _require_id_list(body, "model_ids")

        settings = store.load_settings()
        if "lambda" in body and body["lambda"] is not None:
            try:
                bias = model.check_lambda(body["lambda"])
            except LambdaOutOfRange as exc:
                raise _bad_request(str(exc), field_path="lambda", code="lambda_out_of_range")
        else:
            bias = settings.default_lambda

        prompts_by_id = {p.prompt_id: p for p in settings.prompts}
        models_by_id = {m.model_id: m for m in settings.models}
        for i, pid in enumerate(prompt_ids):
            if pid not in prompts_by_id:
                raise ApiError(404, "unknown_prompt", f"unknown prompt id '{pid}'", f"prompt_ids[{i}]")
        for i, mid in enumerate(model_ids):
            if mid not in models_by_id:
                raise ApiError(404, "unknown_model", f"unknown model id '{mid}'", f"model_ids[{i}]")

        if not config.chat.base_url:
            raise ApiError(502, "provider_misconfigured", "no chat completion endpoint configured")

        session = model.new_session(
            source_text=source_text,
            prompts=[prompts_by_id[pid] for pid in prompt_ids],
            models=[models_by_id[mid] for mid in model_ids],
            linearity_bias=bias,
        )
        session = await orchestrator.run_matrix(
            config, session, app.state.embedder, app.state.chat_transport
        )
        async with _session_lock(session.session_id):
            store.save_session(session)
        return session_payload(session, settings)

    # -- sessions ------------------------------------------------------------

    @app.get("/api/sessions")
    async def list_sessions():
        return {
            "sessions": [
                {
                    "session_id": s.session_id,
                    "created_at": s.created_at.isoformat(),
                    "source_preview": s.source_preview,
                }
                for s in store.list_sessions()
            ]
        }

    @app.get("/api/sessions/{session_id}")
    async def get_session(session_id: str):
        session = _load_session(session_id)
        return session_payload(session, store.load_settings())

    @app.get("/api/sessions/{session_id}/export")
    async def export_session(session_id: str, format: str | None = None):
        if format not in ("json", "csv"):
            raise _bad_request(
                "format must be 'json' or 'csv'", field_path="format", code="bad_format"
            )
        session = _load_session(session_id)
        try:
            if format == "json":
                content = store_mod.export_json(session)
                media_type = "application/json"
            else:
                content = store_mod.export_csv(session, store.load_settings().criteria)
                media_type = "text/csv; charset=utf-8"
        except SessionPending:
            raise ApiError(409, "session_pending", "session still has pending variants")
        filename = f"session-{session_id}.{format}"
        return Response(
            content=content,
            media_type=media_type,
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    # -- settings ------------------------------------------------------------

    @app.get("/api/settings")
    async def get_settings():
        return model.settings_to_doc(store.load_settings())

    @app.put("/api/settings")
    async def put_settings(request: Request):
        body = await _json_body(request)
        settings = _parse_settings(body)
        store.save_settings(settings)
        return model.settings_to_doc(settings)

    # -- annotation and lambda mutations --------------------------------------

    @app.put("/api/sessions/{session_id}/annotations")
    async def put_annotations(session_id: str, request: Request):
        body = await _json_body(request)
        if not isinstance(body, list):
            raise _bad_request("body must be a list of annotation entries")
        settings = store.load_settings()
        async with _session_lock(session_id):
            session = _load_session(session_id)
            updated = session
            for i, entry in enumerate(body):
                path = f"[{i}]"
                if not isinstance(entry, dict):
                    raise _bad_request("entry must be an object", field_path=path)
                for key in ("prompt_id", "model_id", "criterion_id"):
                    if not isinstance(entry.get(key), str) or not entry[key]:
                        raise _bad_request(
                            f"'{key}' must be a non-empty string", field_path=f"{path}.{key}"
                        )
                try:
                    updated = annotations.upsert_score(
                        updated,
                        settings.criteria,
                        entry["prompt_id"],
                        entry["model_id"],
                        entry["criterion_id"],
                        entry.get("raw_score"),
                    )
                except annotations.UnknownCriterion:
                    raise _bad_request(
                        f"unknown criterion '{entry['criterion_id']}'",
                        field_path=f"{path}.criterion_id",
                        code="unknown_criterion",
                    )
                except annotations.VariantFailedOrMissing as exc:
                    raise _bad_request(
                        f"variant {exc.args[0]} is failed or missing",
                        field_path=path,
                        code="variant_failed_or_missing",
                    )
                except annotations.OutOfScale as exc:
                    raise _bad_request(str(exc), field_path=f"{path}.raw_score", code="out_of_scale")
                except ValueError as exc:
                    raise _bad_request(str(exc), field_path=f"{path}.raw_score")
            # all entries validated; persist once, atomically
            if body:
                store.save_session(updated)
            return session_payload(updated, settings)

    @app.put("/api/sessions/{session_id}/lambda")
    async def put_lambda(session_id: str, request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or "lambda" not in body:
            raise _bad_request("body must be an object with a 'lambda' field", field_path="lambda")
        try:
            bias = model.check_lambda(body["lambda"])
        except LambdaOutOfRange as exc:
            raise _bad_request(str(exc), field_path="lambda", code="lambda_out_of_range")
        async with _session_lock(session_id):
            session = _load_session(session_id)
            updated = realign_session(session, bias)
            store.save_session(updated)
        return session_payload(updated, store.load_settings())

    if config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
