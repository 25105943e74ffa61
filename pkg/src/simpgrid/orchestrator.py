"""Concurrent generation and analysis of the prompt x model grid.

All variant cells launch together under one bounded semaphore and are awaited
with a single gather, so total wall time tracks the slowest cell rather than
the sum. A failing cell is isolated: it produces a Failed variant record and
never disturbs its siblings. Aggregation into the session happens only after
every cell has settled.
"""

from __future__ import annotations

import asyncio
import time
from dataclasses import dataclass, replace

import httpx

from . import alignment, textstats
from .config import AppConfig
from .model import (
    EvaluationSession,
    ModelSpec,
    PromptSpec,
    SimplificationVariant,
    VariantStatus,
)


class GenerationError(Exception):
    """Chat completion failed after exhausting retries."""


@dataclass(frozen=True)
class GenerationResult:
    text: str
    duration_ms: float
    attempts: int


def _retryable_status(status_code: int) -> bool:
    return status_code >= 500


async def generate(
    config: AppConfig,
    prompt: PromptSpec,
    model_spec: ModelSpec,
    source_text: str,
    transport: httpx.AsyncBaseTransport | None = None,
) -> GenerationResult:
    """One chat completion: the prompt body is the system message, the source
    text the user message.

    Timeouts, transport failures, and 5xx responses are retried up to
    config.chat.max_retries extra attempts with a fixed backoff; 4xx responses
    and malformed bodies fail immediately.
    """
    chat = config.chat
    url = chat.base_url.rstrip("/") + "/chat/completions"
    headers = {}
    if chat.api_key:
        headers["Authorization"] = f"Bearer {chat.api_key}"
    body = {
        "model": model_spec.model_id,
        "messages": [
            {"role": "system", "content": prompt.body},
            {"role": "user", "content": source_text},
        ],
        "temperature": chat.temperature,
        "max_tokens": chat.max_tokens,
    }

    started = time.perf_counter()
    attempts = 0
    last_error = "no attempt made"
    async with httpx.AsyncClient(
        transport=transport, timeout=chat.timeout_ms / 1000.0
    ) as client:
        while attempts <= chat.max_retries:
            attempts += 1
            try:
                resp = await client.post(url, json=body, headers=headers)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last_error = f"transport error: {exc}"
            else:
                if resp.status_code == 200:
                    try:
                        text = resp.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError, ValueError) as exc:
                        raise GenerationError(f"malformed completion response: {exc}") from exc
                    duration_ms = (time.perf_counter() - started) * 1000.0
                    return GenerationResult(text=text, duration_ms=duration_ms, attempts=attempts)
                last_error = f"provider returned {resp.status_code}"
                if not _retryable_status(resp.status_code):
                    raise GenerationError(last_error)
            if attempts <= chat.max_retries:
                await asyncio.sleep(chat.retry_backoff_ms / 1000.0)
    raise GenerationError(f"{last_error} (after {attempts} attempts)")


def analyze_variant(
    session: EvaluationSession,
    prompt_id: str,
    model_id: str,
    generated_text: str,
    embedder,
    duration_ms: float = 0.0,
) -> SimplificationVariant:
    """Segment the generated text, build the similarity matrix through the
    cascade, align at the session's current bias, and compute readability.

    Synchronous and CPU-bound; the orchestrator pushes it onto a worker
    thread.
    """
    sentences = textstats.segment(generated_text)
    if not sentences:
        raise ValueError("generation produced no sentences")
    matrix = alignment.build_similarity(embedder, session.source_sentences, sentences)
    orig_pos = [r.rel_pos for r in session.source_sentences]
    simp_pos = [r.rel_pos for r in sentences]
    links = alignment.align(matrix, orig_pos, simp_pos, session.linearity_bias)
    metrics = textstats.readability(
        [textstats.tokenize(r) for r in sentences],
        source_word_count=session.source_metrics.word_count,
    )
    return SimplificationVariant(
        prompt_id=prompt_id,
        model_id=model_id,
        status=VariantStatus.SUCCEEDED,
        generated_text=generated_text,
        sentences=sentences,
        similarity=matrix,
        alignments=links,
        metrics=metrics,
        duration_ms=int(round(duration_ms)),
    )


def failed_variant(prompt_id: str, model_id: str, message: str) -> SimplificationVariant:
    return SimplificationVariant(
        prompt_id=prompt_id,
        model_id=model_id,
        status=VariantStatus.FAILED,
        failure_reason=message,
    )


async def _run_cell(
    semaphore: asyncio.Semaphore,
    config: AppConfig,
    session: EvaluationSession,
    prompt: PromptSpec,
    model_spec: ModelSpec,
    embedder,
    transport: httpx.AsyncBaseTransport | None,
) -> SimplificationVariant:
    async with semaphore:
        try:
            result = await generate(config, prompt, model_spec, session.source_text, transport)
            if not result.text.strip():
                return failed_variant(
                    prompt.prompt_id, model_spec.model_id, "empty generation"
                )
            return await asyncio.to_thread(
                analyze_variant,
                session,
                prompt.prompt_id,
                model_spec.model_id,
                result.text,
                embedder,
                result.duration_ms,
            )
        except GenerationError as exc:
            return failed_variant(prompt.prompt_id, model_spec.model_id, str(exc))
        except Exception as exc:
            return failed_variant(
                prompt.prompt_id, model_spec.model_id, f"analysis failed: {exc}"
            )


async def run_matrix(
    config: AppConfig,
    session: EvaluationSession,
    embedder,
    transport: httpx.AsyncBaseTransport | None = None,
) -> EvaluationSession:
    """Fill every pending variant of the session concurrently.

    Returns a copy of the session with variants in grid order; the list
    always keeps its full P x M shape regardless of failures.
    """
    semaphore = asyncio.Semaphore(config.max_concurrency)
    tasks = [
        _run_cell(semaphore, config, session, prompt, model_spec, embedder, transport)
        for prompt in session.prompts
        for model_spec in session.models
    ]
    variants = await asyncio.gather(*tasks)
    return replace(session, variants=list(variants))
