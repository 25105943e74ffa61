import asyncio
import json
import re

import httpx
import pytest

from simpgrid.alignment import DeterministicMockProvider
from simpgrid.config import AppConfig, ChatConfig
from simpgrid.model import ModelSpec, PromptSpec

ACCEPTANCE_LABELS = {
    1: "penalized-argmax vs brute-force oracle",
    2: "lambda-zero identity",
    3: "adversarial crossing reduction",
    4: "similarity cascade totality",
    5: "concurrency wall-time bound",
    6: "readability formulas and syllables",
    7: "weighted annotation aggregation",
    8: "persistence round-trip and export",
    9: "API contract",
}


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not match:
        return
    n = int(match.group(1))
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] criterion {n} ({ACCEPTANCE_LABELS.get(n, '?')}): {status}")


class ScriptedChatTransport(httpx.AsyncBaseTransport):
    """Chat-completions stand-in driven by a per-(prompt, model) script.

    Script values are dicts with any of:
        text       completion content (default derived from the model id)
        delay_ms   sleep before responding
        status     HTTP status (list = one per successive attempt)
        exception  exception instance to raise instead of responding

    Every request is appended to .requests for spy assertions.
    """

    def __init__(self, script=None, default_text="Simplified text here."):
        self.script = script or {}
        self.default_text = default_text
        self.requests = []
        self._attempts = {}

    async def handle_async_request(self, request):
        body = json.loads(request.content)
        model = body["model"]
        system = body["messages"][0]["content"]
        key = (system, model)
        self.requests.append({"key": key, "body": body, "url": str(request.url)})
        rule = self.script.get(key) or self.script.get(model) or {}

        if rule.get("delay_ms"):
            await asyncio.sleep(rule["delay_ms"] / 1000.0)
        if rule.get("exception") is not None:
            raise rule["exception"]

        status = rule.get("status", 200)
        if isinstance(status, list):
            n = self._attempts.get(key, 0)
            self._attempts[key] = n + 1
            status = status[min(n, len(status) - 1)]
        if status != 200:
            return httpx.Response(status, json={"error": "scripted failure"})
        text = rule.get("text", self.default_text)
        return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


class FailingEmbedder:
    kind = "failing"

    def embed(self, sentences):
        raise RuntimeError("embedding backend down")


class ZeroVectorEmbedder:
    """Healthy transport, but one sentence comes back as a null vector."""

    kind = "zero_vector"

    def __init__(self, dim=8):
        self.dim = dim

    def embed(self, sentences):
        vectors = [[0.1 * (k + 1)] * self.dim for k in range(len(sentences))]
        vectors[-1] = [0.0] * self.dim
        return vectors


class SpyEmbedder:
    """Counts embed calls; used to prove a route never re-embeds."""

    kind = "spy"

    def __init__(self, inner=None):
        self.inner = inner or DeterministicMockProvider()
        self.calls = 0

    def embed(self, sentences):
        self.calls += 1
        return self.inner.embed(sentences)


@pytest.fixture
def mock_embedder():
    return DeterministicMockProvider()


@pytest.fixture
def app_config(tmp_path):
    return AppConfig(
        data_dir=str(tmp_path / "data"),
        chat=ChatConfig(base_url="http://chat.mock/v1", retry_backoff_ms=10),
    )


@pytest.fixture
def two_by_two():
    prompts = [
        PromptSpec(prompt_id="p1", label="Plain", body="Simplify the text plainly."),
        PromptSpec(prompt_id="p2", label="Short", body="Simplify the text briefly."),
    ]
    models = [
        ModelSpec(model_id="model-a", label="Model A"),
        ModelSpec(model_id="model-b", label="Model B"),
    ]
    return prompts, models


SOURCE_TEXT = (
    "The municipal committee deliberated for several hours before reaching a verdict. "
    "Citizens had gathered outside the hall since early morning. "
    "The final decision surprised almost everyone present."
)
