"""End-to-end walkthrough against built-in mock providers. No network.

Runs a 2x2 prompt-model grid over a small source text, prints the alignment
for each variant at two bias settings, annotates one variant, and writes the
JSON and CSV exports next to the chosen data directory. Useful as a smoke
test and as executable documentation of the library API.

    python3 scripts/demo_session.py --data-dir /tmp/simpgrid-demo
"""

import argparse
import asyncio
import json

import httpx

from simpgrid.alignment import DeterministicMockProvider
from simpgrid.annotations import session_percentages, upsert_score
from simpgrid.api import realign_session
from simpgrid.config import AppConfig, ChatConfig
from simpgrid.model import CriterionDefinition, ModelSpec, PromptSpec, new_session
from simpgrid.orchestrator import run_matrix
from simpgrid.store import DocumentStore, export_csv, export_json

SOURCE = (
    "The municipal committee deliberated for several hours before reaching a verdict. "
    "Citizens had gathered outside the hall since early morning. "
    "The final decision surprised almost everyone present."
)

CANNED = {
    ("model-a", "Rewrite for a young reader."): (
        "The town committee talked for hours. Then they decided. "
        "People had waited outside since morning. The choice surprised them."
    ),
    ("model-a", "Keep only the key facts."): (
        "The committee deliberated for hours. The decision surprised everyone."
    ),
    ("model-b", "Rewrite for a young reader."): (
        "A town group met for a long time. Many people waited outside. "
        "Their answer was a surprise."
    ),
    ("model-b", "Keep only the key facts."): (
        "Committee deliberated; verdict surprised those present."
    ),
}


class CannedChat(httpx.AsyncBaseTransport):
    async def handle_async_request(self, request):
        body = json.loads(request.content)
        text = CANNED[(body["model"], body["messages"][0]["content"])]
        payload = {"choices": [{"message": {"role": "assistant", "content": text}}]}
        return httpx.Response(200, json=payload)


def show(session):
    originals = {r.index: r.text for r in session.source_sentences}
    for variant in session.variants:
        print(f"\n  [{variant.prompt_id} x {variant.model_id}] "
              f"{variant.status.value}, tier={variant.similarity.tier.value}, "
              f"fre={variant.metrics.fre:.1f}")
        for record in variant.sentences:
            link = next(l for l in variant.alignments if l.simplified_index == record.index)
            print(f"    {record.text!r}")
            print(f"      <- {originals[link.original_index]!r}  "
                  f"(score {link.score:.3f}, base {link.base_similarity:.3f})")


def main() -> None:
    parser = argparse.ArgumentParser(description="mock-provider demo run")
    parser.add_argument("--data-dir", default="demo-data")
    args = parser.parse_args()

    config = AppConfig(data_dir=args.data_dir, chat=ChatConfig(base_url="http://mock/v1"))
    prompts = [
        PromptSpec(prompt_id="young", label="Young reader", body="Rewrite for a young reader."),
        PromptSpec(prompt_id="facts", label="Key facts", body="Keep only the key facts."),
    ]
    models = [ModelSpec(model_id="model-a", label="Mock A"),
              ModelSpec(model_id="model-b", label="Mock B")]
    criteria = [
        CriterionDefinition(criterion_id="fluency", name="Fluency",
                            scale_min=1, scale_max=5, weight=2.0),
        CriterionDefinition(criterion_id="meaning", name="Meaning preservation",
                            scale_min=1, scale_max=2, weight=1.0),
    ]

    session = new_session(SOURCE, prompts, models, 0.5)
    print(f"session {session.session_id}: source fre={session.source_metrics.fre:.1f}, "
          f"{session.source_metrics.word_count} words")

    session = asyncio.run(
        run_matrix(config, session, DeterministicMockProvider(), transport=CannedChat())
    )
    print("\nalignment at bias 0.5:")
    show(session)

    session = realign_session(session, 2.0)
    print("\nalignment at bias 2.0 (strong linearity preference):")
    show(session)

    session = upsert_score(session, criteria, "young", "model-a", "fluency", 4)
    session = upsert_score(session, criteria, "young", "model-a", "meaning", 2)
    print("\noverall percentages:")
    for row in session_percentages(session, criteria):
        value = "unscored" if row["value"] is None else f"{row['value']:.2f}%"
        print(f"  {row['prompt_id']} x {row['model_id']}: {value}")

    store = DocumentStore(args.data_dir)
    store.save_session(session)
    json_path = f"{args.data_dir}/session-{session.session_id}.json"
    csv_path = f"{args.data_dir}/session-{session.session_id}.csv"
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(export_json(session))
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(export_csv(session, criteria))
    print(f"\nwrote {json_path}\nwrote {csv_path}")


if __name__ == "__main__":
    main()
