#!/usr/bin/env python3
"""Regenerate fixtures/alignment_parity.json.

The fixture file carries (matrix, rel_pos lists, lambda) inputs together with
the links the server computes for them. Both test suites consume it: the
Python suite re-derives every expectation with an independent brute-force
oracle, and the browser client must reproduce the links bit-for-bit from the
same inputs. Regenerate only when the alignment contract itself changes, and
re-run both suites afterwards.

The adversarial family encodes decoy sentences that are semantically strong
but positionally distant, so raising the bias must reduce crossing counts;
each family member appears at several bias values.
"""

import json
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from simpgrid.alignment import align  # noqa: E402
from simpgrid.model import SimilarityMatrix, SimilarityTier, rel_position  # noqa: E402

OUT_PATH = os.path.join(os.path.dirname(__file__), "..", "fixtures", "alignment_parity.json")

LAMBDAS = [0.0, 0.5, 1.0, 2.0]

# family, name, matrix (rows = original), n_orig, n_simp
ADVERSARIAL = [
    # end-of-document decoy for the first simplified sentence: raising the
    # bias flips its link from the distant strong match to the near one
    (
        "canonical-decoy",
        [[0.55, 0.10], [0.20, 0.30], [0.80, 0.85]],
    ),
    # both simplified sentences match the opposite ends of the source
    (
        "swap",
        [[0.3, 0.9], [0.9, 0.3]],
    ),
    # decoys on both flanks of a 4-sentence source
    (
        "double-flank",
        [
            [0.5, 0.7, 0.1, 0.8],
            [0.1, 0.55, 0.2, 0.1],
            [0.1, 0.2, 0.55, 0.1],
            [0.75, 0.1, 0.3, 0.6],
        ],
    ),
    # full reversal: strongest matches run anti-diagonal
    (
        "reversal",
        [[0.6, 0.2, 0.9], [0.1, 0.7, 0.1], [0.9, 0.1, 0.6]],
    ),
    # long source, two decoys pulling outward
    (
        "long-outward",
        [
            [0.5, 0.1, 0.1, 0.8],
            [0.3, 0.6, 0.1, 0.1],
            [0.1, 0.4, 0.2, 0.1],
            [0.1, 0.1, 0.55, 0.2],
            [0.1, 0.1, 0.3, 0.3],
            [0.85, 0.2, 0.1, 0.6],
        ],
    ),
    # flat ties everywhere: positional tie-break must settle every column
    (
        "flat-ties",
        [[0.5, 0.5], [0.5, 0.5]],
    ),
]

HAND = [
    ("argmax-2x2", [[0.9, -0.4], [-0.4, 0.9]]),
    ("zero-matrix-3x2", [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]),
    ("single-cell", [[0.25]]),
]


def positions(n):
    return [rel_position(i, n) for i in range(n)]


def entry(family, fixture, matrix, lam):
    n_orig = len(matrix)
    n_simp = len(matrix[0])
    orig_pos = positions(n_orig)
    simp_pos = positions(n_simp)
    links = align(
        SimilarityMatrix(tier=SimilarityTier.SEMANTIC, values=matrix),
        orig_pos,
        simp_pos,
        lam,
    )
    return {
        "name": f"{fixture}@{lam}",
        "family": family,
        "fixture": fixture,
        "matrix": matrix,
        "orig_rel_pos": orig_pos,
        "simp_rel_pos": simp_pos,
        "lambda": lam,
        "expected_links": [
            {
                "simplified_index": l.simplified_index,
                "original_index": l.original_index,
                "score": l.score,
                "base_similarity": l.base_similarity,
            }
            for l in links
        ],
    }


def main():
    entries = []
    for fixture, matrix in ADVERSARIAL:
        for lam in LAMBDAS:
            entries.append(entry("adversarial", fixture, matrix, lam))
    for fixture, matrix in HAND:
        for lam in LAMBDAS:
            entries.append(entry("hand", fixture, matrix, lam))

    rng = random.Random(0x5EED)
    for k in range(8):
        n_orig = rng.randint(1, 8)
        n_simp = rng.randint(1, 8)
        matrix = [
            [rng.uniform(-1.0, 1.0) for _ in range(n_simp)] for _ in range(n_orig)
        ]
        for lam in LAMBDAS:
            entries.append(entry("random", f"random-{k}", matrix, lam))

    doc = {
        "description": (
            "Shared alignment test vectors: links recomputed from (matrix, "
            "rel_pos, lambda) must match expected_links exactly (indices) "
            "and to 1e-9 (scores) in every consumer."
        ),
        "entries": entries,
    }
    os.makedirs(os.path.dirname(OUT_PATH), exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=1)
        fh.write("\n")
    print(f"wrote {len(entries)} entries to {os.path.normpath(OUT_PATH)}")


if __name__ == "__main__":
    main()
