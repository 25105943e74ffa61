// Shared payload builders for the UI tests. The grid mirrors the golden
// session used server-side: one decoy-matrix variant whose first link flips
// when the bias crosses 0.5, one single-sentence variant, one failed cell.

import type {
  CriterionDefinition,
  SessionPayload,
  SentenceRecord,
  VariantDoc,
} from "../src/types";

export const CRITERIA: CriterionDefinition[] = [
  { criterion_id: "fluency", name: "Fluency", scale_min: 1, scale_max: 5, weight: 2.0 },
  { criterion_id: "meaning", name: "Meaning", scale_min: 1, scale_max: 2, weight: 1.0 },
];

const sentence = (
  index: number,
  text: string,
  relPos: number,
  words = 2,
  syllables = 3,
): SentenceRecord => ({
  index,
  text,
  rel_pos: relPos,
  word_count: words,
  syllable_count: syllables,
});

// 3x2 decoy: at bias 0 column 0 prefers the distant original 2 (0.80 beats
// 0.55); any bias of 0.5 or more pulls it home to original 0.
export const DECOY_VALUES = [
  [0.55, 0.1],
  [0.2, 0.3],
  [0.8, 0.85],
];

export function decoyVariant(): VariantDoc {
  return {
    prompt_id: "p-a",
    model_id: "m-x",
    status: "succeeded",
    generated_text: "One. Two.",
    failure_reason: null,
    sentences: [sentence(0, "One.", 0.0), sentence(1, "Two.", 1.0)],
    similarity: { tier: "semantic", rows: 3, cols: 2, values: DECOY_VALUES },
    alignments: [
      { simplified_index: 0, original_index: 2, score: 0.8, base_similarity: 0.8 },
      { simplified_index: 1, original_index: 2, score: 0.85, base_similarity: 0.85 },
    ],
    metrics: {
      word_count: 2,
      sentence_count: 2,
      avg_sentence_length: 1.0,
      syllable_count: 2,
      fk_grade: 0.5,
      fre: 100.0,
      compression_ratio: 0.33,
    },
    duration_ms: 120,
  };
}

function secondVariant(): VariantDoc {
  return {
    prompt_id: "p-a",
    model_id: "m-y",
    status: "succeeded",
    generated_text: "All three points, briefly.",
    failure_reason: null,
    sentences: [sentence(0, "All three points, briefly.", 0.0, 4, 5)],
    similarity: { tier: "lexical", rows: 3, cols: 1, values: [[0.6], [0.4], [0.2]] },
    alignments: [
      { simplified_index: 0, original_index: 0, score: 0.6, base_similarity: 0.6 },
    ],
    metrics: {
      word_count: 4,
      sentence_count: 1,
      avg_sentence_length: 4.0,
      syllable_count: 5,
      fk_grade: 2.0,
      fre: 92.0,
      compression_ratio: 0.67,
    },
    duration_ms: 80,
  };
}

function failedVariant(): VariantDoc {
  return {
    prompt_id: "p-b",
    model_id: "m-x",
    status: "failed",
    generated_text: "",
    failure_reason: "provider returned 500 (after 2 attempts)",
    sentences: [],
    similarity: null,
    alignments: [],
    metrics: null,
    duration_ms: 0,
  };
}

function splitVariant(): VariantDoc {
  // two simplified sentences sharing original 1: the many-to-one hover case
  return {
    prompt_id: "p-b",
    model_id: "m-y",
    status: "succeeded",
    generated_text: "Half one. Half two.",
    failure_reason: null,
    sentences: [sentence(0, "Half one.", 0.0), sentence(1, "Half two.", 1.0)],
    similarity: { tier: "semantic", rows: 3, cols: 2, values: [[0.1, 0.1], [0.9, 0.8], [0.2, 0.1]] },
    alignments: [
      { simplified_index: 0, original_index: 1, score: 0.9, base_similarity: 0.9 },
      { simplified_index: 1, original_index: 1, score: 0.8, base_similarity: 0.8 },
    ],
    metrics: {
      word_count: 4,
      sentence_count: 2,
      avg_sentence_length: 2.0,
      syllable_count: 4,
      fk_grade: 1.0,
      fre: 99.0,
      compression_ratio: 0.67,
    },
    duration_ms: 60,
  };
}

export function makePayload(): SessionPayload {
  return {
    session: {
      session_id: "feedfacefeedfacefeedfacefeedface",
      created_at: "2026-08-15T09:00:00+00:00",
      source_text: "First point. Second point. Third point.",
      source_sentences: [
        sentence(0, "First point.", 0.0),
        sentence(1, "Second point.", 0.5),
        sentence(2, "Third point.", 1.0),
      ],
      source_metrics: {
        word_count: 6,
        sentence_count: 3,
        avg_sentence_length: 2.0,
        syllable_count: 7,
        fk_grade: 1.0,
        fre: 90.0,
      },
      prompts: [
        { prompt_id: "p-a", label: "Plain A", body: "Simplify plainly." },
        { prompt_id: "p-b", label: "Plain B", body: "Simplify briefly." },
      ],
      models: [
        { model_id: "m-x", label: "Model X" },
        { model_id: "m-y", label: "Model Y" },
      ],
      lambda: 0.0,
      variants: [decoyVariant(), secondVariant(), failedVariant(), splitVariant()],
      annotations: [],
    },
    overall_percentages: [
      { prompt_id: "p-a", model_id: "m-x", value: null },
      { prompt_id: "p-a", model_id: "m-y", value: null },
      { prompt_id: "p-b", model_id: "m-x", value: null },
      { prompt_id: "p-b", model_id: "m-y", value: null },
    ],
  };
}

/** The aggregation hand example: fluency 4 of 1..5 (w2), meaning 2 of 1..2
    (w1) comes to 100 * 2.5 / 3 = 83.33333333333333. */
export function annotatedPayload(): SessionPayload {
  const payload = makePayload();
  payload.session.annotations = [
    { prompt_id: "p-a", model_id: "m-x", criterion_id: "fluency", raw_score: 4.0 },
    { prompt_id: "p-a", model_id: "m-x", criterion_id: "meaning", raw_score: 2.0 },
  ];
  payload.overall_percentages = [
    { prompt_id: "p-a", model_id: "m-x", value: 83.33333333333333 },
    { prompt_id: "p-a", model_id: "m-y", value: null },
    { prompt_id: "p-b", model_id: "m-x", value: null },
    { prompt_id: "p-b", model_id: "m-y", value: null },
  ];
  return payload;
}
