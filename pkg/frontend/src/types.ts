// Wire types for the evaluation server's REST payloads. Field names match
// the JSON documents byte for byte; nothing here is renamed or camel-cased.

export type SimilarityTier = "semantic" | "lexical" | "positional";
export type VariantStatus = "pending" | "succeeded" | "failed";

export interface SentenceRecord {
  index: number;
  text: string;
  rel_pos: number;
  word_count: number;
  syllable_count: number;
}

export interface SimilarityMatrixDoc {
  tier: SimilarityTier;
  rows: number;
  cols: number;
  values: number[][];
}

export interface AlignmentLink {
  simplified_index: number;
  original_index: number;
  score: number;
  base_similarity: number;
}

export interface ReadabilityReport {
  word_count: number;
  sentence_count: number;
  avg_sentence_length: number;
  syllable_count: number;
  fk_grade: number;
  fre: number;
  compression_ratio?: number;
}

export interface VariantDoc {
  prompt_id: string;
  model_id: string;
  status: VariantStatus;
  generated_text: string;
  failure_reason: string | null;
  sentences: SentenceRecord[];
  similarity: SimilarityMatrixDoc | null;
  alignments: AlignmentLink[];
  metrics: ReadabilityReport | null;
  duration_ms: number;
}

export interface PromptSpec {
  prompt_id: string;
  label: string;
  body: string;
}

export interface ModelSpec {
  model_id: string;
  label: string;
}

export interface CriterionDefinition {
  criterion_id: string;
  name: string;
  scale_min: number;
  scale_max: number;
  weight: number;
}

export interface AnnotationDoc {
  prompt_id: string;
  model_id: string;
  criterion_id: string;
  raw_score: number;
}

export interface SessionDoc {
  session_id: string;
  created_at: string;
  source_text: string;
  source_sentences: SentenceRecord[];
  source_metrics: ReadabilityReport;
  prompts: PromptSpec[];
  models: ModelSpec[];
  lambda: number;
  variants: VariantDoc[];
  annotations: AnnotationDoc[];
}

export interface OverallPercentage {
  prompt_id: string;
  model_id: string;
  value: number | null;
}

export interface SessionPayload {
  session: SessionDoc;
  overall_percentages: OverallPercentage[];
}

export interface SessionSummary {
  session_id: string;
  created_at: string;
  source_preview: string;
}

export interface SettingsDoc {
  prompts: PromptSpec[];
  models: ModelSpec[];
  criteria: CriterionDefinition[];
  default_lambda: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field_path?: string;
}
