// View model for a loaded session. Holds everything the DOM layer reads:
// which columns are visible, the client-authoritative lambda, recomputed
// links per variant, annotation drafts, and the hover/pin highlight unit.
// Pure TypeScript, no DOM, so the behavioral tests run headless.

import { recomputeAlignment } from "./alignment.js";
import type {
  AlignmentLink,
  OverallPercentage,
  SessionPayload,
  VariantDoc,
} from "./types.js";

export type UnitRef =
  | { kind: "source"; sentence: number }
  | { kind: "variant"; cell: string; sentence: number };

export interface Highlights {
  source: Set<number>;
  /** cell key -> set of simplified sentence indices */
  variants: Map<string, Set<number>>;
}

export const cellKey = (promptId: string, modelId: string): string =>
  `${promptId}::${modelId}`;

export class SessionView {
  readonly payload: SessionPayload;
  readonly activePrompts: Set<string>;
  readonly activeModels: Set<string>;
  lambdaUi: number;
  badgesVisible = true;
  hovered: UnitRef | null = null;
  pinned: UnitRef | null = null;
  /** Unsubmitted annotation input values, keyed cell::criterion. Kept here so
      hiding and re-showing a column never loses what the reviewer typed. */
  readonly drafts = new Map<string, string>();

  private links = new Map<string, AlignmentLink[]>();
  private percentages = new Map<string, number | null>();

  constructor(payload: SessionPayload) {
    this.payload = payload;
    this.activePrompts = new Set(payload.session.prompts.map((p) => p.prompt_id));
    this.activeModels = new Set(payload.session.models.map((m) => m.model_id));
    this.lambdaUi = payload.session.lambda;
    for (const variant of payload.session.variants) {
      this.links.set(cellKey(variant.prompt_id, variant.model_id), variant.alignments);
    }
    this.applyPercentages(payload.overall_percentages);
  }

  // -- columns ---------------------------------------------------------

  visibleVariants(): VariantDoc[] {
    return this.payload.session.variants.filter(
      (v) => this.activePrompts.has(v.prompt_id) && this.activeModels.has(v.model_id),
    );
  }

  togglePrompt(promptId: string): void {
    if (!this.payload.session.prompts.some((p) => p.prompt_id === promptId)) return;
    if (!this.activePrompts.delete(promptId)) this.activePrompts.add(promptId);
    this.dropHiddenUnits();
  }

  toggleModel(modelId: string): void {
    if (!this.payload.session.models.some((m) => m.model_id === modelId)) return;
    if (!this.activeModels.delete(modelId)) this.activeModels.add(modelId);
    this.dropHiddenUnits();
  }

  private cellVisible(key: string): boolean {
    return this.visibleVariants().some((v) => cellKey(v.prompt_id, v.model_id) === key);
  }

  /** A unit inside a column that just got hidden must not keep a highlight. */
  private dropHiddenUnits(): void {
    for (const ref of ["hovered", "pinned"] as const) {
      const unit = this[ref];
      if (unit && unit.kind === "variant" && !this.cellVisible(unit.cell)) {
        this[ref] = null;
      }
    }
  }

  // -- lambda ----------------------------------------------------------

  /** Slider movement: recompute every succeeded variant's links locally. */
  setLambdaUi(value: number): void {
    if (!Number.isFinite(value) || value < 0 || value > 2) {
      throw new Error(`lambda must be within [0, 2], got ${value}`);
    }
    this.lambdaUi = value;
    const origRel = this.payload.session.source_sentences.map((s) => s.rel_pos);
    for (const variant of this.payload.session.variants) {
      if (variant.status !== "succeeded" || variant.similarity === null) continue;
      const simpRel = variant.sentences.map((s) => s.rel_pos);
      this.links.set(
        cellKey(variant.prompt_id, variant.model_id),
        recomputeAlignment(variant.similarity.values, origRel, simpRel, value),
      );
    }
  }

  linksFor(promptId: string, modelId: string): AlignmentLink[] {
    return this.links.get(cellKey(promptId, modelId)) ?? [];
  }

  /** True when the slider has moved away from the server's stored value. */
  lambdaDirty(): boolean {
    return this.lambdaUi !== this.payload.session.lambda;
  }

  // -- annotations -----------------------------------------------------

  applyPercentages(rows: OverallPercentage[]): void {
    for (const row of rows) {
      this.percentages.set(cellKey(row.prompt_id, row.model_id), row.value);
    }
  }

  percentageFor(promptId: string, modelId: string): number | null {
    return this.percentages.get(cellKey(promptId, modelId)) ?? null;
  }

  scoreFor(promptId: string, modelId: string, criterionId: string): number | null {
    const found = this.payload.session.annotations.find(
      (a) =>
        a.prompt_id === promptId &&
        a.model_id === modelId &&
        a.criterion_id === criterionId,
    );
    return found ? found.raw_score : null;
  }

  // -- highlighting ----------------------------------------------------

  hover(unit: UnitRef | null): void {
    this.hovered = unit;
  }

  /** Click pins the unit; clicking the pinned unit again releases it. */
  pin(unit: UnitRef): void {
    this.pinned = this.pinned && sameUnit(this.pinned, unit) ? null : unit;
  }

  /** The pinned unit wins over transient hover. */
  activeUnit(): UnitRef | null {
    return this.pinned ?? this.hovered;
  }

  highlights(): Highlights {
    const result: Highlights = { source: new Set(), variants: new Map() };
    const unit = this.activeUnit();
    if (unit === null) return result;

    let originalIndex: number | null = null;
    if (unit.kind === "source") {
      originalIndex = unit.sentence;
    } else {
      if (!this.cellVisible(unit.cell)) return result;
      const link = (this.links.get(unit.cell) ?? []).find(
        (l) => l.simplified_index === unit.sentence,
      );
      if (!link) return result;
      originalIndex = link.original_index;
    }

    result.source.add(originalIndex);
    for (const variant of this.visibleVariants()) {
      const key = cellKey(variant.prompt_id, variant.model_id);
      const linked = new Set<number>();
      for (const link of this.links.get(key) ?? []) {
        if (link.original_index === originalIndex) linked.add(link.simplified_index);
      }
      if (linked.size > 0) result.variants.set(key, linked);
    }
    return result;
  }
}

function sameUnit(a: UnitRef, b: UnitRef): boolean {
  if (a.kind === "source" && b.kind === "source") return a.sentence === b.sentence;
  if (a.kind === "variant" && b.kind === "variant") {
    return a.cell === b.cell && a.sentence === b.sentence;
  }
  return false;
}
