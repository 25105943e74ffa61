// DOM construction. Everything is rebuilt from the SessionView on each
// render; user-held state that must survive a rebuild (annotation drafts,
// lambda slider position, toggles) lives in the view, not in the DOM.

import { formatBadge, formatDuration, formatLambda, formatMetric, formatPercentage } from "./format.js";
import { cellKey, SessionView, type UnitRef } from "./state.js";
import type { CriterionDefinition, VariantDoc } from "./types.js";

export interface RenderHandlers {
  onTogglePrompt(promptId: string): void;
  onToggleModel(modelId: string): void;
  onToggleBadges(): void;
  onLambdaInput(value: number): void;
  onLambdaSave(): void;
  onHover(unit: UnitRef | null): void;
  onPin(unit: UnitRef): void;
  onAnnotate(promptId: string, modelId: string): void;
  exportUrl(format: "json" | "csv"): string;
}

export function validateScore(criterion: CriterionDefinition, raw: string): number | null {
  if (raw.trim() === "") return null;
  const value = Number(raw);
  if (!Number.isFinite(value)) return null;
  if (value < criterion.scale_min || value > criterion.scale_max) return null;
  return value;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function variantLabel(view: SessionView, variant: VariantDoc): string {
  const prompt = view.payload.session.prompts.find((p) => p.prompt_id === variant.prompt_id);
  const model = view.payload.session.models.find((m) => m.model_id === variant.model_id);
  return `${prompt?.label ?? variant.prompt_id} x ${model?.label ?? variant.model_id}`;
}

// -- header ------------------------------------------------------------

function renderHeader(view: SessionView, handlers: RenderHandlers): HTMLElement {
  const header = el("header", "toolbar");

  const toggles = el("div", "toggles");
  for (const prompt of view.payload.session.prompts) {
    const chip = el("button", "chip", prompt.label);
    chip.dataset["togglePrompt"] = prompt.prompt_id;
    chip.classList.toggle("off", !view.activePrompts.has(prompt.prompt_id));
    chip.addEventListener("click", () => handlers.onTogglePrompt(prompt.prompt_id));
    toggles.appendChild(chip);
  }
  for (const model of view.payload.session.models) {
    const chip = el("button", "chip model-chip", model.label);
    chip.dataset["toggleModel"] = model.model_id;
    chip.classList.toggle("off", !view.activeModels.has(model.model_id));
    chip.addEventListener("click", () => handlers.onToggleModel(model.model_id));
    toggles.appendChild(chip);
  }
  header.appendChild(toggles);

  const lambdaBox = el("div", "lambda-box");
  const slider = el("input") as HTMLInputElement;
  slider.type = "range";
  slider.min = "0";
  slider.max = "2";
  slider.step = "0.01";
  slider.value = String(view.lambdaUi);
  slider.id = "lambda-slider";
  slider.addEventListener("input", () =>
    handlers.onLambdaInput(Number.parseFloat(slider.value)),
  );
  const readout = el("span", "lambda-readout", formatLambda(view.lambdaUi));
  readout.id = "lambda-readout";
  const save = el("button", "save-lambda", "save λ");
  save.id = "save-lambda";
  save.disabled = !view.lambdaDirty();
  save.addEventListener("click", () => handlers.onLambdaSave());
  lambdaBox.append(el("label", undefined, "linearity bias"), slider, readout, save);
  header.appendChild(lambdaBox);

  const actions = el("div", "actions");
  const badgeToggle = el("button", "chip", view.badgesVisible ? "badges on" : "badges off");
  badgeToggle.id = "badge-toggle";
  badgeToggle.addEventListener("click", () => handlers.onToggleBadges());
  const exportJson = el("a", "export", "export JSON") as HTMLAnchorElement;
  exportJson.href = handlers.exportUrl("json");
  exportJson.setAttribute("download", "");
  const exportCsv = el("a", "export", "export CSV") as HTMLAnchorElement;
  exportCsv.href = handlers.exportUrl("csv");
  exportCsv.setAttribute("download", "");
  actions.append(badgeToggle, exportJson, exportCsv);
  header.appendChild(actions);

  return header;
}

// -- comparison matrix -------------------------------------------------

function sentenceSpan(
  text: string,
  unit: UnitRef,
  highlighted: boolean,
  handlers: RenderHandlers,
): HTMLElement {
  const span = el("span", "sentence", text);
  if (highlighted) span.classList.add("highlight");
  span.addEventListener("mouseenter", () => handlers.onHover(unit));
  span.addEventListener("mouseleave", () => handlers.onHover(null));
  span.addEventListener("click", () => handlers.onPin(unit));
  return span;
}

function renderMatrix(view: SessionView, handlers: RenderHandlers): HTMLElement {
  const matrix = el("section", "matrix");
  const visible = view.visibleVariants();
  if (visible.length === 0) {
    const empty = el("div", "empty-state", "All columns are hidden. Re-enable a prompt and a model above.");
    matrix.appendChild(empty);
    return matrix;
  }

  const marks = view.highlights();

  const sourceCol = el("div", "column source-column");
  sourceCol.appendChild(el("h3", undefined, "Original"));
  for (const record of view.payload.session.source_sentences) {
    sourceCol.appendChild(
      sentenceSpan(
        record.text,
        { kind: "source", sentence: record.index },
        marks.source.has(record.index),
        handlers,
      ),
    );
  }
  matrix.appendChild(sourceCol);

  for (const variant of visible) {
    const key = cellKey(variant.prompt_id, variant.model_id);
    const column = el("div", "column variant-column");
    column.dataset["cell"] = key;
    column.appendChild(el("h3", undefined, variantLabel(view, variant)));

    if (variant.status === "failed") {
      column.appendChild(el("div", "failure", variant.failure_reason ?? "generation failed"));
      matrix.appendChild(column);
      continue;
    }

    const cellMarks = marks.variants.get(key) ?? new Set<number>();
    const links = view.linksFor(variant.prompt_id, variant.model_id);
    for (const record of variant.sentences) {
      const wrap = el("span", "sentence-wrap");
      wrap.appendChild(
        sentenceSpan(
          record.text,
          { kind: "variant", cell: key, sentence: record.index },
          cellMarks.has(record.index),
          handlers,
        ),
      );
      if (view.badgesVisible) {
        const link = links.find((l) => l.simplified_index === record.index);
        if (link) {
          wrap.appendChild(el("sup", "badge", formatBadge(link.base_similarity)));
        }
      }
      column.appendChild(wrap);
    }
    matrix.appendChild(column);
  }
  return matrix;
}

// -- statistics --------------------------------------------------------

function renderStatistics(view: SessionView): HTMLElement {
  const section = el("section", "statistics");
  section.appendChild(el("h2", undefined, "Statistics"));
  const table = el("table");
  const head = el("tr");
  for (const title of ["variant", "tier", "fk grade", "reading ease", "compression", "words", "sentences", "time"]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);

  const sourceRow = el("tr", "source-row");
  const sm = view.payload.session.source_metrics;
  for (const cellText of [
    "original",
    "-",
    formatMetric(sm.fk_grade),
    formatMetric(sm.fre),
    "-",
    String(sm.word_count),
    String(sm.sentence_count),
    "-",
  ]) {
    sourceRow.appendChild(el("td", undefined, cellText));
  }
  table.appendChild(sourceRow);

  for (const variant of view.visibleVariants()) {
    const row = el("tr");
    row.dataset["cell"] = cellKey(variant.prompt_id, variant.model_id);
    const m = variant.metrics;
    for (const cellText of [
      variantLabel(view, variant),
      variant.similarity?.tier ?? "-",
      formatMetric(m?.fk_grade ?? null),
      formatMetric(m?.fre ?? null),
      formatMetric(m?.compression_ratio ?? null),
      m ? String(m.word_count) : "-",
      m ? String(m.sentence_count) : "-",
      formatDuration(variant.duration_ms),
    ]) {
      row.appendChild(el("td", undefined, cellText));
    }
    table.appendChild(row);
  }
  section.appendChild(table);
  return section;
}

// -- annotation panels -------------------------------------------------

function renderAnnotations(
  view: SessionView,
  criteria: CriterionDefinition[],
  handlers: RenderHandlers,
): HTMLElement {
  const section = el("section", "annotations");
  section.appendChild(el("h2", undefined, "Annotation"));
  if (criteria.length === 0) {
    section.appendChild(el("p", "note", "No criteria configured in settings."));
    return section;
  }

  for (const variant of view.visibleVariants()) {
    const key = cellKey(variant.prompt_id, variant.model_id);
    const panel = el("div", "panel");
    panel.dataset["cell"] = key;

    const title = el("h3", undefined, variantLabel(view, variant));
    const percentage = el(
      "span",
      "percentage",
      formatPercentage(view.percentageFor(variant.prompt_id, variant.model_id)),
    );
    title.appendChild(percentage);
    panel.appendChild(title);

    if (variant.status !== "succeeded") {
      panel.appendChild(el("p", "note", "failed variants cannot be scored"));
      section.appendChild(panel);
      continue;
    }

    for (const criterion of criteria) {
      const row = el("div", "score-row");
      const label = el("label", undefined, `${criterion.name} (${criterion.scale_min}-${criterion.scale_max})`);
      const input = el("input") as HTMLInputElement;
      input.type = "number";
      input.min = String(criterion.scale_min);
      input.max = String(criterion.scale_max);
      input.step = "any";
      input.dataset["criterion"] = criterion.criterion_id;
      const draftKey = `${key}::${criterion.criterion_id}`;
      const saved = view.scoreFor(variant.prompt_id, variant.model_id, criterion.criterion_id);
      input.value = view.drafts.get(draftKey) ?? (saved === null ? "" : String(saved));
      input.addEventListener("input", () => {
        view.drafts.set(draftKey, input.value);
        input.classList.toggle(
          "invalid",
          input.value.trim() !== "" && validateScore(criterion, input.value) === null,
        );
      });
      row.append(label, input);
      panel.appendChild(row);
    }

    const submit = el("button", "submit-scores", "save scores");
    submit.addEventListener("click", () =>
      handlers.onAnnotate(variant.prompt_id, variant.model_id),
    );
    panel.appendChild(submit);
    section.appendChild(panel);
  }
  return section;
}

// -- entry point -------------------------------------------------------

export function renderApp(
  root: HTMLElement,
  view: SessionView,
  criteria: CriterionDefinition[],
  handlers: RenderHandlers,
): void {
  root.replaceChildren(
    renderHeader(view, handlers),
    renderMatrix(view, handlers),
    renderStatistics(view),
    renderAnnotations(view, criteria, handlers),
  );
}
