// Application bootstrap: loads settings and a session, owns the single
// SessionView instance, and funnels every user action through one place so
// re-rendering stays trivial to reason about.

import { ApiClient, ApiError, Superseded } from "./api.js";
import { renderApp, validateScore, type RenderHandlers } from "./render.js";
import { SessionView, cellKey } from "./state.js";
import type { AnnotationDoc, CriterionDefinition, SessionPayload } from "./types.js";

const api = new ApiClient();

function statusLine(text: string, isError = false): void {
  const node = document.getElementById("status");
  if (node) {
    node.textContent = text;
    node.classList.toggle("error", isError);
  }
}

export function buildHandlers(
  view: SessionView,
  criteria: CriterionDefinition[],
  rerender: () => void,
): RenderHandlers {
  return {
    onTogglePrompt(promptId) {
      view.togglePrompt(promptId);
      rerender();
    },
    onToggleModel(modelId) {
      view.toggleModel(modelId);
      rerender();
    },
    onToggleBadges() {
      view.badgesVisible = !view.badgesVisible;
      rerender();
    },
    onLambdaInput(value) {
      view.setLambdaUi(value);
      rerender();
    },
    onLambdaSave() {
      api
        .saveLambda(view.payload.session.session_id, view.lambdaUi)
        .then((payload) => {
          view.payload.session.lambda = payload.session.lambda;
          view.applyPercentages(payload.overall_percentages);
          statusLine(`saved λ = ${payload.session.lambda}`);
          rerender();
        })
        .catch((err) => {
          if (err instanceof Superseded) return;
          statusLine(err instanceof ApiError ? err.message : String(err), true);
        });
    },
    onHover(unit) {
      view.hover(unit);
      rerender();
    },
    onPin(unit) {
      view.pin(unit);
      rerender();
    },
    onAnnotate(promptId, modelId) {
      const entries: AnnotationDoc[] = [];
      for (const criterion of criteria) {
        const draft = view.drafts.get(
          `${cellKey(promptId, modelId)}::${criterion.criterion_id}`,
        );
        if (draft === undefined || draft.trim() === "") continue;
        const value = validateScore(criterion, draft);
        if (value === null) {
          statusLine(
            `score for ${criterion.name} must be within ` +
              `${criterion.scale_min}..${criterion.scale_max}`,
            true,
          );
          return;
        }
        entries.push({
          prompt_id: promptId,
          model_id: modelId,
          criterion_id: criterion.criterion_id,
          raw_score: value,
        });
      }
      if (entries.length === 0) return;
      api
        .putAnnotations(view.payload.session.session_id, entries)
        .then((payload) => {
          view.payload.session.annotations = payload.session.annotations;
          view.applyPercentages(payload.overall_percentages);
          statusLine("scores saved");
          rerender();
        })
        .catch((err) => {
          if (err instanceof Superseded) return;
          statusLine(err instanceof ApiError ? err.message : String(err), true);
        });
    },
    exportUrl(format) {
      return api.exportUrl(view.payload.session.session_id, format);
    },
  };
}

export function mountSession(
  root: HTMLElement,
  payload: SessionPayload,
  criteria: CriterionDefinition[],
): SessionView {
  const view = new SessionView(payload);
  const rerender = () => renderApp(root, view, criteria, handlers);
  const handlers = buildHandlers(view, criteria, rerender);
  rerender();
  return view;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  try {
    const settings = await api.getSettings();
    const sessionId = window.location.hash.slice(1);
    if (sessionId) {
      mountSession(root, await api.getSession(sessionId), settings.criteria);
      return;
    }
    const { sessions } = await api.listSessions();
    if (sessions.length === 0) {
      statusLine("no sessions yet; create one via POST /api/simplify");
      return;
    }
    const newest = sessions[0]!;
    window.location.hash = newest.session_id;
    mountSession(root, await api.getSession(newest.session_id), settings.criteria);
  } catch (err) {
    statusLine(err instanceof ApiError ? err.message : String(err), true);
  }
}

// boot() exits immediately unless the page provides the #app mount point,
// so importing this module in tests has no side effects
if (typeof window !== "undefined" && "document" in globalThis) {
  void boot();
}
