// The annotator page: a job list, an auxiliary edit panel with clickable
// tokens, recommendations and feedback, and the revision history with
// click-to-rollback. All state changes flow through server responses; on a
// 409 conflict the UI resynchronizes from the state the server sends back.

import { ApiClient, ApiError } from "./api.js";
import type { JobState, OpRecord, OpResponse, RecommendKind } from "./api.js";
import {
  applyJobState,
  feedbackFromJob,
  formatScore,
  initialState,
  salienceShade,
} from "./state.js";
import type { UiState } from "./state.js";

export interface AppConfig {
  baseUrl: string;
  token: string;
}

export interface App {
  state: UiState;
  ready: Promise<void>;
  loadJobs(): Promise<void>;
  selectJob(jobId: string): Promise<void>;
}

export function createApp(root: HTMLElement, config: AppConfig): App {
  const api = new ApiClient(config.baseUrl, config.token);
  const state = initialState();

  function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string> = {},
    text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
      if (key === "class") node.className = value;
      else node.setAttribute(key, value);
    }
    if (text !== undefined) node.textContent = text;
    return node;
  }

  // -- server interaction ----------------------------------------------------

  async function loadJobs(): Promise<void> {
    try {
      if (!state.user) state.user = await api.whoami();
      state.jobs = await api.listJobs(state.user.id);
      state.jobsError = null;
    } catch (err) {
      state.jobsError = err instanceof Error ? err.message : String(err);
    }
    render();
  }

  async function selectJob(jobId: string): Promise<void> {
    try {
      applyJobState(state, await api.getJob(jobId));
      state.banner = null;
    } catch (err) {
      state.banner = err instanceof Error ? err.message : String(err);
    }
    render();
  }

  /** Run one mutation; at most one is in flight, and 409 resynchronizes. */
  async function mutate(action: () => Promise<OpResponse>): Promise<void> {
    if (state.busy || !state.job) return;
    state.busy = true;
    render();
    try {
      const response = await action();
      applyJobState(state, response);
      // displayed feedback is the op response's map, verbatim
      state.feedback = { ...response.feedback };
      state.banner = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409 && err.current) {
        applyJobState(state, err.current);
        state.banner = "This job changed elsewhere; reloaded the latest state.";
      } else {
        state.banner = err instanceof Error ? err.message : String(err);
      }
    } finally {
      state.busy = false;
      render();
    }
  }

  function postOp(op: OpRecord): Promise<void> {
    const job = state.job as JobState;
    return mutate(() => api.postOp(job.id, op, job.parent_revision_index));
  }

  async function openPalette(position: number): Promise<void> {
    state.selectedToken = position;
    state.recommendations = [];
    state.recommendError = null;
    render();
    await fetchRecommendations();
  }

  async function fetchRecommendations(): Promise<void> {
    const job = state.job;
    if (!job || state.selectedToken === null) return;
    try {
      state.recommendations = await api.recommend(
        job.id,
        state.selectedToken,
        state.recommendKind,
      );
      state.recommendError = null;
    } catch (err) {
      state.recommendations = [];
      state.recommendError = err instanceof Error ? err.message : String(err);
    }
    render();
  }

  // -- rendering ---------------------------------------------------------------

  function render(): void {
    root.textContent = "";
    root.append(renderJobList(), renderEditPanel(), renderHistory());
  }

  function renderJobList(): HTMLElement {
    const aside = el("aside", { id: "job-list" });
    aside.append(el("h2", {}, "Jobs"));
    if (state.jobsError) {
      const error = el("p", { class: "error" }, `Could not load jobs: ${state.jobsError} `);
      const retry = el("button", { class: "retry" }, "Retry");
      retry.addEventListener("click", () => void loadJobs());
      error.append(retry);
      aside.append(error);
      return aside;
    }
    if (state.jobs.length === 0) {
      aside.append(el("p", { class: "empty" }, "No jobs assigned yet."));
      return aside;
    }
    const list = el("ul");
    for (const job of state.jobs) {
      const item = el(
        "li",
        {
          class: `job ${job.status === "complete" ? "complete" : "incomplete"}` +
            (state.job?.id === job.id ? " selected" : ""),
          "data-job-id": job.id,
          "data-status": job.status,
        },
        job.original_text,
      );
      item.addEventListener("click", () => void selectJob(job.id));
      list.append(item);
    }
    aside.append(list);
    return aside;
  }

  function renderEditPanel(): HTMLElement {
    const main = el("main", { id: "edit-panel" });
    if (state.banner) {
      main.append(el("div", { id: "banner", class: "banner" }, state.banner));
    }
    const job = state.job;
    if (!job) {
      main.append(el("p", { class: "empty" }, "Select a job to start rewriting."));
      return main;
    }

    main.append(renderFeedback());

    const modes = el("div", { id: "mode-switch" });
    for (const mode of ["auxiliary", "direct"] as const) {
      const button = el(
        "button",
        {
          "data-mode": mode,
          class: state.mode === mode ? "active" : "",
        },
        mode === "auxiliary" ? "Auxiliary" : "Direct typing",
      );
      button.addEventListener("click", () => {
        state.mode = mode;
        render();
      });
      modes.append(button);
    }
    main.append(modes);

    if (state.mode === "auxiliary") {
      main.append(renderTokens(job), ...renderPalette(job));
    } else {
      main.append(renderDirectMode(job));
    }
    return main;
  }

  function renderFeedback(): HTMLElement {
    const box = el("div", { id: "feedback" });
    box.append(el("h3", {}, "Feedback"));
    const entries = Object.entries(state.feedback);
    if (entries.length === 0) {
      box.append(el("span", { class: "score none" }, "no scores yet"));
    }
    for (const [name, value] of entries) {
      box.append(
        el(
          "span",
          { class: "score", "data-provider": name, "data-value": formatScore(value) },
          `${name}: ${formatScore(value)}`,
        ),
      );
    }
    return box;
  }

  function renderTokens(job: JobState): HTMLElement {
    const container = el("div", { id: "tokens" });
    if (job.current_tokens.length === 0) {
      container.append(el("p", { class: "empty" }, "The sentence is empty."));
    }
    for (const token of job.current_tokens) {
      const chip = el(
        "span",
        {
          class:
            "token" + (state.selectedToken === token.index ? " selected" : ""),
          "data-index": String(token.index),
          draggable: "true",
        },
        token.text,
      );
      const score = job.salience?.scores[token.index];
      if (score !== undefined) {
        chip.style.backgroundColor = salienceShade(score);
        chip.title = `salience ${score}`;
      }
      chip.addEventListener("click", () => void openPalette(token.index));
      chip.addEventListener("dragstart", () => {
        state.dragIndex = token.index;
      });
      chip.addEventListener("dragover", (event) => event.preventDefault());
      chip.addEventListener("drop", (event) => {
        event.preventDefault();
        const from = state.dragIndex;
        state.dragIndex = null;
        if (from !== null && from !== token.index) {
          void postOp({
            kind: "reorder",
            from_position: from,
            to_position: token.index,
            source: "typed",
          });
        }
      });
      container.append(chip);
    }
    return container;
  }

  function renderPalette(job: JobState): HTMLElement[] {
    if (state.selectedToken === null) return [];
    const position = state.selectedToken;
    const word = job.current_tokens[position]?.text ?? "";
    const palette = el("div", { id: "palette", "data-position": String(position) });
    palette.append(el("h3", {}, `"${word}" (token ${position})`));

    const typing = el("div", { class: "palette-typing" });
    const input = el("input", { id: "palette-word", placeholder: "type a word" });
    const replaceBtn = el("button", { id: "palette-replace" }, "Replace");
    const insertBtn = el("button", { id: "palette-insert" }, "Insert before");
    const deleteBtn = el("button", { id: "palette-delete" }, "Delete");
    if (state.busy) {
      replaceBtn.setAttribute("disabled", "");
      insertBtn.setAttribute("disabled", "");
      deleteBtn.setAttribute("disabled", "");
    }
    replaceBtn.addEventListener("click", () => {
      if (input.value.trim()) {
        void postOp({
          kind: "substitute",
          position,
          token: input.value.trim(),
          source: "typed",
        });
      }
    });
    insertBtn.addEventListener("click", () => {
      if (input.value.trim()) {
        void postOp({
          kind: "insert",
          position,
          token: input.value.trim(),
          source: "typed",
        });
      }
    });
    deleteBtn.addEventListener("click", () => {
      void postOp({ kind: "delete", position, source: "typed" });
    });
    typing.append(input, replaceBtn, insertBtn, deleteBtn);
    palette.append(typing);
    palette.append(
      el("p", { class: "hint" }, "Drag a token onto another to reorder."),
    );

    const recs = el("div", { id: "recommendations" });
    const toggle = el("div", { class: "rec-toggle" });
    for (const kind of ["similarity", "lm"] as const) {
      const button = el(
        "button",
        {
          "data-kind": kind,
          class: state.recommendKind === kind ? "active" : "",
        },
        kind === "similarity" ? "Similar words" : "Language model",
      );
      button.addEventListener("click", () => {
        state.recommendKind = kind as RecommendKind;
        void fetchRecommendations();
      });
      toggle.append(button);
    }
    recs.append(toggle);
    if (state.recommendError) {
      recs.append(el("p", { class: "error" }, state.recommendError));
    } else if (state.recommendations.length === 0) {
      recs.append(el("p", { class: "empty" }, "no suggestions"));
    } else {
      const list = el("ul", { class: "rec-list" });
      for (const rec of state.recommendations) {
        const item = el("li");
        const pick = el(
          "button",
          { class: "rec", "data-word": rec.word, "data-score": String(rec.score) },
          rec.word,
        );
        if (state.busy) pick.setAttribute("disabled", "");
        pick.addEventListener("click", () => {
          void postOp({
            kind: "substitute",
            position,
            token: rec.word,
            source:
              state.recommendKind === "lm"
                ? "lm_recommended"
                : "similarity_recommended",
          });
        });
        item.append(pick);
        list.append(item);
      }
      recs.append(list);
    }
    palette.append(recs);
    return [palette];
  }

  function renderDirectMode(job: JobState): HTMLElement {
    const panel = el("div", { id: "direct-panel" });
    const input = el("textarea", { id: "direct-input" });
    input.value = job.current_text; // prefilled; equals the original before any edit
    const submit = el("button", { id: "direct-submit" }, "Submit rewrite");
    if (state.busy) submit.setAttribute("disabled", "");
    submit.addEventListener("click", () => {
      void postOp({ kind: "replace_sentence", text: input.value, source: "typed" });
    });
    panel.append(input, submit);
    return panel;
  }

  function renderHistory(): HTMLElement {
    const section = el("section", { id: "history" });
    section.append(el("h2", {}, "History"));
    const job = state.job;
    if (!job || job.revisions.length === 0) {
      section.append(el("p", { class: "empty" }, "No revisions yet."));
      return section;
    }
    const list = el("ol", { class: "records" });
    const lastIndex = job.parent_revision_index;
    for (const revision of job.revisions) {
      const isLatest = revision.index === lastIndex;
      const record = el(
        "li",
        {
          class: "record" + (isLatest ? " latest" : ""),
          "data-index": String(revision.index),
        },
      );
      record.append(
        el("span", { class: "record-op" }, revision.op.kind),
        el("span", { class: "record-text" }, revision.result_text),
      );
      if (!isLatest && !state.busy) {
        // clicking an earlier record rolls the sentence back to it
        record.addEventListener("click", () => {
          void mutate(() =>
            api.postRevert(job.id, revision.index, job.parent_revision_index),
          );
        });
      }
      list.append(record);
    }
    section.append(list);
    return section;
  }

  const ready = loadJobs();
  return { state, ready, loadJobs, selectJob };
}
