// UI state: everything rendered comes from server responses held here.
// The client never edits history records or re-tokenizes text itself.

import type {
  FeedbackMap,
  JobState,
  JobSummary,
  Recommendation,
  RecommendKind,
  UserInfo,
} from "./api.js";

export type EditMode = "auxiliary" | "direct";

export interface UiState {
  user: UserInfo | null;
  jobs: JobSummary[];
  jobsError: string | null;
  job: JobState | null;
  mode: EditMode;
  selectedToken: number | null;
  recommendKind: RecommendKind;
  recommendations: Recommendation[];
  recommendError: string | null;
  feedback: FeedbackMap;
  banner: string | null;
  busy: boolean;
  dragIndex: number | null;
}

export function initialState(): UiState {
  return {
    user: null,
    jobs: [],
    jobsError: null,
    job: null,
    mode: "auxiliary",
    selectedToken: null,
    recommendKind: "similarity",
    recommendations: [],
    recommendError: null,
    feedback: {},
    banner: null,
    busy: false,
    dragIndex: null,
  };
}

export function feedbackFromJob(job: JobState): FeedbackMap {
  const last = job.revisions[job.revisions.length - 1];
  return last ? { ...last.feedback } : {};
}

/** Replace the selected job's state with a fresh server payload. */
export function applyJobState(state: UiState, job: JobState): void {
  state.job = job;
  state.feedback = feedbackFromJob(job);
  state.selectedToken = null;
  state.recommendations = [];
  state.recommendError = null;
  state.dragIndex = null;
}

/**
 * Background shade for one salience score: hue encodes the sign (warm =
 * pushes the posterior toward the target label, cool = away), opacity
 * encodes magnitude. Purely presentational.
 */
export function salienceShade(score: number): string {
  const alpha = Math.min(1, Math.abs(score) * 4);
  if (alpha < 0.02) return "transparent";
  const rgb = score > 0 ? "214,86,70" : "74,108,212";
  return `rgba(${rgb},${alpha.toFixed(3)})`;
}

/** Raw display form of one feedback value; no rounding or normalization. */
export function formatScore(value: number | null): string {
  return value === null ? "n/a" : String(value);
}
