/**
 * View state and its pure transitions.
 *
 * Two invariants are enforced here rather than in the rendering code:
 * displayed labels always equal the server's accepted set for the
 * displayed version (labels only change through `applySession` /
 * `applyAcceptedLabels`, both fed by server responses), and label
 * consistency statuses come only from server fit outcomes
 * (`applyFit`); they are never computed client-side.
 */

import type {
  Algorithm,
  FitPayload,
  LabelPayload,
  LabelOutcomePayload,
} from "./api.js";

export interface LabelView extends LabelPayload {
  /** Server-reported status from the newest fit, null when unknown. */
  status: string | null;
}

export interface ViewState {
  sessionId: string | null;
  values: number[];
  labels: LabelView[];
  version: number;
  sliderIndex: number;
  overlays: Record<Algorithm, boolean>;
  fits: Record<Algorithm, FitPayload | null>;
  banner: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    values: [],
    labels: [],
    version: -1,
    sliderIndex: 12, // 10^1, a mid-grid default
    overlays: { lopart: true, opart: false },
    fits: { lopart: null, opart: null },
    banner: null,
  };
}

function withUnknownStatus(labels: readonly LabelPayload[]): LabelView[] {
  return labels.map((label) => ({ ...label, status: null }));
}

export function applySession(
  state: ViewState,
  sessionId: string,
  values: number[],
  labels: LabelPayload[],
  version: number,
): ViewState {
  return {
    ...state,
    sessionId,
    values,
    labels: withUnknownStatus(labels),
    version,
    fits: { lopart: null, opart: null },
    banner: null,
  };
}

/** Record a label set the server just accepted (PUT returned `version`). */
export function applyAcceptedLabels(
  state: ViewState,
  labels: LabelPayload[],
  version: number,
): ViewState {
  return {
    ...state,
    labels: withUnknownStatus(labels),
    version,
    banner: null,
  };
}

/** The server rejected a label change; keep the accepted set, surface why. */
export function applyRejection(state: ViewState, message: string): ViewState {
  return { ...state, banner: message };
}

/**
 * Record a completed fit.  Fits carry the session version they were
 * computed against; anything older than the displayed version is
 * dropped so statuses never mix label generations.
 */
export function applyFit(state: ViewState, fit: FitPayload): ViewState {
  if (fit.version !== state.version) {
    return state;
  }
  const byIndex = new Map<number, LabelOutcomePayload>(
    fit.label_outcomes.map((outcome) => [outcome.label_index, outcome]),
  );
  return {
    ...state,
    fits: { ...state.fits, [fit.algorithm]: fit },
    labels: state.labels.map((label, index) => ({
      ...label,
      status: byIndex.get(index)?.status ?? label.status,
    })),
    banner: null,
  };
}

/** A fit request failed; what is on screen no longer matches the controls. */
export function applyFitFailure(state: ViewState, message: string): ViewState {
  return { ...state, banner: `stale fit: ${message}` };
}

export function setSlider(state: ViewState, index: number): ViewState {
  return { ...state, sliderIndex: index };
}

export function setOverlay(
  state: ViewState,
  algorithm: Algorithm,
  enabled: boolean,
): ViewState {
  return { ...state, overlays: { ...state.overlays, [algorithm]: enabled } };
}

export function acceptedLabelPayloads(state: ViewState): LabelPayload[] {
  return state.labels.map(({ start, end, changes }) => ({ start, end, changes }));
}
