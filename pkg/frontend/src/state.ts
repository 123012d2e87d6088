/** Client view state. The UI is a pure function of (server responses,
 * ViewState); every transition returns a fresh state object. */

export interface ViewState {
  zoom: number;
  panX: number;
  panY: number;
  /** At most one pinned concept (drives the report drawer). */
  pinned: string | null;
  hovered: string | null;
  activeHypothesis: string | null;
  /** Embedding filter box: matching concepts highlighted, rest dimmed. */
  filter: string;
  /** Concept ids highlighted by hovering an attached report, if any. */
  highlighted: string[] | null;
}

export const ZOOM_MIN = 0.25;
export const ZOOM_MAX = 8;

export function initialViewState(): ViewState {
  return {
    zoom: 1,
    panX: 0,
    panY: 0,
    pinned: null,
    hovered: null,
    activeHypothesis: null,
    filter: '',
    highlighted: null,
  };
}

export function withZoom(state: ViewState, zoom: number): ViewState {
  return { ...state, zoom: Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, zoom)) };
}

export function withPan(state: ViewState, panX: number, panY: number): ViewState {
  return { ...state, panX, panY };
}

/** Pin a concept; pinning another concept replaces the pin, clicking the
 * pinned concept again releases it. */
export function togglePin(state: ViewState, conceptId: string): ViewState {
  return { ...state, pinned: state.pinned === conceptId ? null : conceptId };
}

export function withHover(state: ViewState, conceptId: string | null): ViewState {
  return { ...state, hovered: conceptId };
}

export function withFilter(state: ViewState, filter: string): ViewState {
  return { ...state, filter };
}

export function withActiveHypothesis(state: ViewState, hypothesisId: string | null): ViewState {
  return { ...state, activeHypothesis: hypothesisId };
}

export function withHighlight(state: ViewState, conceptIds: string[] | null): ViewState {
  return { ...state, highlighted: conceptIds };
}
