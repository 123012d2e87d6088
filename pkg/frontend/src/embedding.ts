/** The concept-map view: projects layout points to screen space, applies
 * semantic zoom to text size and opacity, and keeps marks clear of the
 * reserved instance-preview corner. Pure: same inputs, same marks. */

import type { Concept, LayoutResponse } from './types.js';
import type { ViewState } from './state.js';

export interface ZoomConfig {
  /** Exponent on zoom for font growth (semantic zoom). */
  fontExponent: number;
  /** Exponent on zoom for opacity growth. */
  opacityExponent: number;
}

export const DEFAULT_ZOOM_CONFIG: ZoomConfig = { fontExponent: 0.5, opacityExponent: 0.3 };

/** Upper-left corner reserved for the full-instance preview overlay. */
export const PREVIEW_CORNER = { width: 220, height: 220 };
const CORNER_MARGIN = 8;

export interface Viewport {
  width: number;
  height: number;
}

export interface Mark {
  conceptId: string;
  phrase: string;
  x: number;
  y: number;
  fontSize: number;
  opacity: number;
  emphasized: boolean;
  dimmed: boolean;
}

export type EmbeddingView =
  | { kind: 'marks'; marks: Mark[] }
  | { kind: 'empty'; message: string };

export function effectiveFont(fontScale: number, zoom: number, config = DEFAULT_ZOOM_CONFIG): number {
  return fontScale * Math.pow(zoom, config.fontExponent);
}

export function effectiveOpacity(opacity: number, zoom: number, config = DEFAULT_ZOOM_CONFIG): number {
  return Math.min(1, opacity * Math.pow(zoom, config.opacityExponent));
}

/** Push a screen position out of the reserved corner, to whichever edge is
 * closer, when it would overlap the preview box. */
export function avoidPreviewCorner(x: number, y: number): { x: number; y: number } {
  if (x >= PREVIEW_CORNER.width + CORNER_MARGIN || y >= PREVIEW_CORNER.height + CORNER_MARGIN) {
    return { x, y };
  }
  const pushRight = PREVIEW_CORNER.width + CORNER_MARGIN - x;
  const pushDown = PREVIEW_CORNER.height + CORNER_MARGIN - y;
  return pushRight <= pushDown
    ? { x: PREVIEW_CORNER.width + CORNER_MARGIN, y }
    : { x, y: PREVIEW_CORNER.height + CORNER_MARGIN };
}

export function renderEmbedding(
  layout: LayoutResponse,
  conceptsById: Map<string, Concept>,
  view: ViewState,
  viewport: Viewport,
  config: ZoomConfig = DEFAULT_ZOOM_CONFIG,
): EmbeddingView {
  if (layout.status !== 'available' || layout.points.length === 0) {
    return {
      kind: 'empty',
      message:
        layout.status === 'building'
          ? 'Building the concept map…'
          : 'No concept map yet — ingest failure reports to build one.',
    };
  }

  const xs = layout.points.map((p) => p.x);
  const ys = layout.points.map((p) => p.y);
  const extent = Math.max(
    Math.max(...xs) - Math.min(...xs),
    Math.max(...ys) - Math.min(...ys),
    1e-9,
  );
  const centerX = (Math.max(...xs) + Math.min(...xs)) / 2;
  const centerY = (Math.max(...ys) + Math.min(...ys)) / 2;
  const baseScale = (0.9 * Math.min(viewport.width, viewport.height)) / extent;

  const filter = view.filter.trim().toLowerCase();
  const highlight = view.highlighted === null ? null : new Set(view.highlighted);

  const marks: Mark[] = [];
  for (const point of layout.points) {
    const concept = conceptsById.get(point.concept_id);
    const phrase = concept ? concept.phrase : point.concept_id;
    const sx = viewport.width / 2 + (point.x - centerX) * baseScale * view.zoom + view.panX;
    const sy = viewport.height / 2 + (point.y - centerY) * baseScale * view.zoom + view.panY;
    const { x, y } = avoidPreviewCorner(sx, sy);

    let emphasized = false;
    let dimmed = false;
    if (highlight !== null) {
      emphasized = highlight.has(point.concept_id);
      dimmed = !emphasized;
    } else if (filter !== '') {
      emphasized = phrase.toLowerCase().includes(filter);
      dimmed = !emphasized;
    }

    marks.push({
      conceptId: point.concept_id,
      phrase,
      x,
      y,
      fontSize: effectiveFont(point.font_scale, view.zoom, config),
      opacity: effectiveOpacity(point.opacity, view.zoom, config),
      emphasized,
      dimmed,
    });
  }
  return { kind: 'marks', marks };
}
