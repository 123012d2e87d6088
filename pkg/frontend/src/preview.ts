/** Hover preview box for a concept: a few example instances, the report
 * count, and short excerpts. Counts come straight from the API concept. */

import type { Concept, Report } from './types.js';

export const PREVIEW_THUMBNAIL_CAP = 3;
export const PREVIEW_EXCERPT_CAP = 3;
export const EXCERPT_MAX_CHARS = 120;

export interface PreviewThumbnail {
  instanceId: string;
  url: string;
}

export interface PreviewBox {
  conceptId: string;
  phrase: string;
  mentionCount: number;
  reportCount: number;
  thumbnails: PreviewThumbnail[];
  excerpts: string[];
  emptyMessage: string | null;
}

export interface InstanceOverlay {
  instanceId: string;
  url: string;
  modelOutput: string;
}

export function instanceUrl(instanceId: string): string {
  return `/api/instances/${instanceId}`;
}

function excerpt(text: string): string {
  return text.length <= EXCERPT_MAX_CHARS ? text : text.slice(0, EXCERPT_MAX_CHARS - 1) + '…';
}

export function buildHoverPreview(concept: Concept, relatedReports: Report[]): PreviewBox {
  const reportCount = concept.report_ids.length;
  const seen = new Set<string>();
  const thumbnails: PreviewThumbnail[] = [];
  for (const report of relatedReports) {
    if (seen.has(report.instance_ref)) continue;
    seen.add(report.instance_ref);
    thumbnails.push({ instanceId: report.instance_ref, url: instanceUrl(report.instance_ref) });
    if (thumbnails.length === PREVIEW_THUMBNAIL_CAP) break;
  }
  return {
    conceptId: concept.id,
    phrase: concept.phrase,
    mentionCount: concept.mention_count,
    reportCount,
    thumbnails,
    excerpts: relatedReports.slice(0, PREVIEW_EXCERPT_CAP).map((r) => excerpt(r.text)),
    emptyMessage: reportCount === 0 ? 'no matching reports' : null,
  };
}

/** Hovering any instance shows it in full with the model's prediction. */
export function buildInstanceOverlay(report: Report): InstanceOverlay {
  return {
    instanceId: report.instance_ref,
    url: instanceUrl(report.instance_ref),
    modelOutput: report.model_output,
  };
}
