/** Hypothesis panel: name editor, hypothesis switcher, attached reports
 * whose hover highlights their concepts in the embedding, and the two
 * validation sections with percentage bars mirroring /summary.
 *
 * Every displayed number is the corresponding API field; nothing is
 * recounted client-side. */

import type { HypothesisInfo, Report, ValiditySummary } from './types.js';

export interface PercentBar {
  /** Raw fraction from the summary, or null when nothing is labeled yet. */
  fraction: number | null;
  /** Display label, e.g. "75%". */
  label: string;
  positive: number;
  negative: number;
  unlabeled: number;
}

export interface AttachedReportRow {
  report: Report;
  /** Concept ids to highlight in the embedding while hovered. */
  relatedConceptIds: string[];
}

export interface HypothesisPanel {
  kind: 'panel';
  hypothesisId: string;
  name: string;
  /** For the switch-or-create dropdown, in creation order. */
  switcher: { id: string; name: string }[];
  attachedReports: AttachedReportRow[];
  additionalBar: PercentBar;
  modifiedBar: PercentBar;
}

export interface EmptyPanel {
  kind: 'empty';
  message: string;
  switcher: { id: string; name: string }[];
}

export function percentBar(
  fraction: number | null,
  positive: number,
  negative: number,
  unlabeled: number,
): PercentBar {
  return {
    fraction,
    label: fraction === null ? 'no labeled evidence yet' : `${Math.round(fraction * 100)}%`,
    positive,
    negative,
    unlabeled,
  };
}

export function buildHypothesisPanel(
  active: HypothesisInfo | null,
  all: HypothesisInfo[],
  summary: ValiditySummary | null,
  attachedReports: Report[],
  relatedConceptsByReport: Record<string, string[]>,
): HypothesisPanel | EmptyPanel {
  const switcher = all.map((h) => ({ id: h.id, name: h.name }));
  if (active === null || summary === null) {
    return {
      kind: 'empty',
      message: 'Create a hypothesis to start collecting evidence.',
      switcher,
    };
  }
  return {
    kind: 'panel',
    hypothesisId: active.id,
    name: active.name,
    switcher,
    attachedReports: attachedReports.map((report) => ({
      report,
      relatedConceptIds: relatedConceptsByReport[report.id] ?? [],
    })),
    additionalBar: percentBar(
      summary.additional_accuracy,
      summary.additional_counts.correct,
      summary.additional_counts.incorrect,
      summary.additional_counts.unlabeled,
    ),
    modifiedBar: percentBar(
      summary.modified_expected_rate,
      summary.modified_counts.as_expected,
      summary.modified_counts.not_as_expected,
      summary.modified_counts.unlabeled,
    ),
  };
}
