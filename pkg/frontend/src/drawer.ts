/** Report drawer: pinning a concept expands every related report with an
 * add-to-hypothesis control targeting the active hypothesis. */

import type { Concept, HypothesisInfo, Report } from './types.js';
import { instanceUrl } from './preview.js';

export interface DrawerRow {
  reportId: string;
  text: string;
  instanceId: string;
  instanceUrl: string;
  modelOutput: string;
  groundTruth: string | null;
  attached: boolean;
  /** Attach is possible only with an active hypothesis and when the report
   * is not already attached (repeat clicks are no-ops). */
  canAttach: boolean;
  disabledReason: string | null;
}

export interface ReportDrawer {
  conceptId: string;
  phrase: string;
  rows: DrawerRow[];
}

export function buildReportDrawer(
  concept: Concept,
  relatedReports: Report[],
  activeHypothesis: HypothesisInfo | null,
): ReportDrawer {
  const attachedIds = new Set(activeHypothesis?.attached_report_ids ?? []);
  const rows = relatedReports.map((report) => {
    const attached = attachedIds.has(report.id);
    let disabledReason: string | null = null;
    if (activeHypothesis === null) {
      disabledReason = 'Create or select a hypothesis first';
    } else if (attached) {
      disabledReason = 'Already attached';
    }
    return {
      reportId: report.id,
      text: report.text,
      instanceId: report.instance_ref,
      instanceUrl: instanceUrl(report.instance_ref),
      modelOutput: report.model_output,
      groundTruth: report.ground_truth,
      attached,
      canAttach: activeHypothesis !== null && !attached,
      disabledReason,
    };
  });
  return { conceptId: concept.id, phrase: concept.phrase, rows };
}
