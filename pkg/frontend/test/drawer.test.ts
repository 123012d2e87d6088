/** Report drawer: completeness, single-pin state, and attach control
 * behavior with and without an active hypothesis. */

import { describe, expect, it } from 'vitest';

import { buildReportDrawer } from '../src/drawer.js';
import { initialViewState, togglePin } from '../src/state.js';
import type { Concept, HypothesisInfo, ReportsPage } from '../src/types.js';

import busyFixture from './fixtures/busy_concept.json';
import hypothesesFixture from './fixtures/hypotheses.json';

const busy = busyFixture as { concept: Concept; reports: ReportsPage };
const hypotheses = (hypothesesFixture as { hypotheses: HypothesisInfo[] }).hypotheses;

describe('drawer contents', () => {
  it('lists every related report', () => {
    const drawer = buildReportDrawer(busy.concept, busy.reports.items, null);
    expect(drawer.rows).toHaveLength(busy.reports.items.length);
    expect(drawer.rows.map((r) => r.reportId)).toEqual(busy.reports.items.map((r) => r.id));
  });

  it('rows carry full text, instance, and model output', () => {
    const drawer = buildReportDrawer(busy.concept, busy.reports.items, null);
    for (let i = 0; i < drawer.rows.length; i++) {
      expect(drawer.rows[i].text).toBe(busy.reports.items[i].text);
      expect(drawer.rows[i].instanceId).toBe(busy.reports.items[i].instance_ref);
      expect(drawer.rows[i].modelOutput).toBe(busy.reports.items[i].model_output);
    }
  });
});

describe('attach control', () => {
  it('disabled with a tooltip when no hypothesis is active', () => {
    const drawer = buildReportDrawer(busy.concept, busy.reports.items, null);
    for (const row of drawer.rows) {
      expect(row.canAttach).toBe(false);
      expect(row.disabledReason).toMatch(/hypothesis/i);
    }
  });

  it('attached rows are marked and repeat attach is a no-op', () => {
    const active = hypotheses[0];
    expect(active.attached_report_ids.length).toBeGreaterThan(0);
    const attachedId = active.attached_report_ids[0];
    const reports = [...busy.reports.items];
    // ensure the attached report is in the drawer's related list
    const withAttached = reports.some((r) => r.id === attachedId)
      ? reports
      : [{ ...reports[0], id: attachedId }, ...reports.slice(1)];
    const drawer = buildReportDrawer(busy.concept, withAttached, active);
    const row = drawer.rows.find((r) => r.reportId === attachedId)!;
    expect(row.attached).toBe(true);
    expect(row.canAttach).toBe(false);
    expect(row.disabledReason).toMatch(/already/i);
    const other = drawer.rows.find((r) => !r.attached)!;
    expect(other.canAttach).toBe(true);
  });
});

describe('single-pin invariant', () => {
  it('pinning a second concept unpins the first', () => {
    let state = initialViewState();
    state = togglePin(state, 'concept-a');
    expect(state.pinned).toBe('concept-a');
    state = togglePin(state, 'concept-b');
    expect(state.pinned).toBe('concept-b');
  });

  it('pinning the same concept again releases it', () => {
    let state = initialViewState();
    state = togglePin(state, 'concept-a');
    state = togglePin(state, 'concept-a');
    expect(state.pinned).toBeNull();
  });
});
