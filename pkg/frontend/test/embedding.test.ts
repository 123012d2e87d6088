/** Embedding view: semantic-zoom formula, reserved corner, filter
 * emphasis, empty states, and fixture-layout geometry. */

import { describe, expect, it } from 'vitest';

import {
  DEFAULT_ZOOM_CONFIG,
  PREVIEW_CORNER,
  avoidPreviewCorner,
  effectiveFont,
  effectiveOpacity,
  renderEmbedding,
} from '../src/embedding.js';
import { initialViewState, withFilter, withHighlight, withZoom } from '../src/state.js';
import type { Concept, ConceptsResponse, LayoutResponse } from '../src/types.js';

import layoutFixture from './fixtures/layout.json';
import conceptsFixture from './fixtures/concepts.json';

const layout = layoutFixture as LayoutResponse;
const concepts = (conceptsFixture as ConceptsResponse).concepts;
const conceptsById = new Map<string, Concept>(concepts.map((c) => [c.id, c]));
const viewport = { width: 1200, height: 800 };

describe('semantic zoom formula', () => {
  it.each([1, 2, 4])('font scales by z^0.5 at z=%d', (z) => {
    expect(effectiveFont(10, z)).toBeCloseTo(10 * Math.pow(z, 0.5), 12);
  });

  it.each([1, 2, 4])('opacity scales by z^0.3 capped at 1 at z=%d', (z) => {
    expect(effectiveOpacity(0.4, z)).toBeCloseTo(Math.min(1, 0.4 * Math.pow(z, 0.3)), 12);
  });

  it('identity at z=1: marks carry the server encoding exactly', () => {
    const view = renderEmbedding(layout, conceptsById, initialViewState(), viewport);
    if (view.kind !== 'marks') throw new Error('expected marks');
    const byId = new Map(view.marks.map((m) => [m.conceptId, m]));
    for (const point of layout.points) {
      const mark = byId.get(point.concept_id)!;
      expect(mark.fontSize).toBe(point.font_scale);
      expect(mark.opacity).toBe(point.opacity);
    }
  });

  it('doubling zoom multiplies every font by 2^0.5', () => {
    const base = renderEmbedding(layout, conceptsById, initialViewState(), viewport);
    const zoomed = renderEmbedding(layout, conceptsById, withZoom(initialViewState(), 2), viewport);
    if (base.kind !== 'marks' || zoomed.kind !== 'marks') throw new Error('expected marks');
    for (let i = 0; i < base.marks.length; i++) {
      expect(zoomed.marks[i].fontSize).toBeCloseTo(base.marks[i].fontSize * Math.SQRT2, 10);
    }
  });

  it('opacity never exceeds 1 at high zoom', () => {
    const view = renderEmbedding(layout, conceptsById, withZoom(initialViewState(), 8), viewport);
    if (view.kind !== 'marks') throw new Error('expected marks');
    for (const mark of view.marks) expect(mark.opacity).toBeLessThanOrEqual(1);
  });
});

describe('reserved instance-preview corner', () => {
  it('pushes positions out of the corner', () => {
    const moved = avoidPreviewCorner(40, 50);
    expect(moved.x >= PREVIEW_CORNER.width || moved.y >= PREVIEW_CORNER.height).toBe(true);
  });

  it('leaves outside positions untouched', () => {
    expect(avoidPreviewCorner(500, 50)).toEqual({ x: 500, y: 50 });
    expect(avoidPreviewCorner(40, 700)).toEqual({ x: 40, y: 700 });
  });

  it('no rendered mark overlaps the corner at any zoom', () => {
    for (const z of [0.5, 1, 2, 4]) {
      const view = renderEmbedding(layout, conceptsById, withZoom(initialViewState(), z), viewport);
      if (view.kind !== 'marks') throw new Error('expected marks');
      for (const mark of view.marks) {
        const inside = mark.x < PREVIEW_CORNER.width && mark.y < PREVIEW_CORNER.height;
        expect(inside).toBe(false);
      }
    }
  });
});

describe('empty and filtered states', () => {
  it('unavailable layout shows the ingest hint', () => {
    const empty: LayoutResponse = { version: 0, status: 'unavailable', points: [] };
    const view = renderEmbedding(empty, conceptsById, initialViewState(), viewport);
    expect(view.kind).toBe('empty');
    if (view.kind === 'empty') expect(view.message).toMatch(/ingest/i);
  });

  it('filter emphasizes matches and dims the rest', () => {
    const view = renderEmbedding(layout, conceptsById, withFilter(initialViewState(), 'thin'), viewport);
    if (view.kind !== 'marks') throw new Error('expected marks');
    const emphasized = view.marks.filter((m) => m.emphasized);
    expect(emphasized.length).toBeGreaterThan(0);
    for (const mark of view.marks) {
      expect(mark.emphasized).toBe(mark.phrase.toLowerCase().includes('thin'));
      expect(mark.dimmed).toBe(!mark.emphasized);
    }
  });

  it('explicit highlight set wins over the filter', () => {
    const target = concepts.find((c) => c.phrase === 'glasses')!;
    const state = withHighlight(withFilter(initialViewState(), 'thin'), [target.id]);
    const view = renderEmbedding(layout, conceptsById, state, viewport);
    if (view.kind !== 'marks') throw new Error('expected marks');
    for (const mark of view.marks) {
      expect(mark.emphasized).toBe(mark.conceptId === target.id);
    }
  });
});

describe('fixture layout geometry', () => {
  it('renders one mark per layout point, deterministically', () => {
    const a = renderEmbedding(layout, conceptsById, initialViewState(), viewport);
    const b = renderEmbedding(layout, conceptsById, initialViewState(), viewport);
    expect(a).toEqual(b);
    if (a.kind !== 'marks') throw new Error('expected marks');
    expect(a.marks.length).toBe(layout.points.length);
  });

  it('glasses, frames, and lenses render near one another', () => {
    const byPhrase = new Map(concepts.map((c) => [c.phrase, c.id]));
    const points = new Map(layout.points.map((p) => [p.concept_id, p]));
    const trio = ['glasses', 'frames', 'lenses'].map((phrase) => {
      const point = points.get(byPhrase.get(phrase)!)!;
      return [point.x, point.y] as const;
    });
    const dist = (a: readonly [number, number], b: readonly [number, number]) =>
      Math.hypot(a[0] - b[0], a[1] - b[1]);

    const all = layout.points.map((p) => [p.x, p.y] as const);
    let total = 0;
    let pairs = 0;
    for (let i = 0; i < all.length; i++) {
      for (let j = i + 1; j < all.length; j++) {
        total += dist(all[i], all[j]);
        pairs += 1;
      }
    }
    const meanPairwise = total / pairs;
    expect(dist(trio[0], trio[1])).toBeLessThan(0.5 * meanPairwise);
    expect(dist(trio[0], trio[2])).toBeLessThan(0.5 * meanPairwise);
    expect(dist(trio[1], trio[2])).toBeLessThan(0.5 * meanPairwise);
  });
});

describe('zoom configuration', () => {
  it('default exponents are 0.5 and 0.3', () => {
    expect(DEFAULT_ZOOM_CONFIG.fontExponent).toBe(0.5);
    expect(DEFAULT_ZOOM_CONFIG.opacityExponent).toBe(0.3);
  });

  it('custom exponents are honored', () => {
    expect(effectiveFont(10, 4, { fontExponent: 1, opacityExponent: 0.3 })).toBe(40);
  });
});
