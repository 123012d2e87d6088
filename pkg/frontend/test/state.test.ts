/** ViewState transitions: zoom bounds and purity. */

import { describe, expect, it } from 'vitest';

import {
  ZOOM_MAX,
  ZOOM_MIN,
  initialViewState,
  withActiveHypothesis,
  withFilter,
  withZoom,
} from '../src/state.js';

describe('zoom bounds', () => {
  it('clamps below the minimum', () => {
    expect(withZoom(initialViewState(), 0.01).zoom).toBe(ZOOM_MIN);
  });

  it('clamps above the maximum', () => {
    expect(withZoom(initialViewState(), 100).zoom).toBe(ZOOM_MAX);
  });

  it('passes values inside the bounds through', () => {
    expect(withZoom(initialViewState(), 2.5).zoom).toBe(2.5);
  });
});

describe('transitions are pure', () => {
  it('never mutates the input state', () => {
    const state = initialViewState();
    const frozen = JSON.stringify(state);
    withZoom(state, 4);
    withFilter(state, 'thin');
    withActiveHypothesis(state, 'h1');
    expect(JSON.stringify(state)).toBe(frozen);
  });
});
