import { describe, expect, it } from 'vitest';

import { radiusFor, strokeWidthFor } from '../src/scales.js';

describe('radiusFor', () => {
  it('is strictly monotone in usage count', () => {
    for (let a = 0; a <= 30; a++) {
      for (let b = a + 1; b <= 31; b++) {
        expect(radiusFor(b)).toBeGreaterThan(radiusFor(a));
      }
    }
  });

  it('equal counts encode equal radii', () => {
    expect(radiusFor(7)).toBe(radiusFor(7));
  });

  it('rejects negative or non-finite counts', () => {
    expect(() => radiusFor(-1)).toThrow();
    expect(() => radiusFor(Number.NaN)).toThrow();
  });
});

describe('strokeWidthFor', () => {
  it('is strictly monotone in co-occurrence count', () => {
    for (let a = 1; a <= 20; a++) {
      expect(strokeWidthFor(a + 1)).toBeGreaterThan(strokeWidthFor(a));
    }
  });

  it('rejects counts below one (edges require at least one shared paper)', () => {
    expect(() => strokeWidthFor(0)).toThrow();
  });
});
