import { describe, expect, it } from 'vitest';

import { COOLEST, HOTTEST, bucketIndex, probabilityColor } from '../src/colors.js';

describe('probabilityColor', () => {
  it('maps the scale endpoints to the coolest and hottest buckets', () => {
    expect(probabilityColor(0)).toBe(COOLEST);
    expect(probabilityColor(1)).toBe(HOTTEST);
  });

  it('is monotone in probability', () => {
    let previous = -1;
    for (let p = 0; p <= 1.0001; p += 0.05) {
      const index = bucketIndex(Math.min(p, 1));
      expect(index).toBeGreaterThanOrEqual(previous);
      previous = index;
    }
  });

  it('clamps out-of-range values', () => {
    expect(probabilityColor(-0.5)).toBe(COOLEST);
    expect(probabilityColor(1.5)).toBe(HOTTEST);
  });
});
