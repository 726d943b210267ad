import { describe, expect, it } from 'vitest';

import { mulberry32, normals } from '../src/rng';

describe('mulberry32', () => {
  it('is deterministic per seed', () => {
    const a = mulberry32(42);
    const b = mulberry32(42);
    for (let i = 0; i < 100; i++) expect(a()).toBe(b());
  });

  it('differs across seeds', () => {
    expect(mulberry32(1)()).not.toBe(mulberry32(2)());
  });

  it('stays in [0, 1)', () => {
    const rng = mulberry32(7);
    for (let i = 0; i < 10_000; i++) {
      const v = rng();
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(1);
    }
  });
});

describe('normals', () => {
  it('has roughly zero mean and requested scale', () => {
    const xs = normals(mulberry32(5), 50_000, 2);
    let sum = 0;
    let sq = 0;
    for (const x of xs) {
      sum += x;
      sq += x * x;
    }
    expect(Math.abs(sum / xs.length)).toBeLessThan(0.05);
    expect(Math.sqrt(sq / xs.length)).toBeCloseTo(2, 1);
  });
});
