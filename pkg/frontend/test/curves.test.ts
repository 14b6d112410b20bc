import { describe, expect, it } from 'vitest';
import { readFileSync } from 'fs';
import { parseRecords } from '../src/csv.js';
import { fitSlope, meanCurves } from '../src/curves.js';

const FIXTURE_DIR = new URL('./fixtures/', import.meta.url).pathname;

describe('meanCurves', () => {
  it('matches the producer-side per-method means within 1e-12', () => {
    const records = parseRecords(readFileSync(FIXTURE_DIR + 'grid2d.csv', 'utf8'));
    const frozen = JSON.parse(readFileSync(FIXTURE_DIR + 'grid2d_means.json', 'utf8')) as Record<
      string,
      { t: number[]; mean: string[] }
    >;
    const curves = meanCurves(records, 'error');
    expect(curves.map((c) => c.method).sort()).toEqual(Object.keys(frozen).sort());
    for (const curve of curves) {
      const entry = frozen[curve.method];
      expect(curve.ts).toEqual(entry.t);
      for (let i = 0; i < curve.means.length; i++) {
        expect(Math.abs(curve.means[i] - Number(entry.mean[i]))).toBeLessThanOrEqual(1e-12);
      }
    }
  });

  it('averages across repetitions', () => {
    const records = parseRecords(
      'method,rep,t,consensus_error\nm,0,0,1\nm,1,0,3\nm,0,1,0.5\nm,1,1,0.25\n',
    );
    const [curve] = meanCurves(records);
    expect(curve.ts).toEqual([0, 1]);
    expect(curve.means).toEqual([2, 0.375]);
  });

  it('requires the mse column for --y mse', () => {
    const records = parseRecords('method,rep,t,consensus_error\nm,0,0,1\n');
    expect(() => meanCurves(records, 'mse')).toThrowError(/no mse column/);
  });
});

describe('fitSlope', () => {
  it('recovers a geometric ratio on a semi-log fit', () => {
    const ts = Array.from({ length: 30 }, (_, i) => i);
    const means = ts.map((t) => Math.pow(0.9, t));
    const slope = fitSlope({ method: 'm', ts, means }, [5, 25], false);
    expect(Math.exp(slope!)).toBeCloseTo(0.9, 9);
  });

  it('recovers a power-law exponent on a log-log fit', () => {
    const ts = Array.from({ length: 30 }, (_, i) => i + 1);
    const means = ts.map((t) => Math.pow(t, -2));
    const slope = fitSlope({ method: 'm', ts, means }, [2, 28], true);
    expect(slope!).toBeCloseTo(-2, 9);
  });

  it('returns null when nothing is fittable', () => {
    expect(fitSlope({ method: 'm', ts: [1, 2], means: [0, 0] }, [0, 9], false)).toBeNull();
  });
});
