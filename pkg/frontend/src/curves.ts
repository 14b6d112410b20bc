/** Repetition-averaged curves and slope fits on top of parsed records. */

import { BenchRecord } from './csv.js';

export type YField = 'error' | 'mse';

export interface Curve {
  method: string;
  ts: number[];
  means: number[];
}

/**
 * One curve per method: the mean over repetitions at each t.
 * Sums run in ascending repetition order so the result is deterministic and
 * reproducible against the producer's own averaging.
 */
export function meanCurves(records: BenchRecord[], y: YField = 'error'): Curve[] {
  const byMethod = new Map<string, Map<number, number[]>>();
  for (const r of records) {
    const value = y === 'error' ? r.consensusError : r.mse;
    if (value === null) {
      throw new Error(`record (${r.method}, rep=${r.rep}, t=${r.t}) has no mse column`);
    }
    let perT = byMethod.get(r.method);
    if (!perT) {
      perT = new Map();
      byMethod.set(r.method, perT);
    }
    let vals = perT.get(r.t);
    if (!vals) {
      vals = [];
      perT.set(r.t, vals);
    }
    vals.push(value);
  }
  const curves: Curve[] = [];
  for (const method of [...byMethod.keys()].sort()) {
    const perT = byMethod.get(method)!;
    const ts = [...perT.keys()].sort((a, b) => a - b);
    const means = ts.map((t) => {
      const vals = perT.get(t)!;
      let sum = 0;
      for (const v of vals) sum += v;
      return sum / vals.length;
    });
    curves.push({ method, ts, means });
  }
  return curves;
}

/**
 * Least-squares slope of the curve over a t-window in the plotted
 * coordinates: ln(y) against either t (semi-log) or ln(t) (log-log).
 * Only strictly positive values enter; returns null if fewer than two do.
 */
export function fitSlope(
  curve: Curve,
  window: [number, number],
  xlog: boolean,
): number | null {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < curve.ts.length; i++) {
    const t = curve.ts[i];
    const v = curve.means[i];
    if (t < window[0] || t > window[1] || v <= 0 || (xlog && t <= 0)) continue;
    xs.push(xlog ? Math.log(t) : t);
    ys.push(Math.log(v));
  }
  if (xs.length < 2) return null;
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return den === 0 ? null : num / den;
}
