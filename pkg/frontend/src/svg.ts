/** Self-contained SVG rendering of convergence curves (no DOM, no deps). */

import { Curve, fitSlope } from './curves.js';

export type Scale = 'linear' | 'log';

export interface PlotOptions {
  yscale: Scale;
  xscale: Scale;
  width?: number;
  height?: number;
  ylabel?: string;
  /** method -> stroke color; unmapped methods cycle through the palette */
  styles?: Map<string, string>;
  /** annotate per-method fitted slopes over this t-window */
  fitWindow?: [number, number] | null;
}

const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2'];
const MARGIN = { left: 64, right: 16, top: 16, bottom: 42 };

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;').replace(/"/g, '&quot;');
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / (n * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const start = Math.ceil(lo / s) * s;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += s) ticks.push(v);
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

function fmt(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(6)));
  return v.toExponential(0);
}

/** Render curves to an SVG string. Empty input produces empty axes. */
export function renderPlot(curves: Curve[], opts: PlotOptions): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 480;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  // collect plottable points (log scales drop non-positive coordinates)
  const pts = curves.flatMap((c) =>
    c.ts
      .map((t, i) => ({ t, v: c.means[i] }))
      .filter((p) => (opts.xscale === 'log' ? p.t > 0 : true))
      .filter((p) => (opts.yscale === 'log' ? p.v > 0 : true)),
  );

  let xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (pts.length > 0) {
    xlo = Math.min(...pts.map((p) => p.t));
    xhi = Math.max(...pts.map((p) => p.t));
    ylo = Math.min(...pts.map((p) => p.v));
    yhi = Math.max(...pts.map((p) => p.v));
    if (xhi === xlo) xhi = xlo + 1;
    if (yhi === ylo) yhi = ylo + (ylo === 0 ? 1 : Math.abs(ylo) * 0.1);
  }

  const xmap = (t: number): number => {
    const u = opts.xscale === 'log'
      ? (Math.log(t) - Math.log(xlo)) / (Math.log(xhi) - Math.log(xlo))
      : (t - xlo) / (xhi - xlo);
    return MARGIN.left + u * plotW;
  };
  const ymap = (v: number): number => {
    const u = opts.yscale === 'log'
      ? (Math.log(v) - Math.log(ylo)) / (Math.log(yhi) - Math.log(ylo))
      : (v - ylo) / (yhi - ylo);
    return MARGIN.top + (1 - u) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
  );

  const xticks = pts.length === 0 ? [] : opts.xscale === 'log' ? logTicks(Math.max(xlo, 1e-12), xhi) : niceTicks(xlo, xhi);
  const yticks = pts.length === 0 ? [] : opts.yscale === 'log' ? logTicks(ylo, yhi) : niceTicks(ylo, yhi);
  for (const t of xticks) {
    const x = xmap(t);
    if (x < MARGIN.left - 0.5 || x > width - MARGIN.right + 0.5) continue;
    parts.push(
      `<line x1="${x.toFixed(2)}" y1="${MARGIN.top}" x2="${x.toFixed(2)}" y2="${MARGIN.top + plotH}" stroke="#ddd"/>`,
      `<text x="${x.toFixed(2)}" y="${height - MARGIN.bottom + 18}" font-size="12" text-anchor="middle">${fmt(t)}</text>`,
    );
  }
  for (const v of yticks) {
    const y = ymap(v);
    if (y < MARGIN.top - 0.5 || y > height - MARGIN.bottom + 0.5) continue;
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${width - MARGIN.right}" y2="${y.toFixed(2)}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${(y + 4).toFixed(2)}" font-size="12" text-anchor="end">${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 8}" font-size="13" text-anchor="middle">t</text>`,
    `<text x="14" y="${MARGIN.top + plotH / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 14 ${MARGIN.top + plotH / 2})">${esc(opts.ylabel ?? 'consensus error')}</text>`,
  );

  curves.forEach((curve, idx) => {
    const color = opts.styles?.get(curve.method) ?? PALETTE[idx % PALETTE.length];
    const coords: string[] = [];
    for (let i = 0; i < curve.ts.length; i++) {
      const t = curve.ts[i];
      const v = curve.means[i];
      if (opts.xscale === 'log' && t <= 0) continue;
      if (opts.yscale === 'log' && v <= 0) continue;
      coords.push(`${xmap(t).toFixed(2)},${ymap(v).toFixed(2)}`);
    }
    if (coords.length > 0) {
      parts.push(
        `<polyline fill="none" stroke="${color}" stroke-width="1.6" data-method="${esc(curve.method)}" points="${coords.join(' ')}"/>`,
      );
    }
    let label = curve.method;
    if (opts.fitWindow) {
      const slope = fitSlope(curve, opts.fitWindow, opts.xscale === 'log');
      if (slope !== null) {
        label += opts.xscale === 'log'
          ? ` (slope ${slope.toFixed(2)})`
          : ` (ratio ${Math.exp(slope).toFixed(4)}/step)`;
      }
    }
    const ly = MARGIN.top + 16 + 16 * idx;
    parts.push(
      `<line x1="${MARGIN.left + 8}" y1="${ly - 4}" x2="${MARGIN.left + 30}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${MARGIN.left + 36}" y="${ly}" font-size="12">${esc(label)}</text>`,
    );
  });

  parts.push('</svg>');
  return parts.join('\n') + '\n';
}
