#!/usr/bin/env node
/**
 * plot_curves <csv> [<csv> ...] --y {error|mse} --yscale {linear|log}
 *             --xscale {linear|log} --out <img.svg>
 *             [--fit lo:hi] [--style method=#color ...]
 *
 * Averages each method's curve across repetitions and renders an SVG figure.
 * Exit codes: 0 success, 2 bad arguments or malformed CSV.
 */

import { readFileSync, writeFileSync } from 'fs';
import { CsvSchemaError, parseRecords } from './csv.js';
import { meanCurves, YField } from './curves.js';
import { renderPlot, Scale } from './svg.js';

interface Args {
  inputs: string[];
  y: YField;
  yscale: Scale;
  xscale: Scale;
  out: string;
  fit: [number, number] | null;
  styles: Map<string, string>;
}

function parseArgs(argv: string[]): Args {
  const args: Args = {
    inputs: [],
    y: 'error',
    yscale: 'linear',
    xscale: 'linear',
    out: 'plot.svg',
    fit: null,
    styles: new Map(),
  };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = (): string => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value after ${a}`);
      return argv[i];
    };
    if (a === '--y') {
      const v = next();
      if (v !== 'error' && v !== 'mse') throw new Error(`--y must be error or mse, got ${v}`);
      args.y = v;
    } else if (a === '--yscale' || a === '--xscale') {
      const v = next();
      if (v !== 'linear' && v !== 'log') throw new Error(`${a} must be linear or log, got ${v}`);
      if (a === '--yscale') args.yscale = v;
      else args.xscale = v;
    } else if (a === '--out') {
      args.out = next();
    } else if (a === '--fit') {
      const v = next();
      const m = v.match(/^(\d+):(\d+)$/);
      if (!m) throw new Error(`--fit expects lo:hi, got ${v}`);
      args.fit = [Number(m[1]), Number(m[2])];
    } else if (a === '--style') {
      const v = next();
      const eq = v.indexOf('=');
      if (eq < 0) throw new Error(`--style expects method=color, got ${v}`);
      args.styles.set(v.slice(0, eq), v.slice(eq + 1));
    } else if (a.startsWith('--')) {
      throw new Error(`unknown flag ${a}`);
    } else {
      args.inputs.push(a);
    }
  }
  if (args.inputs.length === 0) throw new Error('no input CSV given');
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`usage error: ${(e as Error).message}`);
    return 2;
  }
  try {
    const records = args.inputs.flatMap((path) => parseRecords(readFileSync(path, 'utf8')));
    const curves = meanCurves(records, args.y);
    const svg = renderPlot(curves, {
      yscale: args.yscale,
      xscale: args.xscale,
      ylabel: args.y === 'error' ? 'consensus error' : 'MSE',
      styles: args.styles,
      fitWindow: args.fit,
    });
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out} (${curves.length} curves)`);
    return 0;
  } catch (e) {
    if (e instanceof CsvSchemaError) {
      console.error(`CSV parse error: ${e.message}`);
      return 2;
    }
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

// script entry (skipped when imported by tests)
if (process.argv[1] && /plot_curves\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
