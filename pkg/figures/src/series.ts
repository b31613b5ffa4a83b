/**
 * Grouping of sweep rows into plot series, plus the numeric ordering
 * assertions that run before anything is drawn.
 *
 * Threshold-style figures carry one series per encoding dimension (gate
 * values averaged per abscissa) and one uncorrected baseline; scaling
 * figures carry one series per T2 with the dimension on the x axis.
 */

import { SweepRow } from "./csv";

export type FigureKind = "threshold" | "scaling" | "two_qubit";

export interface Series {
  label: string;
  /** sort key: encoding dimension, or T2 in microseconds for scaling */
  key: number;
  /** abscissa: 1/T2 in 1/s (threshold, two_qubit) or d (scaling) */
  x: number[];
  y: number[];
  baseline: boolean;
}

export class SelectionError extends Error {}

function meanByAbscissa(
  rows: SweepRow[],
  abscissa: (row: SweepRow) => number
): Map<number, number> {
  const sums = new Map<number, { total: number; count: number }>();
  for (const row of rows) {
    if (row.eE === null) continue;
    const x = abscissa(row);
    const slot = sums.get(x) ?? { total: 0, count: 0 };
    slot.total += row.eE;
    slot.count += 1;
    sums.set(x, slot);
  }
  const out = new Map<number, number>();
  for (const [x, { total, count }] of sums) {
    out.set(x, total / count);
  }
  return out;
}

function toSeries(
  label: string,
  key: number,
  points: Map<number, number>,
  baseline: boolean
): Series {
  const xs = [...points.keys()].sort((a, b) => a - b);
  return {
    label,
    key,
    x: xs,
    y: xs.map((x) => points.get(x)!),
    baseline,
  };
}

export function buildSeries(rows: SweepRow[], kind: FigureKind): Series[] {
  const invT2 = (row: SweepRow) => 1.0 / (row.t2Us * 1e-6);
  const series: Series[] = [];
  if (kind === "threshold" || kind === "two_qubit") {
    const encoded =
      kind === "threshold"
        ? rows.filter((r) => r.circuit === "single_gate_cycle")
        : rows.filter((r) => r.circuit === "cphase" && r.d > 2);
    const baseline =
      kind === "threshold"
        ? rows.filter((r) => r.circuit === "baseline")
        : rows.filter((r) => r.circuit === "cphase" && r.d === 2);
    const dims = [...new Set(encoded.map((r) => r.d))].sort((a, b) => a - b);
    if (baseline.length > 0) {
      series.push(toSeries("uncorrected", 2, meanByAbscissa(baseline, invT2), true));
    }
    for (const d of dims) {
      const rowsD = encoded.filter((r) => r.d === d);
      series.push(toSeries(`d=${d}`, d, meanByAbscissa(rowsD, invT2), false));
    }
  } else {
    const encoded = rows.filter((r) => r.circuit === "single_gate_cycle");
    const t2s = [...new Set(encoded.map((r) => r.t2Us))].sort((a, b) => a - b);
    for (const t2 of t2s) {
      const rowsT = encoded.filter((r) => r.t2Us === t2);
      series.push(
        toSeries(`T2 = ${t2} us`, t2, meanByAbscissa(rowsT, (r) => r.d), false)
      );
    }
  }
  if (series.length === 0 || series.every((s) => s.x.length === 0)) {
    throw new SelectionError(`no plottable rows for figure kind '${kind}'`);
  }
  return series;
}

export interface OrderingViolation {
  seriesA: string;
  seriesB: string;
  x: number;
  yA: number;
  yB: number;
}

/**
 * Larger encodings must sit at or below smaller ones at every shared
 * abscissa (threshold/two_qubit); scaling series must decrease with d.
 * The uncorrected baseline is allowed to cross (that crossing is the
 * threshold itself).
 */
export function assertSeriesOrdering(
  series: Series[],
  kind: FigureKind
): OrderingViolation[] {
  const violations: OrderingViolation[] = [];
  if (kind === "threshold" || kind === "two_qubit") {
    const encoded = series.filter((s) => !s.baseline);
    for (let a = 0; a < encoded.length; a++) {
      for (let b = a + 1; b < encoded.length; b++) {
        const small = encoded[a];
        const big = encoded[b];
        for (let i = 0; i < small.x.length; i++) {
          const j = big.x.indexOf(small.x[i]);
          if (j < 0) continue;
          if (big.y[j] > small.y[i]) {
            violations.push({
              seriesA: small.label,
              seriesB: big.label,
              x: small.x[i],
              yA: small.y[i],
              yB: big.y[j],
            });
          }
        }
      }
    }
  } else {
    for (const s of series) {
      for (let i = 1; i < s.x.length; i++) {
        if (s.y[i] >= s.y[i - 1]) {
          violations.push({
            seriesA: s.label,
            seriesB: s.label,
            x: s.x[i],
            yA: s.y[i - 1],
            yB: s.y[i],
          });
        }
      }
    }
  }
  return violations;
}
