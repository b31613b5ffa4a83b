/**
 * Figure assembly. No physics happens here: every plotted value is read
 * from the CSV, and a checksum of the plotted series is embedded in the
 * image metadata so a figure can always be traced back to its rows.
 */

import { createHash } from "node:crypto";

import { parseSweepCsv, SweepRow } from "./csv";
import {
  assertSeriesOrdering,
  buildSeries,
  FigureKind,
  OrderingViolation,
  Series,
} from "./series";
import {
  axes,
  legend,
  linearScale,
  logScale,
  polyline,
  renderDocument,
  Scale,
  THEME,
} from "./svg";

const TITLES: Record<FigureKind, string> = {
  threshold: "Logical error vs dephasing rate",
  scaling: "Logical error vs qudit dimension",
  two_qubit: "Two-qubit controlled-phase error vs dephasing rate",
};

export interface RenderResult {
  svg: string;
  checksum: string;
  violations: OrderingViolation[];
}

export function seriesChecksum(series: Series[]): string {
  const canonical = series.map((s) => ({
    label: s.label,
    x: s.x,
    y: s.y,
  }));
  return createHash("sha256").update(JSON.stringify(canonical)).digest("hex");
}

function bounds(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

function plotArea(): { x: [number, number]; y: [number, number] } {
  const { margin, width, height } = THEME;
  return {
    x: [margin.left, width - margin.right],
    y: [height - margin.bottom, margin.top],
  };
}

function drawSeries(series: Series[], xScale: Scale, yScale: Scale): string[] {
  const parts: string[] = [];
  series.forEach((s, i) => {
    const color = s.baseline ? THEME.palette[0] : THEME.palette[(i % 7) + 1];
    const xs = s.x.map(xScale);
    const ys = s.y.map(yScale);
    const dash = s.baseline ? ` stroke-dasharray="6,4"` : "";
    parts.push(
      `<path d="${polyline(xs, ys)}" fill="none" stroke="${color}" stroke-width="2"${dash}/>`
    );
    xs.forEach((x, j) => {
      parts.push(
        `<circle cx="${x.toFixed(2)}" cy="${ys[j].toFixed(2)}" r="3" fill="${color}"/>`
      );
    });
  });
  return parts;
}

export function renderFigure(rows: SweepRow[], kind: FigureKind): RenderResult {
  const series = buildSeries(rows, kind);
  const violations = assertSeriesOrdering(series, kind);
  const area = plotArea();

  const positive = series.flatMap((s) => s.y.filter((y) => y > 0));
  const [yLo, yHi] = bounds(positive);
  const yScale = logScale([yLo / 2, yHi * 2], area.y);

  let xScale: Scale;
  let xLabel: string;
  if (kind === "scaling") {
    const [xLo, xHi] = bounds(series.flatMap((s) => s.x));
    xScale = linearScale([xLo - 1, xHi + 1], area.x);
    xLabel = "qudit dimension d";
  } else {
    const [xLo, xHi] = bounds(series.flatMap((s) => s.x));
    xScale = logScale([xLo / 1.5, xHi * 1.5], area.x);
    xLabel = "1/T2 (1/s)";
  }

  const body = [
    ...axes(xScale, yScale, xLabel, "logical error E_e"),
    ...drawSeries(series, xScale, yScale),
    ...legend(
      series.map((s) => s.label),
      series.map((s, i) => (s.baseline ? THEME.palette[0] : THEME.palette[(i % 7) + 1]))
    ),
  ];
  const checksum = seriesChecksum(series);
  const svg = renderDocument({ body, metadata: checksum, title: TITLES[kind] });
  return { svg, checksum, violations };
}

export function renderCsvText(text: string, kind: FigureKind): RenderResult {
  return renderFigure(parseSweepCsv(text), kind);
}
