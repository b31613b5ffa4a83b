/**
 * Minimal deterministic SVG assembly: fixed theme, fixed precision, no
 * timestamps or randomness, so identical input rows yield identical bytes.
 */

export const THEME = {
  width: 720,
  height: 480,
  margin: { left: 72, right: 160, top: 44, bottom: 56 },
  background: "#ffffff",
  axis: "#333333",
  grid: "#dddddd",
  font: "12px sans-serif",
  palette: [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
  ],
} as const;

const F = (value: number): string => value.toFixed(2);

export interface Scale {
  (value: number): number;
  ticks: number[];
  format(value: number): string;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain.map(Math.log10);
  const scale = ((value: number) =>
    range[0] + ((Math.log10(value) - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  const ticks: number[] = [];
  for (let p = Math.ceil(d0); p <= Math.floor(d1); p++) {
    ticks.push(10 ** p);
  }
  scale.ticks = ticks;
  scale.format = (value: number) => {
    const p = Math.round(Math.log10(value));
    return `1e${p}`;
  };
  return scale;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const scale = ((value: number) =>
    range[0] + ((value - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  const span = d1 - d0;
  const step = span <= 10 ? 2 : Math.ceil(span / 6);
  const ticks: number[] = [];
  for (let v = Math.ceil(d0); v <= d1; v += step) {
    ticks.push(v);
  }
  scale.ticks = ticks;
  scale.format = (value: number) => String(value);
  return scale;
}

export function polyline(xs: number[], ys: number[]): string {
  return xs.map((x, i) => `${i === 0 ? "M" : "L"}${F(x)},${F(ys[i])}`).join(" ");
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface SvgFigure {
  body: string[];
  metadata: string;
  title: string;
}

export function renderDocument(figure: SvgFigure): string {
  const { width, height, background } = THEME;
  return [
    `<?xml version="1.0" encoding="UTF-8"?>`,
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<metadata id="input-checksum">${figure.metadata}</metadata>`,
    `<rect width="${width}" height="${height}" fill="${background}"/>`,
    `<text x="${F(width / 2)}" y="24" text-anchor="middle" style="font:14px sans-serif;font-weight:bold" fill="${THEME.axis}">${escapeXml(figure.title)}</text>`,
    ...figure.body,
    `</svg>`,
    ``,
  ].join("\n");
}

export function axes(
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string
): string[] {
  const { margin, width, height, axis, grid } = THEME;
  const x0 = margin.left;
  const x1 = width - margin.right;
  const y0 = height - margin.bottom;
  const y1 = margin.top;
  const parts: string[] = [];
  for (const t of xScale.ticks) {
    const x = xScale(t);
    parts.push(`<line x1="${F(x)}" y1="${F(y0)}" x2="${F(x)}" y2="${F(y1)}" stroke="${grid}"/>`);
    parts.push(
      `<text x="${F(x)}" y="${F(y0 + 18)}" text-anchor="middle" style="font:${THEME.font}" fill="${axis}">${escapeXml(xScale.format(t))}</text>`
    );
  }
  for (const t of yScale.ticks) {
    const y = yScale(t);
    parts.push(`<line x1="${F(x0)}" y1="${F(y)}" x2="${F(x1)}" y2="${F(y)}" stroke="${grid}"/>`);
    parts.push(
      `<text x="${F(x0 - 6)}" y="${F(y + 4)}" text-anchor="end" style="font:${THEME.font}" fill="${axis}">${escapeXml(yScale.format(t))}</text>`
    );
  }
  parts.push(`<rect x="${F(x0)}" y="${F(y1)}" width="${F(x1 - x0)}" height="${F(y0 - y1)}" fill="none" stroke="${axis}"/>`);
  parts.push(
    `<text x="${F((x0 + x1) / 2)}" y="${F(y0 + 40)}" text-anchor="middle" style="font:${THEME.font}" fill="${axis}">${escapeXml(xLabel)}</text>`
  );
  parts.push(
    `<text x="18" y="${F((y0 + y1) / 2)}" text-anchor="middle" style="font:${THEME.font}" fill="${axis}" transform="rotate(-90 18 ${F((y0 + y1) / 2)})">${escapeXml(yLabel)}</text>`
  );
  return parts;
}

export function legend(labels: string[], colors: string[]): string[] {
  const { width, margin } = THEME;
  const x = width - margin.right + 12;
  const parts: string[] = [];
  labels.forEach((label, i) => {
    const y = margin.top + 14 + i * 20;
    parts.push(`<line x1="${F(x)}" y1="${F(y)}" x2="${F(x + 22)}" y2="${F(y)}" stroke="${colors[i]}" stroke-width="2"/>`);
    parts.push(
      `<text x="${F(x + 28)}" y="${F(y + 4)}" style="font:${THEME.font}" fill="${THEME.axis}">${escapeXml(label)}</text>`
    );
  });
  return parts;
}
