#!/usr/bin/env node
/**
 * plot-ftqec: render a sweep CSV into a deterministic SVG figure.
 *
 *   plot-ftqec --kind threshold --in results.csv --out fig2a.svg
 *   plot-ftqec --kind scaling   --in scaling.csv --out fig2b.svg
 *   plot-ftqec --kind two_qubit --in cphase.csv  --out fig3.svg
 *
 * Series orderings are checked numerically before plotting; violations
 * abort unless --no-assert-ordering is given.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { CsvFormatError } from "./csv";
import { renderCsvText } from "./plots";
import { FigureKind, SelectionError } from "./series";

const KINDS: FigureKind[] = ["threshold", "scaling", "two_qubit"];

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
        "no-assert-ordering": { type: "boolean", default: false },
      },
    });
  } catch (err) {
    process.stderr.write(`argument error: ${(err as Error).message}\n`);
    return 1;
  }
  const { kind, in: input, out } = parsed.values;
  if (!kind || !input || !out) {
    process.stderr.write(
      "usage: plot-ftqec --kind threshold|scaling|two_qubit --in results.csv --out figure.svg\n"
    );
    return 1;
  }
  if (!KINDS.includes(kind as FigureKind)) {
    process.stderr.write(`unknown figure kind '${kind}'\n`);
    return 1;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (err) {
    process.stderr.write(`cannot read ${input}: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    const result = renderCsvText(text, kind as FigureKind);
    if (result.violations.length > 0) {
      for (const v of result.violations) {
        process.stderr.write(
          `ordering violation: ${v.seriesB} above ${v.seriesA} at x=${v.x} ` +
            `(${v.yB} > ${v.yA})\n`
        );
      }
      if (!parsed.values["no-assert-ordering"]) {
        process.stderr.write("aborting (use --no-assert-ordering to render anyway)\n");
        return 1;
      }
    }
    writeFileSync(out, result.svg, "utf-8");
    process.stderr.write(`wrote ${out} (input checksum ${result.checksum.slice(0, 12)})\n`);
    return 0;
  } catch (err) {
    if (err instanceof CsvFormatError || err instanceof SelectionError) {
      process.stderr.write(`${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
