/**
 * Strict reader for the sweep CSV format exported by the simulation CLI.
 *
 * Fixed base header: d,t2_us,theta,phi,circuit,E_e,F_e,leakage,acceptance
 * followed by optional syndrome_K columns. Rows with circuit == "error" or
 * an empty E_e cell are carried through as failed points and skipped by the
 * plot layer.
 */

export interface SweepRow {
  d: number;
  t2Us: number;
  circuit: string;
  eE: number | null;
  fE: number | null;
}

export const REQUIRED_COLUMNS = ["d", "t2_us", "circuit", "E_e", "F_e"] as const;

export class CsvFormatError extends Error {}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvFormatError("empty CSV");
  }
  const header = lines[0].split(",");
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name, i));
  for (const column of REQUIRED_COLUMNS) {
    if (!index.has(column)) {
      throw new CsvFormatError(`missing required column '${column}'`);
    }
  }
  const rows: SweepRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const take = (name: string): string => cells[index.get(name)!] ?? "";
    const num = (name: string): number | null => {
      const cell = take(name);
      if (cell === "") return null;
      const value = Number(cell);
      if (!Number.isFinite(value)) return null;
      return value;
    };
    const d = num("d");
    const t2 = num("t2_us");
    if (d === null || t2 === null) continue; // error rows carry no coordinates
    rows.push({
      d,
      t2Us: t2,
      circuit: take("circuit"),
      eE: num("E_e"),
      fE: num("F_e"),
    });
  }
  return rows;
}
