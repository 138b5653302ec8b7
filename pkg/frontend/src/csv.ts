import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class CsvError extends Error {}

export type Row = Record<string, string>;

export function loadCsv(path: string): Row[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new CsvError(`cannot read ${path}`);
  }
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvError(`${path}: ${e.message}`);
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  return parsed.data;
}

export function requireColumns(rows: Row[], cols: string[], label: string): void {
  const have = new Set(Object.keys(rows[0]));
  const missing = cols.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new CsvError(`${label}: missing column(s) ${missing.join(", ")}`);
  }
}

export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new CsvError(`bad numeric value '${row[col]}' in column ${col}`);
  }
  return v;
}

// Distinct values of one column in first-seen order (CSV writers emit cells
// in a deterministic order, so this preserves it).
export function distinct(rows: Row[], col: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const r of rows) {
    const v = r[col];
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
