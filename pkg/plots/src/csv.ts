import { readFileSync } from "fs";
import Papa from "papaparse";

/** Raised for input files that do not match their documented schema. */
export class SchemaError extends Error {}

export interface Table {
  file: string;
  columns: string[];
  rows: Record<string, number | string>[];
}

export function loadCsv(file: string): Table {
  let text: string;
  try {
    text = readFileSync(file, "utf8");
  } catch (e) {
    throw new Error(`cannot read ${file}: ${(e as Error).message}`);
  }
  const parsed = Papa.parse<Record<string, number | string>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SchemaError(`${file}: malformed CSV at row ${e.row}: ${e.message}`);
  }
  const columns = parsed.meta.fields ?? [];
  return { file, columns, rows: parsed.data };
}

/** Check that required columns exist; the error names what is missing vs found. */
export function requireColumns(table: Table, required: string[]): void {
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${table.file}: missing column(s) ${missing.map((m) => `"${m}"`).join(", ")}; ` +
        `found: ${table.columns.join(", ") || "(no header)"}`,
    );
  }
}

export function requireRows(table: Table): void {
  if (table.rows.length === 0) {
    throw new SchemaError(`${table.file}: no data rows`);
  }
}

/** Extract one column as numbers, rejecting non-numeric cells. */
export function numericColumn(table: Table, name: string): number[] {
  const out: number[] = [];
  for (let i = 0; i < table.rows.length; i++) {
    const v = table.rows[i][name];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new SchemaError(
        `${table.file}: column "${name}" has a non-numeric value at data row ${i + 1}`,
      );
    }
    out.push(v);
  }
  return out;
}
