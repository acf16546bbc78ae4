import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class CsvError extends Error {}

export type Row = Record<string, number | string>;

/**
 * Read a CSV file, check that every required column is present, and
 * return its data rows.  A file with a header but no data rows is an
 * error: every figure needs at least one point.
 */
export function readCsv(path: string, requiredColumns: string[]): Row[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new CsvError(`malformed CSV ${path}: ${first.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of requiredColumns) {
    if (!fields.includes(column)) {
      throw new CsvError(
        `${path} is missing column "${column}" (found: ${fields.join(", ")})`,
      );
    }
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${path} has no data rows`);
  }
  return parsed.data;
}

/** Extract a numeric column, failing loudly on non-numeric entries. */
export function numericColumn(rows: Row[], path: string, column: string): number[] {
  return rows.map((row, i) => {
    const value = row[column];
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new CsvError(`${path} row ${i + 1}: column "${column}" is not a finite number`);
    }
    return value;
  });
}
