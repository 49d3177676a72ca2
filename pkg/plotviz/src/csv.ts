/**
 * Parser for dcio-sim run logs.
 *
 * Contract: header row exactly
 *   t,filter,rot_err_core,pos_err_core,vel_err_core,rot_err_ext,pos_err_ext,innov_norm
 * then one row per (timestamp, filter).  Parse errors carry the offending
 * line number.
 */

export const EXPECTED_HEADER =
  "t,filter,rot_err_core,pos_err_core,vel_err_core," +
  "rot_err_ext,pos_err_ext,innov_norm";

const NUMERIC_COLUMNS = [
  "rot_err_core",
  "pos_err_core",
  "vel_err_core",
  "rot_err_ext",
  "pos_err_ext",
  "innov_norm",
] as const;

export type NumericColumn = (typeof NUMERIC_COLUMNS)[number];

export interface FilterSeries {
  t: number[];
  columns: Record<NumericColumn, number[]>;
}

export interface RunLog {
  /** insertion order = first appearance in the file */
  filters: string[];
  series: Map<string, FilterSeries>;
}

export class CsvParseError extends Error {
  constructor(
    public readonly source: string,
    public readonly line: number,
    detail: string,
  ) {
    super(`${source}:${line}: ${detail}`);
    this.name = "CsvParseError";
  }
}

function emptySeries(): FilterSeries {
  return {
    t: [],
    columns: {
      rot_err_core: [],
      pos_err_core: [],
      vel_err_core: [],
      rot_err_ext: [],
      pos_err_ext: [],
      innov_norm: [],
    },
  };
}

export function parseRunLog(text: string, source = "<input>"): RunLog {
  const lines = text.split("\n");
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new CsvParseError(source, 1, "missing header row");
  }
  if (lines[0].replace(/\r$/, "") !== EXPECTED_HEADER) {
    throw new CsvParseError(
      source,
      1,
      `unexpected header; want "${EXPECTED_HEADER}"`,
    );
  }

  const log: RunLog = { filters: [], series: new Map() };
  for (let i = 1; i < lines.length; i++) {
    const raw = lines[i].replace(/\r$/, "");
    if (raw === "") {
      continue; // trailing newline or blank line
    }
    const cells = raw.split(",");
    if (cells.length !== 8) {
      throw new CsvParseError(
        source,
        i + 1,
        `expected 8 fields, got ${cells.length}`,
      );
    }
    const t = Number(cells[0]);
    if (!Number.isFinite(t)) {
      throw new CsvParseError(source, i + 1, `bad timestamp "${cells[0]}"`);
    }
    const name = cells[1];
    if (name === "") {
      throw new CsvParseError(source, i + 1, "empty filter name");
    }
    let series = log.series.get(name);
    if (series === undefined) {
      series = emptySeries();
      log.series.set(name, series);
      log.filters.push(name);
    }
    series.t.push(t);
    for (let c = 0; c < NUMERIC_COLUMNS.length; c++) {
      const value = Number(cells[c + 2]);
      if (!Number.isFinite(value)) {
        throw new CsvParseError(
          source,
          i + 1,
          `bad value "${cells[c + 2]}" in column ${NUMERIC_COLUMNS[c]}`,
        );
      }
      series.columns[NUMERIC_COLUMNS[c]].push(value);
    }
  }
  return log;
}

/**
 * Merge logs from several files into one; filter names that collide across
 * files are disambiguated with the source label.
 */
export function mergeRunLogs(
  logs: { log: RunLog; label: string }[],
): RunLog {
  const merged: RunLog = { filters: [], series: new Map() };
  for (const { log, label } of logs) {
    for (const name of log.filters) {
      const key = merged.series.has(name) ? `${label}:${name}` : name;
      merged.filters.push(key);
      merged.series.set(key, log.series.get(name)!);
    }
  }
  return merged;
}
