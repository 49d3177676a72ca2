export { CsvParseError, EXPECTED_HEADER, mergeRunLogs, parseRunLog } from "./csv.js";
export type { FilterSeries, NumericColumn, RunLog } from "./csv.js";
export { render } from "./svg.js";
export type { PlotOptions } from "./svg.js";
