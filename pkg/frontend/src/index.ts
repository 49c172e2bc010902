export { parseCsv, loadCsvFiles, RunRecord, SchemaError, REQUIRED_COLUMNS } from "./csv.js";
export { buildFigure, betaSweep, pSweep, stageTimes, totalTimes, bmEstimate, FIGURE_IDS, FigureId, FigureData, Series, Point } from "./figures.js";
export { renderSvg } from "./svg.js";
export { main, parseArgs, UsageError } from "./cli.js";
