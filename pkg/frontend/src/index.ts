export { CsvError, distinct, loadCsv, num, requireColumns, type Row } from "./csv.js";
export {
  FIGURE_KINDS,
  renderBurstDynamics,
  renderFigure,
  renderPdrVsBlockage,
  renderScalabilityBars,
  renderTrafficModeBars,
  type BurstOptions,
  type FigureKind,
} from "./figures.js";
export { renderToFile, runCli, type RenderArgs } from "./cli.js";
