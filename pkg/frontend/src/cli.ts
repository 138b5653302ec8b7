#!/usr/bin/env node
import { writeFileSync } from "node:fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { CsvError, loadCsv } from "./csv.js";
import { FIGURE_KINDS, renderFigure, type FigureKind } from "./figures.js";

export interface RenderArgs {
  kind: FigureKind;
  input: string;
  out: string;
  cap: number;
  seed: string;
}

export function renderToFile(args: RenderArgs): void {
  const rows = loadCsv(args.input);
  const svg = renderFigure(args.kind, rows, { cap: args.cap, seed: args.seed });
  writeFileSync(args.out, svg + "\n");
}

export function runCli(argv: string[]): number {
  const parsed = yargs(argv)
    .scriptName("plotkit")
    .command("$0 <kind>", "render one figure kind from a sweep CSV", (y) =>
      y
        .positional("kind", { choices: FIGURE_KINDS, demandOption: true })
        .option("input", { type: "string", demandOption: true, describe: "summary or trace CSV" })
        .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
        .option("cap", { type: "number", default: 8, describe: "buffer cap line for the queue panel" })
        .option("seed", { type: "string", default: "1", describe: "trace seed to plot" }),
    )
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    });

  let args;
  try {
    args = parsed.parseSync();
  } catch (e) {
    console.error(String(e instanceof Error ? e.message : e));
    return 2;
  }
  try {
    renderToFile({
      kind: args.kind as FigureKind,
      input: args.input as string,
      out: args.out as string,
      cap: args.cap as number,
      seed: args.seed as string,
    });
  } catch (e) {
    if (e instanceof CsvError) {
      console.error(`error: ${e.message}`);
      return 2;
    }
    throw e;
  }
  console.error(`wrote ${args.out}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(runCli(hideBin(process.argv)));
}
