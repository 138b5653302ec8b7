import { scaleBand, scaleLinear, type ScaleLinear } from "d3-scale";

import { CsvError, distinct, num, requireColumns, type Row } from "./csv.js";
import {
  axisBottom,
  axisLeft,
  el,
  fmt,
  frame,
  legend,
  polylinePoints,
  svgDoc,
  text,
} from "./svg.js";

export const FIGURE_KINDS = [
  "pdr-vs-blockage",
  "burst-dynamics",
  "scalability-bars",
  "traffic-mode-bars",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

const POLICY_COLOR: Record<string, string> = {
  hybrid: "#2c6fbb",
  queue: "#d1662c",
  age: "#3a9452",
};

const MODE_COLOR: Record<string, string> = {
  dual: "#2c6fbb",
  single: "#d1662c",
};

const M = { top: 34, right: 24, bottom: 40, left: 56 };
const PLOT_W = 560;
const PLOT_H = 240;

function color(map: Record<string, string>, key: string): string {
  return map[key] ?? "#777";
}

function meanRows(rows: Row[]): Row[] {
  const out = rows.filter((r) => r.seed === "mean");
  if (out.length === 0) {
    throw new CsvError("no aggregate rows (seed=mean); write the sweep CSV with per-cell mean/std rows");
  }
  return out;
}

function stdLookup(rows: Row[], keyCols: string[]): Map<string, Row> {
  const map = new Map<string, Row>();
  for (const r of rows) {
    if (r.seed === "std") {
      map.set(keyCols.map((c) => r[c]).join("|"), r);
    }
  }
  return map;
}

// ------------------------------------------------ PDR vs blockage level

export function renderPdrVsBlockage(rows: Row[]): string {
  requireColumns(rows, ["p_blk", "path_mode", "seed", "pdr"], "summary");
  const means = meanRows(rows);
  const stds = stdLookup(rows, ["path_mode", "p_blk"]);
  const modes = distinct(means, "path_mode");
  const levels = distinct(means, "p_blk")
    .map(Number)
    .sort((a, b) => a - b);

  let lo = Infinity;
  let hi = -Infinity;
  const pt = new Map<string, { mean: number; std: number }>();
  for (const r of means) {
    const s = stds.get(`${r.path_mode}|${r.p_blk}`);
    const v = { mean: num(r, "pdr"), std: s ? num(s, "pdr") : 0 };
    pt.set(`${r.path_mode}|${Number(r.p_blk)}`, v);
    lo = Math.min(lo, v.mean - v.std);
    hi = Math.max(hi, v.mean + v.std);
  }
  const pad = Math.max((hi - lo) * 0.15, 0.002);

  const xs = scaleLinear()
    .domain([levels[0], levels[levels.length - 1]])
    .range([M.left, M.left + PLOT_W]);
  const ys = scaleLinear()
    .domain([lo - pad, hi + pad])
    .range([M.top + PLOT_H, M.top])
    .nice();

  const body: string[] = [];
  body.push(...axisLeft(ys as ScaleLinear<number, number>, M.left, M.left + PLOT_W));
  body.push(...axisBottom(xs as ScaleLinear<number, number>, M.top + PLOT_H, levels.length));
  body.push(...frame(M.left, M.top, M.left + PLOT_W, M.top + PLOT_H));

  for (const mode of modes) {
    const c = color(MODE_COLOR, mode);
    const pts: Array<[number, number]> = [];
    for (const lvl of levels) {
      const v = pt.get(`${mode}|${lvl}`);
      if (!v) continue;
      const x = xs(lvl);
      const y = ys(v.mean);
      pts.push([x, y]);
      if (v.std > 0) {
        const yl = ys(v.mean - v.std);
        const yh = ys(v.mean + v.std);
        body.push(el("line", { class: `errbar mode-${mode}`, x1: x, y1: yl, x2: x, y2: yh, stroke: c }));
        body.push(el("line", { x1: x - 3, y1: yl, x2: x + 3, y2: yl, stroke: c }));
        body.push(el("line", { x1: x - 3, y1: yh, x2: x + 3, y2: yh, stroke: c }));
      }
    }
    body.push(
      el("polyline", {
        class: `series mode-${mode}`,
        points: polylinePoints(pts),
        fill: "none",
        stroke: c,
        "stroke-width": 1.5,
      }),
    );
    for (const [x, y] of pts) {
      body.push(el("circle", { class: `marker mode-${mode}`, cx: x, cy: y, r: 2.5, fill: c }));
    }
  }

  body.push(text(M.left + PLOT_W / 2, 16, "delivery ratio vs blockage probability", { "text-anchor": "middle", "font-size": 13 }));
  body.push(text(M.left + PLOT_W / 2, M.top + PLOT_H + 32, "blockage probability", { "text-anchor": "middle", fill: "#444" }));
  body.push(...legend(M.left + PLOT_W - 80, M.top + 16, modes.map((m) => [m, color(MODE_COLOR, m)] as [string, string])));
  return svgDoc(M.left + PLOT_W + M.right, M.top + PLOT_H + M.bottom, body);
}

// ------------------------------------------------ burst time series

export interface BurstOptions {
  cap?: number;
  seed?: string;
}

export function renderBurstDynamics(rows: Row[], opts: BurstOptions = {}): string {
  requireColumns(rows, ["policy", "seed", "slot", "mean_aoi", "max_queue"], "trace");
  const cap = opts.cap ?? 8;
  const seed = opts.seed ?? "1";
  const sel = rows.filter((r) => r.seed === seed);
  if (sel.length === 0) {
    throw new CsvError(`seed ${seed} not present in trace`);
  }
  const policies = distinct(sel, "policy");
  const bySeries = new Map<string, Array<[number, number]>>();
  let aoiMax = 0;
  let qMax = cap;
  for (const r of sel) {
    const slot = num(r, "slot");
    const aoi = num(r, "mean_aoi");
    const q = num(r, "max_queue");
    aoiMax = Math.max(aoiMax, aoi);
    qMax = Math.max(qMax, q);
    bySeries.set(`aoi|${r.policy}`, [...(bySeries.get(`aoi|${r.policy}`) ?? []), [slot, aoi]]);
    bySeries.set(`q|${r.policy}`, [...(bySeries.get(`q|${r.policy}`) ?? []), [slot, q]]);
  }
  const slots = sel.map((r) => num(r, "slot"));
  const xs = scaleLinear()
    .domain([Math.min(...slots), Math.max(...slots)])
    .range([M.left, M.left + PLOT_W]);

  const panelGap = 34;
  const yTopA = M.top;
  const yTopB = M.top + PLOT_H + panelGap;
  const ysA = scaleLinear().domain([0, aoiMax * 1.06]).range([yTopA + PLOT_H, yTopA]).nice();
  const ysB = scaleLinear().domain([0, qMax + 1]).range([yTopB + PLOT_H, yTopB]).nice();

  const body: string[] = [];
  const panels: Array<["aoi" | "q", ScaleLinear<number, number>, number, string]> = [
    ["aoi", ysA as ScaleLinear<number, number>, yTopA, "destination age per slot"],
    ["q", ysB as ScaleLinear<number, number>, yTopB, "peak queue length per slot"],
  ];
  for (const [key, ys, yTop, title] of panels) {
    const panel: string[] = [];
    panel.push(...axisLeft(ys, M.left, M.left + PLOT_W));
    panel.push(...axisBottom(xs as ScaleLinear<number, number>, yTop + PLOT_H));
    panel.push(...frame(M.left, yTop, M.left + PLOT_W, yTop + PLOT_H));
    if (key === "q") {
      const capY = ys(cap);
      panel.push(
        el("line", {
          class: "cap-line",
          x1: M.left,
          y1: capY,
          x2: M.left + PLOT_W,
          y2: capY,
          stroke: "#b22",
          "stroke-dasharray": "6 3",
        }),
      );
      panel.push(text(M.left + PLOT_W + 3, capY + 3.5, `cap ${cap}`, { fill: "#b22" }));
    }
    for (const p of policies) {
      const pts = (bySeries.get(`${key}|${p}`) ?? []).sort((a, b) => a[0] - b[0]);
      panel.push(
        el("polyline", {
          class: `series policy-${p}`,
          points: polylinePoints(pts.map(([s, v]) => [xs(s), ys(v)] as [number, number])),
          fill: "none",
          stroke: color(POLICY_COLOR, p),
          "stroke-width": 1.5,
        }),
      );
    }
    panel.push(text(M.left + PLOT_W / 2, yTop - 10, title, { "text-anchor": "middle", "font-size": 13 }));
    body.push(el("g", { class: "panel", "data-panel": key }, panel));
  }
  body.push(...legend(M.left + PLOT_W - 70, yTopA + 16, policies.map((p) => [p, color(POLICY_COLOR, p)] as [string, string])));
  body.push(text(M.left + PLOT_W / 2, yTopB + PLOT_H + 32, "slot", { "text-anchor": "middle", fill: "#444" }));
  return svgDoc(M.left + PLOT_W + M.right + 40, yTopB + PLOT_H + M.bottom, body);
}

// ------------------------------------------------ grouped bar figures

function renderGroupedBars(
  rows: Row[],
  catCol: string,
  catSort: (a: string, b: string) => number,
  title: string,
  xLabel: string,
): string {
  requireColumns(rows, [catCol, "policy", "seed", "mean_aoi", "imbalance_mean"], "summary");
  const means = meanRows(rows);
  const stds = stdLookup(rows, ["policy", catCol]);
  const cats = distinct(means, catCol).sort(catSort);
  const policies = distinct(means, "policy");

  const cell = new Map<string, Row>();
  for (const r of means) {
    cell.set(`${r.policy}|${r[catCol]}`, r);
  }

  const outer = scaleBand<string>().domain(cats).range([M.left, M.left + PLOT_W]).paddingInner(0.25).paddingOuter(0.12);
  const inner = scaleBand<string>().domain(policies).range([0, outer.bandwidth()]).paddingInner(0.12);

  const panelGap = 34;
  const metrics: Array<["mean_aoi" | "imbalance_mean", string, number]> = [
    ["mean_aoi", "mean destination age", M.top],
    ["imbalance_mean", "relay load imbalance", M.top + PLOT_H + panelGap],
  ];

  const body: string[] = [];
  for (const [metric, panelTitle, yTop] of metrics) {
    let hi = 0;
    for (const r of means) {
      const s = stds.get(`${r.policy}|${r[catCol]}`);
      hi = Math.max(hi, num(r, metric) + (s ? num(s, metric) : 0));
    }
    const ys = scaleLinear().domain([0, hi * 1.08]).range([yTop + PLOT_H, yTop]).nice();
    const panel: string[] = [];
    panel.push(...axisLeft(ys as ScaleLinear<number, number>, M.left, M.left + PLOT_W));
    panel.push(...frame(M.left, yTop, M.left + PLOT_W, yTop + PLOT_H));
    for (const cat of cats) {
      const gx = outer(cat)!;
      for (const p of policies) {
        const r = cell.get(`${p}|${cat}`);
        if (!r) continue;
        const v = num(r, metric);
        const x = gx + inner(p)!;
        const y = ys(v);
        panel.push(
          el("rect", {
            class: `bar policy-${p}`,
            x,
            y,
            width: inner.bandwidth(),
            height: yTop + PLOT_H - y,
            fill: color(POLICY_COLOR, p),
          }),
        );
        const s = stds.get(`${p}|${cat}`);
        if (s) {
          const sd = num(s, metric);
          if (sd > 0) {
            const cxm = x + inner.bandwidth() / 2;
            panel.push(
              el("line", {
                class: `errbar policy-${p}`,
                x1: cxm,
                y1: ys(v - sd),
                x2: cxm,
                y2: ys(v + sd),
                stroke: "#333",
              }),
            );
          }
        }
      }
      panel.push(
        text(gx + outer.bandwidth() / 2, yTop + PLOT_H + 15, cat, { "text-anchor": "middle", fill: "#444" }),
      );
    }
    panel.push(text(M.left + PLOT_W / 2, yTop - 10, panelTitle, { "text-anchor": "middle", "font-size": 13 }));
    body.push(el("g", { class: "panel", "data-panel": metric }, panel));
  }
  body.push(text(M.left + PLOT_W / 2, 16, title, { "text-anchor": "middle", "font-size": 13 }));
  body.push(text(M.left + PLOT_W / 2, M.top + 2 * PLOT_H + panelGap + 32, xLabel, { "text-anchor": "middle", fill: "#444" }));
  body.push(...legend(M.left + PLOT_W - 70, M.top + 16, policies.map((p) => [p, color(POLICY_COLOR, p)] as [string, string])));
  return svgDoc(M.left + PLOT_W + M.right, M.top + 2 * PLOT_H + panelGap + M.bottom, body);
}

export function renderScalabilityBars(rows: Row[]): string {
  return renderGroupedBars(rows, "ue_count", (a, b) => Number(a) - Number(b), "policies vs endpoint count", "endpoints");
}

export function renderTrafficModeBars(rows: Row[]): string {
  return renderGroupedBars(rows, "traffic_mode", () => 0, "policies vs traffic mode", "traffic mode");
}

export function renderFigure(kind: FigureKind, rows: Row[], opts: BurstOptions = {}): string {
  switch (kind) {
    case "pdr-vs-blockage":
      return renderPdrVsBlockage(rows);
    case "burst-dynamics":
      return renderBurstDynamics(rows, opts);
    case "scalability-bars":
      return renderScalabilityBars(rows);
    case "traffic-mode-bars":
      return renderTrafficModeBars(rows);
  }
}
