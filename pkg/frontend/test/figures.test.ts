import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { CsvError, loadCsv, type Row } from "../src/csv.js";
import {
  renderBurstDynamics,
  renderFigure,
  renderPdrVsBlockage,
  renderScalabilityBars,
  renderTrafficModeBars,
  FIGURE_KINDS,
} from "../src/figures.js";

function shipped(rel: string): string {
  return fileURLToPath(new URL(`../../results/${rel}`, import.meta.url));
}

const fig3 = loadCsv(shipped("fig3_resilience/summary.csv"));
const fig4 = loadCsv(shipped("fig4_burst/trace_burst.csv"));
const fig5 = loadCsv(shipped("fig5_scalability/summary.csv"));
const fig6 = loadCsv(shipped("fig6_traffic/summary.csv"));

function inputFor(kind: string): Row[] {
  return { "pdr-vs-blockage": fig3, "burst-dynamics": fig4, "scalability-bars": fig5, "traffic-mode-bars": fig6 }[kind]!;
}

function seriesPoints(svg: string, panel: string, cls: string): Array<[number, number]> {
  const g = svg.split(`data-panel="${panel}"`)[1];
  expect(g).toBeDefined();
  const m = g.match(new RegExp(`class="series ${cls}" points="([^"]+)"`));
  expect(m).not.toBeNull();
  return m![1].split(" ").map((p) => {
    const [x, y] = p.split(",").map(Number);
    return [x, y];
  });
}

describe("all four figure kinds", () => {
  it("render from the shipped sweep outputs without error", () => {
    for (const kind of FIGURE_KINDS) {
      const svg = renderFigure(kind, inputFor(kind));
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.endsWith("</svg>")).toBe(true);
    }
  });

  it("rerender byte-identically from the same inputs", () => {
    for (const kind of FIGURE_KINDS) {
      expect(renderFigure(kind, inputFor(kind))).toBe(renderFigure(kind, inputFor(kind)));
    }
  });
});

describe("pdr-vs-blockage", () => {
  const svg = renderPdrVsBlockage(fig3);

  it("draws one series per path mode with error bars", () => {
    expect(svg).toContain('class="series mode-dual"');
    expect(svg).toContain('class="series mode-single"');
    const errbars = svg.match(/class="errbar mode-/g) ?? [];
    expect(errbars.length).toBe(12); // 6 blockage levels x 2 modes
  });

  it("needs aggregate rows", () => {
    const seedsOnly = fig3.filter((r) => r.seed !== "mean" && r.seed !== "std");
    expect(() => renderPdrVsBlockage(seedsOnly)).toThrow(/no aggregate rows/);
  });
});

describe("burst-dynamics", () => {
  const svg = renderBurstDynamics(fig4, { cap: 8, seed: "1" });

  function capY(panelSvg: string): number {
    const m = panelSvg.match(/class="cap-line"[^/]*y1="([0-9.]+)"/);
    expect(m).not.toBeNull();
    return Number(m![1]);
  }

  it("has age and queue panels with a cap line", () => {
    expect(svg).toContain('data-panel="aoi"');
    expect(svg).toContain('data-panel="q"');
    expect(svg).toContain('class="cap-line"');
  });

  it("never lets the hybrid queue series cross the cap line", () => {
    // SVG y grows downward: crossing the cap means a point above the line,
    // i.e. y strictly below capY. Checked on every seed in the shipped trace.
    const seeds = [...new Set(fig4.map((r) => r.seed))];
    expect(seeds.length).toBe(10);
    for (const seed of seeds) {
      const s = renderBurstDynamics(fig4, { cap: 8, seed });
      const qPanel = s.split('data-panel="q"')[1];
      const y0 = capY(qPanel);
      for (const [, y] of seriesPoints(s, "q", "policy-hybrid")) {
        expect(y).toBeGreaterThanOrEqual(y0);
      }
    }
  });

  it("shows the age policy crossing the cap line, so the check bites", () => {
    const qPanel = svg.split('data-panel="q"')[1];
    const y0 = capY(qPanel);
    const above = seriesPoints(svg, "q", "policy-age").filter(([, y]) => y < y0);
    expect(above.length).toBeGreaterThan(0);
  });

  it("rejects a trace without the policy column", () => {
    const stripped = fig4.map(({ policy, ...rest }) => rest as Row);
    expect(() => renderBurstDynamics(stripped)).toThrow(/missing column\(s\) policy/);
  });

  it("rejects an absent seed", () => {
    expect(() => renderBurstDynamics(fig4, { seed: "99" })).toThrow(/seed 99 not present/);
  });
});

describe("scalability-bars", () => {
  it("draws grouped bars for every policy and endpoint count", () => {
    const svg = renderScalabilityBars(fig5);
    for (const p of ["hybrid", "queue", "age"]) {
      const bars = svg.match(new RegExp(`class="bar policy-${p}"`, "g")) ?? [];
      expect(bars.length).toBe(12); // 6 endpoint counts x 2 panels
    }
  });

  it("still renders from a single-policy CSV", () => {
    const only = fig5.filter((r) => r.policy === "hybrid");
    const svg = renderScalabilityBars(only);
    expect(svg).toContain('class="bar policy-hybrid"');
    expect(svg).not.toContain('class="bar policy-queue"');
  });
});

describe("traffic-mode-bars", () => {
  it("draws one bar group per traffic mode", () => {
    const svg = renderTrafficModeBars(fig6);
    for (const mode of ["high", "low", "mixed"]) {
      expect(svg).toContain(`>${mode}</text>`);
    }
    const bars = svg.match(/class="bar policy-/g) ?? [];
    expect(bars.length).toBe(18); // 3 modes x 3 policies x 2 panels
  });

  it("propagates CsvError for unrelated CSVs", () => {
    expect(() => renderTrafficModeBars(fig4)).toThrow(CsvError);
  });
});
