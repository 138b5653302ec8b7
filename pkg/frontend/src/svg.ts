// String-based SVG assembly. Coordinates are fixed to two decimals so a
// rerender from identical inputs is byte-identical.

export type Attrs = Record<string, string | number>;

export function fmt(x: number): string {
  return x.toFixed(2);
}

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join("");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  if (children.length === 0) {
    return `<${tag}${attrString(attrs)}/>`;
  }
  return `<${tag}${attrString(attrs)}>${children.join("")}</${tag}>`;
}

export function text(x: number, y: number, s: string, attrs: Attrs = {}): string {
  const esc = s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
  return `<text${attrString({ x, y, ...attrs })}>${esc}</text>`;
}

export function svgDoc(width: number, height: number, body: string[]): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
    ` viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`;
  return [head, ...body, "</svg>"].join("\n");
}

export function polylinePoints(pts: Array<[number, number]>): string {
  return pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
}

export interface LinearScale {
  (v: number): number;
  ticks(n: number): number[];
}

// Horizontal axis with tick marks and labels under y0.
export function axisBottom(scale: LinearScale, y0: number, nTicks = 6): string[] {
  const out: string[] = [];
  for (const t of scale.ticks(nTicks)) {
    const x = scale(t);
    out.push(el("line", { x1: x, y1: y0, x2: x, y2: y0 + 4, stroke: "#444" }));
    out.push(text(x, y0 + 15, String(t), { "text-anchor": "middle", fill: "#444" }));
  }
  return out;
}

// Vertical axis with tick marks, labels, and faint grid lines across [x0, x1].
export function axisLeft(scale: LinearScale, x0: number, x1: number, nTicks = 5): string[] {
  const out: string[] = [];
  for (const t of scale.ticks(nTicks)) {
    const y = scale(t);
    out.push(el("line", { x1: x0, y1: y, x2: x1, y2: y, stroke: "#ddd" }));
    out.push(el("line", { x1: x0 - 4, y1: y, x2: x0, y2: y, stroke: "#444" }));
    out.push(text(x0 - 7, y + 3.5, String(t), { "text-anchor": "end", fill: "#444" }));
  }
  return out;
}

export function frame(x0: number, y0: number, x1: number, y1: number): string[] {
  return [
    el("line", { x1: x0, y1, x2: x1, y2: y1, stroke: "#444" }),
    el("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#444" }),
  ];
}

export function legend(x: number, y: number, entries: Array<[string, string]>): string[] {
  const out: string[] = [];
  entries.forEach(([label, color], i) => {
    const ly = y + i * 16;
    out.push(el("rect", { x, y: ly - 8, width: 12, height: 8, fill: color }));
    out.push(text(x + 17, ly, label, { fill: "#222" }));
  });
  return out;
}
