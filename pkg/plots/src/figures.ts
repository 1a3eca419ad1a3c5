import { existsSync, readFileSync } from "fs";
import { dirname, join } from "path";

import { SchemaError, Table, loadCsv, numericColumn, requireColumns, requireRows } from "./csv.js";
import { Chart, Style, escapeXml, fmt, histogram, label, pad } from "./svg.js";

export const KINDS = ["msd", "step-hist", "born-curve", "theta-dist", "spacing-hist", "summary"] as const;
export type Kind = (typeof KINDS)[number];

export interface FigureSpec {
  kind: Kind;
  inputs: string[];
  output: string;
  manifest?: string;
  bins: number;
  width: number;
  height: number;
  title?: string;
  /** msd only: include points while the mean squared distance stays below this */
  fitCeiling: number;
}

export const DEFAULT_SPEC = {
  bins: 40,
  width: 640,
  height: 420,
  fitCeiling: 0.15,
};

function style(spec: FigureSpec, fallback: string): Style {
  return { width: spec.width, height: spec.height, title: spec.title ?? fallback };
}

function onlyInput(spec: FigureSpec): string {
  if (spec.inputs.length !== 1) {
    throw new SchemaError(`${spec.kind} expects exactly one input file`);
  }
  return spec.inputs[0];
}

function normalPdf(x: number, std: number): number {
  return Math.exp(-(x * x) / (2 * std * std)) / (std * Math.sqrt(2 * Math.PI));
}

function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

function sampleStd(xs: number[]): number {
  const m = mean(xs);
  return Math.sqrt(mean(xs.map((x) => (x - m) * (x - m))));
}

/** Walk trajectory CSV -> mean squared distance against time with a fitted slope. */
export function renderMsd(spec: FigureSpec): string {
  const table = loadCsv(onlyInput(spec));
  requireColumns(table, ["trial", "k", "t", "theta"]);
  requireRows(table);
  const ks = numericColumn(table, "k");
  const ts = numericColumn(table, "t");
  const thetas = numericColumn(table, "theta");

  const sums = new Map<number, { t: number; total: number; n: number }>();
  for (let i = 0; i < ks.length; i++) {
    const entry = sums.get(ks[i]) ?? { t: ts[i], total: 0, n: 0 };
    entry.total += thetas[i] * thetas[i];
    entry.n += 1;
    sums.set(ks[i], entry);
  }
  const order = [...sums.keys()].sort((a, b) => a - b);
  const t = order.map((k) => sums.get(k)!.t);
  const msd = order.map((k) => sums.get(k)!.total / sums.get(k)!.n);

  const fitIdx = order.map((_, i) => i).filter((i) => order[i] > 0 && msd[i] <= spec.fitCeiling);
  let slope = 0;
  let intercept = 0;
  if (fitIdx.length >= 2) {
    const fx = fitIdx.map((i) => t[i]);
    const fy = fitIdx.map((i) => msd[i]);
    const mx = mean(fx);
    const my = mean(fy);
    let sxx = 0;
    let sxy = 0;
    for (let i = 0; i < fx.length; i++) {
      sxx += (fx[i] - mx) ** 2;
      sxy += (fx[i] - mx) * (fy[i] - my);
    }
    slope = sxy / sxx;
    intercept = my - slope * mx;
  }

  const chart = Chart.create(
    style(spec, "Mean squared projective distance"),
    pad(0, Math.max(...t)),
    pad(0, Math.max(...msd)),
  ).axes("t", "mean theta^2");
  chart.dots(t, msd, "#1f77b4");
  if (fitIdx.length >= 2) {
    const x0 = t[fitIdx[0]];
    const x1 = t[fitIdx[fitIdx.length - 1]];
    chart.line([x0, x1], [intercept + slope * x0, intercept + slope * x1], "#d62728", 1.8, "6 3");
    chart.legend([
      { text: "mean theta^2", color: "#1f77b4" },
      { text: `fit slope ${label(slope)} (${fitIdx.length} pts)`, color: "#d62728" },
    ]);
  } else {
    chart.legend([{ text: "mean theta^2 (no small-angle window to fit)", color: "#1f77b4" }]);
  }
  return chart.render();
}

function stepColumns(table: Table): string[] {
  const cols = table.columns.filter((c) => /^xi_\d+$/.test(c));
  if (cols.length === 0) {
    throw new SchemaError(
      `${table.file}: missing column(s) "xi_1"; found: ${table.columns.join(", ")}`,
    );
  }
  return cols;
}

function overlayStd(spec: FigureSpec, input: string): { std: number; source: string } | null {
  const path = spec.manifest ?? join(dirname(input), "manifest.json");
  if (!existsSync(path)) return null;
  try {
    const doc = JSON.parse(readFileSync(path, "utf8"));
    const std = doc?.config?.constrained?.step_std;
    if (typeof std === "number" && std > 0) return { std, source: path };
  } catch {
    return null;
  }
  return null;
}

/** Constrained-walk step CSV -> pooled component histogram with normal overlay. */
export function renderStepHist(spec: FigureSpec): string {
  const input = onlyInput(spec);
  const table = loadCsv(input);
  requireColumns(table, ["trial", "k"]);
  requireRows(table);
  const values = stepColumns(table).flatMap((c) => numericColumn(table, c));

  const fromManifest = overlayStd(spec, input);
  const std = fromManifest?.std ?? sampleStd(values);
  const lim = 4 * std;
  const { edges, density } = histogram(values, -lim, lim, spec.bins);
  const curveX: number[] = [];
  const curveY: number[] = [];
  for (let i = 0; i <= 120; i++) {
    const x = -lim + (2 * lim * i) / 120;
    curveX.push(x);
    curveY.push(normalPdf(x, std));
  }

  const top = Math.max(...density, ...curveY);
  const chart = Chart.create(style(spec, "Step components"), pad(-lim, lim, 0.02), pad(0, top))
    .axes("step component", "density");
  chart.bars(edges.slice(0, -1), edges.slice(1).map((e, i) => e - edges[i]), density, "#1f77b4");
  chart.line(curveX, curveY, "#d62728");
  chart.legend([
    { text: `steps (${values.length} samples)`, color: "#1f77b4" },
    {
      text: fromManifest
        ? `normal overlay, std ${label(std)} (manifest)`
        : `normal overlay, std ${label(std)} (sample)`,
      color: "#d62728",
    },
  ]);
  return chart.render();
}

/** Born-curve CSV -> empirical displacement density against the overlap curve. */
export function renderBornCurve(spec: FigureSpec): string {
  const table = loadCsv(onlyInput(spec));
  requireColumns(table, ["b", "empirical", "born"]);
  requireRows(table);
  const b = numericColumn(table, "b");
  const emp = numericColumn(table, "empirical");
  const born = numericColumn(table, "born");

  const chart = Chart.create(
    style(spec, "Transition-probability density vs displacement density"),
    pad(Math.min(...b), Math.max(...b)),
    pad(0, Math.max(...emp, ...born)),
  ).axes("b", "density");
  chart.line(b, born, "#d62728");
  chart.dots(b, emp, "#1f77b4", 3.2);
  chart.legend([
    { text: "empirical displacement density", color: "#1f77b4" },
    { text: "overlap curve (narrow-packet limit)", color: "#d62728" },
  ]);
  return chart.render();
}

/** Walk trajectory CSV -> distribution of the final projective distance. */
export function renderThetaDist(spec: FigureSpec): string {
  const table = loadCsv(onlyInput(spec));
  requireColumns(table, ["trial", "k", "t", "theta"]);
  requireRows(table);
  const ks = numericColumn(table, "k");
  const trials = numericColumn(table, "trial");
  const thetas = numericColumn(table, "theta");

  const finals = new Map<number, { k: number; theta: number }>();
  for (let i = 0; i < ks.length; i++) {
    const cur = finals.get(trials[i]);
    if (!cur || ks[i] > cur.k) finals.set(trials[i], { k: ks[i], theta: thetas[i] });
  }
  const values = [...finals.values()].map((v) => v.theta);
  const hi = Math.PI / 2;
  const { edges, density } = histogram(values, 0, hi, spec.bins);

  const chart = Chart.create(
    style(spec, "Final projective distance"), pad(0, hi, 0.02), pad(0, Math.max(...density)),
  ).axes("theta", "density");
  chart.bars(edges.slice(0, -1), edges.slice(1).map((e, i) => e - edges[i]), density, "#1f77b4");
  chart.vline(mean(values), "#d62728");
  chart.legend([
    { text: `final theta (${values.length} walks)`, color: "#1f77b4" },
    { text: `mean ${label(mean(values))}`, color: "#d62728" },
  ]);
  return chart.render();
}

/** Spacing-ratio CSV -> histogram of consecutive-gap ratios on [0, 1]. */
export function renderSpacingHist(spec: FigureSpec): string {
  const table = loadCsv(onlyInput(spec));
  requireColumns(table, ["sample", "k", "ratio"]);
  requireRows(table);
  const ratios = numericColumn(table, "ratio");
  const { edges, density } = histogram(ratios, 0, 1, spec.bins);

  const chart = Chart.create(
    style(spec, "Consecutive spacing ratios"), pad(0, 1, 0.02), pad(0, Math.max(...density)),
  ).axes("ratio", "density");
  chart.bars(edges.slice(0, -1), edges.slice(1).map((e, i) => e - edges[i]), density, "#1f77b4");
  chart.vline(mean(ratios), "#d62728");
  chart.legend([
    { text: `ratios (${ratios.length})`, color: "#1f77b4" },
    { text: `mean ${label(mean(ratios))}`, color: "#d62728" },
  ]);
  return chart.render();
}

interface ReportEntry {
  name: string;
  passed: boolean;
  p_value: number | null;
  statistic: number | null;
}

/** reports.json -> pass/fail table figure. */
export function renderSummary(spec: FigureSpec): string {
  const file = onlyInput(spec);
  let doc: { all_passed?: boolean; reports?: ReportEntry[] };
  try {
    doc = JSON.parse(readFileSync(file, "utf8"));
  } catch (e) {
    throw new SchemaError(`${file}: not valid JSON: ${(e as Error).message}`);
  }
  if (!Array.isArray(doc.reports)) {
    throw new SchemaError(`${file}: missing "reports" array; found keys: ${Object.keys(doc).join(", ")}`);
  }
  for (const r of doc.reports) {
    if (typeof r.name !== "string" || typeof r.passed !== "boolean") {
      throw new SchemaError(`${file}: each report needs "name" and "passed"`);
    }
  }

  const rowH = 20;
  const width = spec.width;
  const height = 70 + rowH * doc.reports.length;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="#fff"/>`,
    `<text x="${fmt(width / 2)}" y="24" font-size="15" text-anchor="middle" fill="#000">${escapeXml(
      spec.title ?? `Verification summary: ${doc.all_passed ? "ALL PASSED" : "FAILURES"}`,
    )}</text>`,
    `<text x="20" y="48" font-size="12" fill="#333">check</text>`,
    `<text x="${width - 150}" y="48" font-size="12" fill="#333">p-value</text>`,
    `<text x="${width - 60}" y="48" font-size="12" fill="#333">status</text>`,
    `<line x1="14" y1="54" x2="${width - 14}" y2="54" stroke="#888"/>`,
  ];
  doc.reports.forEach((r, i) => {
    const y = 70 + rowH * i;
    const color = r.passed ? "#2ca02c" : "#d62728";
    const p = typeof r.p_value === "number" ? label(r.p_value) : "-";
    parts.push(
      `<text x="20" y="${y}" font-size="12" fill="#111">${escapeXml(r.name)}</text>`,
      `<text x="${width - 150}" y="${y}" font-size="12" fill="#333">${p}</text>`,
      `<text x="${width - 60}" y="${y}" font-size="12" fill="${color}">${r.passed ? "PASS" : "FAIL"}</text>`,
    );
  });
  parts.push("</svg>", "");
  return parts.join("\n");
}

const RENDERERS: Record<Kind, (spec: FigureSpec) => string> = {
  msd: renderMsd,
  "step-hist": renderStepHist,
  "born-curve": renderBornCurve,
  "theta-dist": renderThetaDist,
  "spacing-hist": renderSpacingHist,
  summary: renderSummary,
};

/** Render a figure to an SVG string; inputs are read-only. */
export function render(spec: FigureSpec): string {
  const renderer = RENDERERS[spec.kind];
  if (!renderer) throw new SchemaError(`unknown figure kind "${spec.kind}"`);
  return renderer(spec);
}
