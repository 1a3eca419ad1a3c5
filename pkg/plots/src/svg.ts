/**
 * Minimal deterministic SVG chart primitives.
 *
 * Everything is plain string assembly with fixed numeric formatting, so
 * byte-identical inputs and styling yield byte-identical files.
 */

export interface Style {
  width: number;
  height: number;
  title: string;
}

export const MARGIN = { top: 34, right: 16, bottom: 42, left: 58 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const r = Math.round(x * 100) / 100;
  const s = r.toFixed(2).replace(/\.?0+$/, "");
  return s === "-0" ? "0" : s;
}

export function label(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1e5 || a < 1e-4) return x.toExponential(1);
  const s = x.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  at(x: number): number {
    const t = this.d1 === this.d0 ? 0.5 : (x - this.d0) / (this.d1 - this.d0);
    return this.r0 + t * (this.r1 - this.r0);
  }

  ticks(count = 6): number[] {
    const span = this.d1 - this.d0;
    if (span <= 0) return [this.d0];
    const raw = span / count;
    const mag = Math.pow(10, Math.floor(Math.log10(raw)));
    const norm = raw / mag;
    const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
    const out: number[] = [];
    for (let v = Math.ceil(this.d0 / step) * step; v <= this.d1 + 1e-12 * span; v += step) {
      out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
    }
    return out;
  }
}

export function pad(lo: number, hi: number, frac = 0.05): [number, number] {
  if (lo === hi) {
    const d = lo === 0 ? 1 : Math.abs(lo) * 0.5;
    return [lo - d, hi + d];
  }
  const d = (hi - lo) * frac;
  return [lo - d, hi + d];
}

export class Chart {
  private parts: string[] = [];

  constructor(
    readonly style: Style,
    readonly x: LinearScale,
    readonly y: LinearScale,
  ) {}

  static create(
    style: Style,
    xDomain: [number, number],
    yDomain: [number, number],
  ): Chart {
    const x = new LinearScale(xDomain[0], xDomain[1], MARGIN.left, style.width - MARGIN.right);
    const y = new LinearScale(yDomain[0], yDomain[1], style.height - MARGIN.bottom, MARGIN.top);
    return new Chart(style, x, y);
  }

  axes(xLabel: string, yLabel: string): this {
    const { width, height } = this.style;
    const bottom = height - MARGIN.bottom;
    this.parts.push(
      `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${width - MARGIN.left - MARGIN.right}" ` +
        `height="${bottom - MARGIN.top}" fill="none" stroke="#888" stroke-width="1"/>`,
    );
    for (const t of this.x.ticks()) {
      const px = fmt(this.x.at(t));
      this.parts.push(
        `<line x1="${px}" y1="${bottom}" x2="${px}" y2="${bottom + 5}" stroke="#888"/>`,
        `<text x="${px}" y="${bottom + 18}" font-size="11" text-anchor="middle" fill="#333">${label(t)}</text>`,
      );
    }
    for (const t of this.y.ticks()) {
      const py = fmt(this.y.at(t));
      this.parts.push(
        `<line x1="${MARGIN.left - 5}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="#888"/>`,
        `<text x="${MARGIN.left - 8}" y="${py}" font-size="11" text-anchor="end" dominant-baseline="middle" fill="#333">${label(t)}</text>`,
      );
    }
    this.parts.push(
      `<text x="${fmt((MARGIN.left + width - MARGIN.right) / 2)}" y="${height - 8}" font-size="12" text-anchor="middle" fill="#111">${escapeXml(xLabel)}</text>`,
      `<text x="14" y="${fmt((MARGIN.top + bottom) / 2)}" font-size="12" text-anchor="middle" fill="#111" transform="rotate(-90 14 ${fmt((MARGIN.top + bottom) / 2)})">${escapeXml(yLabel)}</text>`,
      `<text x="${fmt(width / 2)}" y="20" font-size="14" text-anchor="middle" fill="#000">${escapeXml(this.style.title)}</text>`,
    );
    return this;
  }

  bars(xs: number[], widths: number[], heights: number[], color: string): this {
    const y0 = this.y.at(Math.max(this.y.d0, 0));
    for (let i = 0; i < xs.length; i++) {
      const x0 = this.x.at(xs[i]);
      const x1 = this.x.at(xs[i] + widths[i]);
      const yt = this.y.at(heights[i]);
      const h = y0 - yt;
      if (h <= 0) continue;
      this.parts.push(
        `<rect x="${fmt(x0)}" y="${fmt(yt)}" width="${fmt(x1 - x0)}" height="${fmt(h)}" ` +
          `fill="${color}" fill-opacity="0.65" stroke="#fff" stroke-width="0.5"/>`,
      );
    }
    return this;
  }

  line(xs: number[], ys: number[], color: string, width = 1.8, dash = ""): this {
    const pts = xs.map((x, i) => `${fmt(this.x.at(x))},${fmt(this.y.at(ys[i]))}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>`,
    );
    return this;
  }

  dots(xs: number[], ys: number[], color: string, r = 2.6): this {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${fmt(this.x.at(xs[i]))}" cy="${fmt(this.y.at(ys[i]))}" r="${r}" fill="${color}"/>`,
      );
    }
    return this;
  }

  vline(x: number, color: string, dash = "4 3"): this {
    const px = fmt(this.x.at(x));
    this.parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${this.style.height - MARGIN.bottom}" ` +
        `stroke="${color}" stroke-width="1.2" stroke-dasharray="${dash}"/>`,
    );
    return this;
  }

  legend(entries: { text: string; color: string }[]): this {
    const x = MARGIN.left + 10;
    entries.forEach((e, i) => {
      const y = MARGIN.top + 14 + 16 * i;
      this.parts.push(
        `<rect x="${x}" y="${y - 9}" width="10" height="10" fill="${e.color}"/>`,
        `<text x="${x + 15}" y="${y}" font-size="11" fill="#111">${escapeXml(e.text)}</text>`,
      );
    });
    return this;
  }

  render(): string {
    const { width, height } = this.style;
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">\n<rect width="${width}" height="${height}" fill="#fff"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function histogram(
  values: number[],
  lo: number,
  hi: number,
  bins: number,
): { edges: number[]; density: number[] } {
  const edges: number[] = [];
  for (let i = 0; i <= bins; i++) edges.push(lo + ((hi - lo) * i) / bins);
  const counts = new Array<number>(bins).fill(0);
  for (const v of values) {
    if (v < lo || v > hi) continue;
    const idx = Math.min(bins - 1, Math.floor(((v - lo) / (hi - lo)) * bins));
    counts[idx] += 1;
  }
  const width = (hi - lo) / bins;
  const denom = values.length * width;
  return { edges, density: counts.map((c) => (denom > 0 ? c / denom : 0)) };
}
