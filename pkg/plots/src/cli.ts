#!/usr/bin/env node
/**
 * plots <kind> --in <file> [--out <file>] [options]
 *
 * Kinds: msd, step-hist, born-curve, theta-dist, spacing-hist, summary.
 * Exit codes: 0 ok, 2 schema violation (message names the offending
 * columns), 1 any other error. The output file is only written on success.
 */

import { writeFileSync } from "fs";
import { parseArgs } from "util";

import { SchemaError } from "./csv.js";
import { DEFAULT_SPEC, FigureSpec, KINDS, Kind, render } from "./figures.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string", multiple: true },
        out: { type: "string" },
        manifest: { type: "string" },
        bins: { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
        title: { type: "string" },
        "fit-ceiling": { type: "string" },
      },
    });
  } catch (e) {
    console.error((e as Error).message);
    return 1;
  }
  const [kind] = parsed.positionals;
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    console.error(`usage: plots <${KINDS.join("|")}> --in <file> --out <file>`);
    return 1;
  }
  const inputs = parsed.values.in ?? [];
  if (inputs.length === 0) {
    console.error("missing --in <file>");
    return 1;
  }
  const out = parsed.values.out;
  if (!out) {
    console.error("missing --out <file>");
    return 1;
  }

  const num = (v: string | undefined, fallback: number): number => {
    if (v === undefined) return fallback;
    const x = Number(v);
    if (!Number.isFinite(x) || x <= 0) throw new SchemaError(`invalid numeric option: ${v}`);
    return x;
  };

  try {
    const spec: FigureSpec = {
      kind: kind as Kind,
      inputs,
      output: out,
      manifest: parsed.values.manifest,
      bins: Math.round(num(parsed.values.bins, DEFAULT_SPEC.bins)),
      width: Math.round(num(parsed.values.width, DEFAULT_SPEC.width)),
      height: Math.round(num(parsed.values.height, DEFAULT_SPEC.height)),
      title: parsed.values.title,
      fitCeiling: num(parsed.values["fit-ceiling"], DEFAULT_SPEC.fitCeiling),
    };
    const svg = render(spec);
    writeFileSync(out, svg);
    console.error(`wrote ${out}`);
    return 0;
  } catch (e) {
    console.error((e as Error).message);
    return e instanceof SchemaError ? 2 : 1;
  }
}

process.exit(main(process.argv.slice(2)));
