/**
 * Command-line figure builder for simulation regret CSVs.
 *
 * Usage:
 *   plot-regret --curve results/mpts.csv:MP-TS --curve results/cucb.csv \
 *               --out figure.svg [--linear-x] [--title "5-arm benchmark"]
 *
 * Each --curve takes `path` or `path:label` (label defaults to the file
 * name). The figure is written as SVG.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { parseRegretCsv } from "./csv.js";
import { Curve, renderFigure } from "./figure.js";

export interface CliArgs {
  curves: { path: string; label: string }[];
  out: string;
  logX: boolean;
  title?: string;
}

export class UsageError extends Error {}

export function parseArgs(argv: string[]): CliArgs {
  const curves: { path: string; label: string }[] = [];
  let out: string | null = null;
  let logX = true;
  let title: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${arg} needs a value`);
      return argv[++i];
    };
    switch (arg) {
      case "--curve": {
        const spec = next();
        const sep = spec.lastIndexOf(":");
        // a drive-letter-free split: `path:label`, else label from the file name
        if (sep > 1 && sep < spec.length - 1 && !spec.slice(sep + 1).includes("/")) {
          curves.push({ path: spec.slice(0, sep), label: spec.slice(sep + 1) });
        } else {
          curves.push({ path: spec, label: basename(spec).replace(/\.csv$/i, "") });
        }
        break;
      }
      case "--out":
        out = next();
        break;
      case "--linear-x":
        logX = false;
        break;
      case "--title":
        title = next();
        break;
      case "--help":
      case "-h":
        throw new UsageError("help requested");
      default:
        throw new UsageError(`unknown argument: ${arg}`);
    }
  }
  if (curves.length === 0) {
    throw new UsageError("at least one --curve is required");
  }
  if (!out) {
    throw new UsageError("--out is required");
  }
  return { curves, out, logX, title };
}

export function runCli(argv: string[]): string {
  const args = parseArgs(argv);
  const curves: Curve[] = args.curves.map(({ path, label }) => {
    let text: string;
    try {
      text = readFileSync(path, "utf-8");
    } catch (err) {
      throw new Error(`cannot read ${path}: ${(err as Error).message}`);
    }
    return { label, table: parseRegretCsv(text, path) };
  });
  const svg = renderFigure(curves, { logX: args.logX, title: args.title });
  writeFileSync(args.out, svg, "utf-8");
  return args.out;
}

const USAGE =
  "usage: plot-regret --curve <csv[:label]> [--curve ...] --out <svg> [--linear-x] [--title <t>]";

export function main(argv = process.argv.slice(2)): number {
  try {
    const path = runCli(argv);
    console.log(`wrote ${path}`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(USAGE);
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main());
}
