#!/usr/bin/env node
/**
 * plotviz <csv...> --out <image.svg> [--logy]
 *
 * Reads one or more dcio-sim run CSVs and writes a two-panel SVG with the
 * extrinsic rotation error above the translation error, one curve per
 * filter.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { CsvParseError, mergeRunLogs, parseRunLog } from "./csv.js";
import { render } from "./svg.js";

interface CliArgs {
  inputs: string[];
  out: string;
  logy: boolean;
}

export function parseArgs(argv: string[]): CliArgs {
  const inputs: string[] = [];
  let out: string | undefined;
  let logy = false;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") {
      out = argv[++i];
      if (out === undefined) throw new Error("--out requires a path");
    } else if (arg === "--logy") {
      logy = true;
    } else if (arg === "--help" || arg === "-h") {
      throw new Error(
        "usage: plotviz <csv...> --out <image.svg> [--logy]",
      );
    } else if (arg.startsWith("--")) {
      throw new Error(`unknown flag ${arg}`);
    } else {
      inputs.push(arg);
    }
  }
  if (inputs.length === 0) throw new Error("at least one CSV path required");
  if (out === undefined) throw new Error("--out <image.svg> is required");
  return { inputs, out, logy };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const logs = args.inputs.map((path) => ({
      log: parseRunLog(readFileSync(path, "utf-8"), path),
      label: basename(path).replace(/\.csv$/i, ""),
    }));
    const merged = mergeRunLogs(logs);
    const svg = render(merged, {
      logy: args.logy,
      title: "Camera-IMU extrinsic error vs time",
    });
    writeFileSync(args.out, svg + "\n", "utf-8");
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvParseError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
