import { describe, expect, it } from "vitest";

import { EXPECTED_HEADER, parseRunLog } from "../src/csv.js";
import { render } from "../src/svg.js";
import { parseArgs } from "../src/cli.js";

function sampleLog(filters: string[], steps = 20) {
  const lines = [EXPECTED_HEADER];
  for (let i = 0; i <= steps; i++) {
    const t = i * 0.1;
    for (const f of filters) {
      const decay = Math.exp(-t) * (f === "mfg-iekf" ? 0.5 : 1.0);
      lines.push(
        `${t},${f},0,0,0,${0.3 * decay},${0.2 * decay},${0.01 * decay}`,
      );
    }
  }
  lines.push("");
  return parseRunLog(lines.join("\n"));
}

describe("render", () => {
  it("draws two panels with one curve per filter and a legend", () => {
    const svg = render(sampleLog(["mekf", "iekf", "mfg-iekf"]));
    expect(svg).toContain("<svg");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(6); // 3 filters x 2 panels
    expect(svg).toContain("rotational error [rad]");
    expect(svg).toContain("translational error [m]");
    expect(svg).toContain("time [s]");
    expect(svg).toContain("mfg-iekf");
  });

  it("handles a header-only log without crashing", () => {
    const svg = render(parseRunLog(EXPECTED_HEADER + "\n"));
    expect(svg).toContain("<svg");
    expect(svg).not.toContain("<polyline");
  });

  it("renders a single-filter log with one curve per panel", () => {
    const svg = render(sampleLog(["mekf"]));
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
  });

  it("is a pure function of its input", () => {
    const log = sampleLog(["mekf", "mfg-iekf"]);
    expect(render(log)).toBe(render(log));
  });

  it("supports a log-scale y axis and drops non-positive samples", () => {
    const lines = [EXPECTED_HEADER];
    lines.push(`0,mekf,0,0,0,0,0,0`); // zero error: no log-scale point
    lines.push(`0.1,mekf,0,0,0,0.1,0.2,0`);
    lines.push(`0.2,mekf,0,0,0,0.05,0.1,0`);
    lines.push("");
    const svg = render(parseRunLog(lines.join("\n")), { logy: true });
    expect(svg).toContain("<svg");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
  });
});

describe("parseArgs", () => {
  it("parses inputs, --out and --logy", () => {
    const args = parseArgs(["a.csv", "b.csv", "--out", "fig.svg", "--logy"]);
    expect(args.inputs).toEqual(["a.csv", "b.csv"]);
    expect(args.out).toBe("fig.svg");
    expect(args.logy).toBe(true);
  });

  it("requires at least one input and an output path", () => {
    expect(() => parseArgs(["--out", "x.svg"])).toThrowError(/CSV path/);
    expect(() => parseArgs(["a.csv"])).toThrowError(/--out/);
  });

  it("rejects unknown flags", () => {
    expect(() => parseArgs(["a.csv", "--out", "x", "--wat"])).toThrowError(
      /unknown flag/,
    );
  });
});
