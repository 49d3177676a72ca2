import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { parseRunLog } from "../src/csv.js";
import { render } from "../src/svg.js";

const here = dirname(fileURLToPath(import.meta.url));

describe("default-scenario log excerpt", () => {
  it("parses and renders the real simulator output", () => {
    const text = readFileSync(
      join(here, "fixtures", "default_run_excerpt.csv"),
      "utf-8",
    );
    const log = parseRunLog(text, "default_run_excerpt.csv");
    expect(log.filters).toEqual(["mekf", "iekf", "mfg-iekf"]);
    const svg = render(log, { logy: true });
    expect(svg).toContain("rotational error [rad]");
    expect(svg).toContain("translational error [m]");
    // one curve per filter per panel (log scale may split segments, so
    // at least one polyline per filter/panel pair)
    expect((svg.match(/<polyline/g) ?? []).length).toBeGreaterThanOrEqual(6);
  });
});
