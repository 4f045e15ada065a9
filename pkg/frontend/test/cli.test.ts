import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { main, parseArgs, runCli, UsageError } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");
const MPTS = join(FIXTURES, "scenario1_mp-ts_small.csv");
const CUCB = join(FIXTURES, "scenario1_cucb_small.csv");

let workdir: string;
beforeEach(() => {
  workdir = mkdtempSync(join(tmpdir(), "plots-"));
});
afterEach(() => {
  rmSync(workdir, { recursive: true, force: true });
});

describe("parseArgs", () => {
  it("splits path:label curve specs and defaults labels", () => {
    const args = parseArgs(["--curve", `${MPTS}:MP-TS`, "--curve", CUCB, "--out", "x.svg"]);
    expect(args.curves[0]).toEqual({ path: MPTS, label: "MP-TS" });
    expect(args.curves[1].label).toBe("scenario1_cucb_small");
    expect(args.logX).toBe(true);
  });

  it("requires at least one curve and an output path", () => {
    expect(() => parseArgs(["--out", "x.svg"])).toThrow(UsageError);
    expect(() => parseArgs(["--curve", MPTS])).toThrow(UsageError);
  });

  it("rejects unknown flags", () => {
    expect(() => parseArgs(["--curve", MPTS, "--out", "x", "--wat"])).toThrow(UsageError);
  });
});

describe("runCli", () => {
  it("writes an svg figure from real harness output", () => {
    const out = join(workdir, "fig.svg");
    runCli(["--curve", `${MPTS}:MP-TS`, "--curve", `${CUCB}:CUCB`, "--out", out]);
    expect(existsSync(out)).toBe(true);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain('data-label="MP-TS"');
    expect(svg).toContain('class="lower-bound"');
  });

  it("fails cleanly on a missing file", () => {
    expect(() => runCli(["--curve", join(workdir, "nope.csv"), "--out", "x.svg"])).toThrow(
      /cannot read/,
    );
  });
});

describe("main", () => {
  it("returns 0 on success, 2 on usage errors, 1 on data errors", () => {
    const out = join(workdir, "fig.svg");
    expect(main(["--curve", MPTS, "--out", out])).toBe(0);
    expect(main([])).toBe(2);
    expect(main(["--curve", join(workdir, "nope.csv"), "--out", out])).toBe(1);
  });
});
