import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import {
  errorForExit,
  InputError,
  NumericalError,
  PslapSession,
  SemanticError,
  VerificationError,
} from "../src/index.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const FIXTURES = resolve(HERE, "..", "..", "tests", "fixtures");
const WT = join(FIXTURES, "micro_wt.pqr");
const MT = join(FIXTURES, "micro_mt.pqr");

const session = new PslapSession();

/** Run the CLI directly, bypassing the bindings, for equivalence checks. */
function cliJson(args: string[]): any {
  const proc = spawnSync("pslap", args, { encoding: "utf8", maxBuffer: 1 << 28 });
  expect(proc.status).toBe(0);
  return JSON.parse(proc.stdout);
}

describe("featurize", () => {
  it("returns the CLI's output bit for bit", () => {
    const viaBinding = session.featurize(WT, MT, "A:2:Q:G");
    const direct = cliJson([
      "featurize", "--wt", WT, "--mt", MT, "--mutation", "A:2:Q:G", "--format", "json",
    ]);

    expect(viaBinding.site).toBe(direct.site);
    expect(viaBinding.layout_version).toBe(direct.layout_version);
    expect(viaBinding.n_features).toBe(direct.n_features);
    expect(viaBinding.empty_channels).toEqual(direct.empty_channels);
    expect(viaBinding.values.length).toBe(3402);
    expect(direct.values.length).toBe(3402);
    for (let i = 0; i < 3402; i++) {
      expect(Object.is(viaBinding.values[i], direct.values[i]), `slot ${i}`).toBe(true);
    }
  });

  it("agrees with the CSV emitter slot by slot", () => {
    const viaBinding = session.featurize(WT, MT, "A:2:Q:G");
    const proc = spawnSync(
      "pslap",
      ["featurize", "--wt", WT, "--mt", MT, "--mutation", "A:2:Q:G", "--format", "csv"],
      { encoding: "utf8", maxBuffer: 1 << 28 },
    );
    expect(proc.status).toBe(0);
    const [header, row] = proc.stdout.trim().split("\n");
    const cells = row.split(",");
    expect(header.split(",").length).toBe(3403);
    expect(cells[0]).toBe("A:2:Q:G");
    for (let i = 0; i < 3402; i++) {
      expect(Object.is(Number(cells[i + 1]), viaBinding.values[i]), `slot ${i}`).toBe(true);
    }
  });

  it("zeroes the difference block when both structures are identical", () => {
    const out = session.featurize(WT, WT, "A:2:Q:Q");
    const third = out.n_features / 3;
    const diff = out.values.subarray(2 * third);
    expect(diff.length).toBe(1134);
    expect(diff.every((v) => v === 0)).toBe(true);
  });

  it("rejects a malformed mutation string with a typed parse error", () => {
    expect(() => session.featurize(WT, MT, "A:39")).toThrowError(InputError);
    try {
      session.featurize(WT, MT, "A:39");
    } catch (err) {
      expect((err as InputError).exitCode).toBe(2);
    }
  });

  it("surfaces residue mismatches as semantic errors (exit 4)", () => {
    expect(() => session.featurize(WT, MT, "A:99:Q:G")).toThrowError(SemanticError);
  });

  it("honors per-call overrides", () => {
    const out = session.featurize(WT, MT, "A:2:Q:G", { grid: [4, 6] });
    expect(out.grid).toEqual([4, 6]);
    expect(out.n_features).toBe(out.values.length);
    expect(out.values.length).toBe(3 * 2 * 9 * (2 * 9));
  });
});

describe("spectra", () => {
  const twoPoints = [
    [0, 0, 0],
    [5, 0, 0],
  ];

  it("matches the CLI on a shared fixture file, field for field", () => {
    const viaBinding = session.spectra(twoPoints, [1, 0.01], {
      grid: [3, 4, 5, 6, 7, 8, 9],
    });

    const dir = mkdtempSync(join(tmpdir(), "pslap-test-"));
    try {
      const path = join(dir, "points.txt");
      writeFileSync(path, "0 0 0 1\n5 0 0 0.01\n");
      const direct = cliJson([
        "spectra", "--points", path, "--grid", "3,4,5,6,7,8,9",
      ]);
      expect(JSON.stringify(viaBinding)).toBe(JSON.stringify(direct));
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  });

  it("reproduces the two-point betti trace", () => {
    const out = session.spectra(twoPoints, [1, 0.01], { grid: [3, 4, 5, 6, 7, 8, 9] });
    expect(out.records.map((r) => r.betti)).toEqual([2, 2, 1, 1, 1, 1, 1]);
    expect(out.records[0].lambda_min).toBeNull();
    expect(out.records[2].stats.count).toBe(1);
  });

  it("rejects an empty cloud before launching anything", () => {
    expect(() => session.spectra([], null)).toThrowError(InputError);
  });

  it("rejects mismatched charge shapes", () => {
    expect(() => session.spectra(twoPoints, [1])).toThrowError(InputError);
    expect(() => session.spectra([[0, 0], [1, 0]] as any, null)).toThrowError(InputError);
  });

  it("counts components like a union-find under unit charges", () => {
    const pts = [
      [0, 0, 0],
      [2, 0, 0],
      [4, 0, 0],
      [9, 0, 0],
    ];
    const grid = [1, 2, 2.5, 5];
    const out = session.spectra(pts, null, { grid, fKind: "constant_one" });

    const expected = grid.map((t) => {
      const parent = pts.map((_, i) => i);
      const find = (i: number): number => (parent[i] === i ? i : (parent[i] = find(parent[i])));
      for (let i = 0; i < pts.length; i++) {
        for (let j = i + 1; j < pts.length; j++) {
          const d = Math.hypot(
            pts[i][0] - pts[j][0], pts[i][1] - pts[j][1], pts[i][2] - pts[j][2],
          );
          if (d <= t) parent[find(i)] = find(j);
        }
      }
      return new Set(pts.map((_, i) => find(i))).size;
    });
    expect(out.records.map((r) => r.betti)).toEqual(expected);
  });
});

describe("session configuration", () => {
  it("is frozen after construction", () => {
    const s = new PslapSession({ featurize: { cutoff: 12 } });
    expect(Object.isFrozen(s)).toBe(true);
    expect(Object.isFrozen(s.featurizeDefaults)).toBe(true);
  });

  it("passes environment through (pure-python backend gives identical features)", () => {
    const pure = new PslapSession({ env: { PSLAP_PURE_PYTHON: "1" } });
    expect(pure.info().kernel_backend).toBe("python");

    const a = session.featurize(WT, MT, "A:2:Q:G").values;
    const b = pure.featurize(WT, MT, "A:2:Q:G").values;
    for (let i = 0; i < a.length; i++) {
      expect(Object.is(a[i], b[i]), `slot ${i}`).toBe(true);
    }
  });
});

describe("introspection and errors", () => {
  it("reports version, layout version, and feature length", () => {
    const meta = session.info();
    expect(meta.version).toMatch(/^\d+\.\d+\.\d+$/);
    expect(meta.layout_version).toBe("1");
    expect(meta.defaults.n_features).toBe(3402);
  });

  it("maps every exit code to exactly one error class", () => {
    expect(errorForExit(1, "x")).toBeInstanceOf(VerificationError);
    expect(errorForExit(2, "x")).toBeInstanceOf(InputError);
    expect(errorForExit(3, "x")).toBeInstanceOf(NumericalError);
    expect(errorForExit(4, "x")).toBeInstanceOf(SemanticError);
    for (const code of [1, 2, 3, 4]) {
      expect(errorForExit(code, "x").exitCode).toBe(code);
    }
  });

  it("raises InputError for unreadable files (exit 2)", () => {
    expect(() => session.featurize("/nonexistent.pqr", MT, "A:2:Q:G")).toThrowError(
      InputError,
    );
  });
});
