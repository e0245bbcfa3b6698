/**
 * Bindings for the `pslap` command-line tool. Everything goes through the
 * CLI's JSON interfaces; no numerics are reimplemented here, so binding
 * results are exactly what the CLI prints, field for field and bit for bit.
 */

import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { InputError } from "./errors.js";
import { runCli } from "./runner.js";

export {
  InputError,
  NumericalError,
  PslapError,
  SemanticError,
  VerificationError,
  errorForExit,
} from "./errors.js";

export interface SpectrumStats {
  max: number;
  min: number;
  mean: number;
  median: number;
  sum: number;
  std: number;
  var: number;
  count: number;
}

/** One grid threshold; field names match the CLI's sweep JSON exactly. */
export interface SweepRecord {
  t: number;
  betti: number;
  lambda_min: number | null;
  stats: SpectrumStats;
  empty: boolean;
}

export interface SweepResult {
  q: number;
  delta: number;
  grid: number[];
  records: SweepRecord[];
}

/** One mutation's feature vector; metadata field names match the CLI JSON. */
export interface FeatureResult {
  site: string;
  layout_version: string;
  n_features: number;
  grid: number[];
  delta: number;
  cutoff: number;
  elements: string[];
  empty_channels: string[];
  values: Float64Array;
}

export interface EngineInfo {
  version: string;
  layout_version: string;
  kernel_backend: string;
  kernel_backends_available: string[];
  threads: number;
  defaults: {
    cutoff: number;
    grid: number[];
    delta: number;
    elements: string[];
    tol_rel: number;
    tol_abs: number;
    n_features: number;
  };
}

export interface FeaturizeOverrides {
  cutoff?: number;
  grid?: number[];
  delta?: number;
  threads?: number;
}

export interface SpectraOptions {
  complex?: "vr" | "alpha";
  metric?: "euclidean" | "bipartite";
  /** 0-based point indices of the first bipartite set (metric: "bipartite"). */
  setA?: number[];
  q?: 0 | 1;
  grid?: number[];
  delta?: number;
  fKind?: "product_of_pairwise_distances" | "constant_one";
  tolRel?: number;
  tolAbs?: number;
}

export interface SessionOptions {
  /** Executable plus leading args; default ["pslap"]. */
  command?: readonly string[];
  /** Extra environment variables for every invocation. */
  env?: Record<string, string>;
  /** Featurize defaults applied to every call unless overridden per call. */
  featurize?: FeaturizeOverrides;
}

function requireFinite(x: number, what: string): number {
  if (typeof x !== "number" || !Number.isFinite(x)) {
    throw new InputError(`${what} must be a finite number, got ${x}`);
  }
  return x;
}

function gridFlag(grid: number[]): string {
  return grid.map((g) => String(requireFinite(g, "grid threshold"))).join(",");
}

/**
 * A handle on the CLI with a frozen configuration. All returned arrays and
 * objects are fresh copies owned by the caller.
 */
export class PslapSession {
  readonly command: readonly string[];
  readonly env?: Record<string, string>;
  readonly featurizeDefaults: Readonly<FeaturizeOverrides>;

  constructor(options: SessionOptions = {}) {
    this.command = Object.freeze([...(options.command ?? ["pslap"])]);
    this.env = options.env ? Object.freeze({ ...options.env }) : undefined;
    this.featurizeDefaults = Object.freeze({ ...(options.featurize ?? {}) });
    Object.freeze(this);
  }

  private run(args: string[]): string {
    return runCli(this.command, args, this.env).stdout;
  }

  private featurizeArgs(
    wtPath: string,
    mtPath: string,
    mutations: string[],
    overrides?: FeaturizeOverrides,
  ): string[] {
    const cfg = { ...this.featurizeDefaults, ...(overrides ?? {}) };
    const args = ["featurize", "--wt", wtPath, "--mt", mtPath, "--format", "json"];
    for (const m of mutations) {
      args.push("--mutation", m);
    }
    if (cfg.cutoff !== undefined) {
      args.push("--cutoff", String(requireFinite(cfg.cutoff, "cutoff")));
    }
    if (cfg.grid !== undefined) {
      args.push("--grid", gridFlag(cfg.grid));
    }
    if (cfg.delta !== undefined) {
      args.push("--delta", String(requireFinite(cfg.delta, "delta")));
    }
    if (cfg.threads !== undefined) {
      args.push("--threads", String(cfg.threads));
    }
    return args;
  }

  /** Feature vector for one point mutation, as a Float64Array plus layout metadata. */
  featurize(
    wtPath: string,
    mtPath: string,
    mutation: string,
    overrides?: FeaturizeOverrides,
  ): FeatureResult {
    const raw = JSON.parse(
      this.run(this.featurizeArgs(wtPath, mtPath, [mutation], overrides)),
    );
    return toFeatureResult(raw);
  }

  /** Batch variant: one result per mutation, in order. */
  featurizeBatch(
    wtPath: string,
    mtPath: string,
    mutations: string[],
    overrides?: FeaturizeOverrides,
  ): FeatureResult[] {
    if (mutations.length === 0) {
      throw new InputError("featurizeBatch needs at least one mutation");
    }
    const raw = JSON.parse(
      this.run(this.featurizeArgs(wtPath, mtPath, mutations, overrides)),
    );
    const items = Array.isArray(raw) ? raw : [raw];
    return items.map(toFeatureResult);
  }

  /**
   * Sweep a labeled point cloud over a threshold grid. `points` is n rows
   * of [x, y, z]; `charges` is n values or null for unit charges. Record
   * fields follow the CLI's sweep JSON schema.
   */
  spectra(
    points: readonly (readonly number[])[],
    charges: readonly number[] | null,
    options: SpectraOptions = {},
  ): SweepResult {
    if (points.length === 0) {
      throw new InputError("points array is empty");
    }
    if (charges !== null && charges.length !== points.length) {
      throw new InputError(
        `charges length ${charges.length} != points length ${points.length}`,
      );
    }
    const lines = points.map((row, i) => {
      if (row.length !== 3) {
        throw new InputError(`point ${i} has ${row.length} coordinates, want 3`);
      }
      const xyz = row.map((c) => String(requireFinite(c, `point ${i} coordinate`)));
      if (charges !== null) {
        xyz.push(String(requireFinite(charges[i], `charge ${i}`)));
      }
      return xyz.join(" ");
    });

    const dir = mkdtempSync(join(tmpdir(), "pslap-"));
    try {
      const pointsPath = join(dir, "points.txt");
      writeFileSync(pointsPath, lines.join("\n") + "\n");
      const args = ["spectra", "--points", pointsPath];
      if (options.complex) args.push("--complex", options.complex);
      if (options.metric) args.push("--metric", options.metric);
      if (options.setA) args.push("--set-a", options.setA.join(","));
      if (options.q !== undefined) args.push("--q", String(options.q));
      if (options.grid) args.push("--grid", gridFlag(options.grid));
      if (options.delta !== undefined) {
        args.push("--delta", String(requireFinite(options.delta, "delta")));
      }
      if (options.fKind) args.push("--f-kind", options.fKind);
      if (options.tolRel !== undefined) args.push("--tol-rel", String(options.tolRel));
      if (options.tolAbs !== undefined) args.push("--tol-abs", String(options.tolAbs));
      return JSON.parse(this.run(args)) as SweepResult;
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  }

  /** Engine version, feature-layout version, kernel backend, defaults. */
  info(): EngineInfo {
    return JSON.parse(this.run(["info", "--json"])) as EngineInfo;
  }
}

function toFeatureResult(raw: any): FeatureResult {
  if (!raw || !Array.isArray(raw.values)) {
    throw new InputError("unexpected featurize output shape");
  }
  return { ...raw, values: Float64Array.from(raw.values) };
}

let shared: PslapSession | undefined;

function sharedSession(): PslapSession {
  shared ??= new PslapSession();
  return shared;
}

export function featurize(
  wtPath: string,
  mtPath: string,
  mutation: string,
  overrides?: FeaturizeOverrides,
): FeatureResult {
  return sharedSession().featurize(wtPath, mtPath, mutation, overrides);
}

export function spectra(
  points: readonly (readonly number[])[],
  charges: readonly number[] | null,
  options: SpectraOptions = {},
): SweepResult {
  return sharedSession().spectra(points, charges, options);
}

export function info(): EngineInfo {
  return sharedSession().info();
}
