import { spawnSync } from "node:child_process";

import { errorForExit, InputError } from "./errors.js";

export interface RunResult {
  stdout: string;
  stderr: string;
}

/**
 * Run one CLI invocation synchronously. `command` is the executable plus
 * any leading arguments (so `["python3", "-m", "pslap.cli"]` works as well
 * as `["pslap"]`), `args` the subcommand and flags.
 */
export function runCli(
  command: readonly string[],
  args: readonly string[],
  env?: Record<string, string>,
): RunResult {
  const [bin, ...lead] = command;
  const proc = spawnSync(bin, [...lead, ...args], {
    encoding: "utf8",
    maxBuffer: 256 * 1024 * 1024,
    env: env ? { ...process.env, ...env } : process.env,
  });
  if (proc.error) {
    throw new InputError(`could not launch ${bin}: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    throw errorForExit(proc.status ?? -1, proc.stderr ?? "");
  }
  return { stdout: proc.stdout, stderr: proc.stderr };
}
