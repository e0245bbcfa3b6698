/**
 * Typed errors mirroring the CLI's exit-code taxonomy. Every nonzero exit
 * becomes exactly one of these, so callers can switch on the class (or on
 * `exitCode`) without parsing stderr.
 */

export class PslapError extends Error {
  readonly exitCode: number;

  constructor(message: string, exitCode: number) {
    super(message);
    this.name = new.target.name;
    this.exitCode = exitCode;
  }
}

/** Exit 1: the randomized self-verification found an engine/oracle mismatch. */
export class VerificationError extends PslapError {
  constructor(message: string) {
    super(message, 1);
  }
}

/** Exit 2: unreadable or malformed input, bad flags, bad shapes. */
export class InputError extends PslapError {
  constructor(message: string) {
    super(message, 2);
  }
}

/** Exit 3: assembly or diagonalization failed numerically. */
export class NumericalError extends PslapError {
  constructor(message: string) {
    super(message, 3);
  }
}

/** Exit 4: inputs parsed fine but disagree semantically (wrong residue etc). */
export class SemanticError extends PslapError {
  constructor(message: string) {
    super(message, 4);
  }
}

export function errorForExit(code: number, stderr: string): PslapError {
  const message = stderr.trim() || `pslap exited with code ${code}`;
  switch (code) {
    case 1:
      return new VerificationError(message);
    case 2:
      return new InputError(message);
    case 3:
      return new NumericalError(message);
    case 4:
      return new SemanticError(message);
    default:
      return new PslapError(message, code);
  }
}
