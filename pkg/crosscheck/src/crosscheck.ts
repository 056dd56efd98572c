// Compares the toolkit's final state against the quantum-circuit reference
// simulator on a shared generated circuit.

import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { parseRawCircuit } from './rawCircuit';
import { maxDeviation, referenceAmplitudes } from './reference';
import { GenOptions, generateRawCircuit, toolkitAmplitudes } from './toolkit';

export const PASS_THRESHOLD = 1e-10;
export const MAX_QUBITS = 20;

export type CrosscheckReport = {
  family: string;
  n: number;
  seed: number;
  max_dev: number;
  pass: boolean;
};

export function crosscheckRun(opts: GenOptions): CrosscheckReport {
  if (opts.qubits > MAX_QUBITS) {
    throw new Error(`crosscheck is limited to ${MAX_QUBITS} qubits`);
  }
  const work = mkdtempSync(join(tmpdir(), 'crosscheck-run-'));
  try {
    const rawPath = join(work, 'raw.txt');
    generateRawCircuit(opts, rawPath);
    const circuit = parseRawCircuit(readFileSync(rawPath, 'utf-8'), opts.qubits);
    const reference = referenceAmplitudes(circuit);
    const toolkit = toolkitAmplitudes(opts, rawPath);
    const dev = maxDeviation(toolkit, reference);
    return {
      family: opts.family,
      n: opts.qubits,
      seed: opts.seed,
      max_dev: dev,
      pass: dev <= PASS_THRESHOLD,
    };
  } finally {
    rmSync(work, { recursive: true, force: true });
  }
}
