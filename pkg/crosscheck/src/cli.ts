#!/usr/bin/env node
// crosscheck --family F --qubits N --seed S [--p LEVELS]
// Prints a JSON report {family, n, seed, max_dev, pass}; exit 0 iff pass.

import { crosscheckRun } from './crosscheck';

function parseArgs(argv: string[]): { family: string; qubits: number; seed: number; p?: number } {
  const out: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith('--') || i + 1 >= argv.length) {
      throw new Error(`usage: crosscheck --family F --qubits N [--seed S] [--p LEVELS]`);
    }
    out[key.slice(2)] = argv[i + 1];
  }
  if (!out.family || !out.qubits) {
    throw new Error('usage: crosscheck --family F --qubits N [--seed S] [--p LEVELS]');
  }
  return {
    family: out.family,
    qubits: Number(out.qubits),
    seed: Number(out.seed ?? 0),
    p: out.p === undefined ? undefined : Number(out.p),
  };
}

function main(): number {
  try {
    const report = crosscheckRun(parseArgs(process.argv.slice(2)));
    console.log(JSON.stringify(report));
    return report.pass ? 0 : 1;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

process.exit(main());
