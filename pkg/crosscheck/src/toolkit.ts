// Drives the simulation toolkit strictly through its command-line surface
// and file formats: gen writes the raw circuit, finder optimizes it, and
// Quokka executes it and dumps logical amplitudes to a file.

import { spawnSync } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { Amplitudes } from './reference';

export type GenOptions = {
  family: string;
  qubits: number;
  seed: number;
  p?: number;
};

function run(command: string, args: string[]): string {
  const result = spawnSync(command, args, { encoding: 'utf-8', maxBuffer: 1 << 28 });
  if (result.error) {
    throw new Error(`${command} failed to start: ${result.error.message}`);
  }
  if (result.status !== 0) {
    throw new Error(`${command} ${args.join(' ')} exited ${result.status}: ${result.stderr}`);
  }
  return result.stdout;
}

export function generateRawCircuit(opts: GenOptions, outPath: string): void {
  const args = ['gen', '--family', opts.family, '--qubits', String(opts.qubits),
    '--seed', String(opts.seed), '--out', outPath];
  if (opts.p !== undefined) {
    args.push('--p', String(opts.p));
  }
  run('quokka', args);
}

export function toolkitAmplitudes(opts: GenOptions, rawPath: string): Amplitudes {
  const work = mkdtempSync(join(tmpdir(), 'crosscheck-'));
  try {
    const n = opts.qubits;
    const chunk = Math.min(10, n);
    const optPath = join(work, 'optimized.txt');
    writeFileSync(optPath, run('finder', [rawPath, String(chunk), String(n), String(n), '1', '1', '0', '0']));
    const iniPath = join(work, 'config.ini');
    writeFileSync(iniPath, `[system]\ntotal_qbit=${n}\nrank_qbit=0\nbuffer_qbit=${n}\n`);
    const ampsPath = join(work, 'amps.txt');
    run('Quokka', ['-i', iniPath, '-c', optPath,
      '--amps', String(1 << n), '--amps-file', ampsPath]);
    const size = 1 << n;
    const re = new Float64Array(size);
    const im = new Float64Array(size);
    const lines = readFileSync(ampsPath, 'utf-8').split('\n').filter((l) => l.trim());
    if (lines.length !== size) {
      throw new Error(`expected ${size} amplitudes, got ${lines.length}`);
    }
    lines.forEach((line, i) => {
      const [a, b] = line.trim().split(/\s+/).map(Number);
      re[i] = a;
      im[i] = b;
    });
    return { re, im };
  } finally {
    rmSync(work, { recursive: true, force: true });
  }
}
