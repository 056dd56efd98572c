// Runs a parsed raw circuit through the quantum-circuit reference simulator
// using the same matrix conventions as the toolkit (Qiskit-style half-angle
// rotations, controlled-phase via cu1, RZZ via zz). Wire 0 is the least
// significant bit of the state index on both sides, so amplitude arrays
// line up index for index.

import QuantumCircuit from 'quantum-circuit';
import { RawCircuit, RawGate } from './rawCircuit';

export type Amplitudes = {
  re: Float64Array;
  im: Float64Array;
};

function addGate(circuit: any, gate: RawGate): void {
  const [a, b] = gate.targets;
  switch (gate.kind) {
    case 'H':
      circuit.addGate('h', -1, [a]);
      break;
    case 'X':
      circuit.addGate('x', -1, [a]);
      break;
    case 'U':
      circuit.addGate('u3', -1, [a], {
        params: { theta: gate.params[0], phi: gate.params[1], lambda: gate.params[2] },
      });
      break;
    case 'RX':
      circuit.addGate('rx', -1, [a], { params: { theta: gate.params[0] } });
      break;
    case 'RY':
      circuit.addGate('ry', -1, [a], { params: { theta: gate.params[0] } });
      break;
    case 'RZ':
      circuit.addGate('rz', -1, [a], { params: { phi: gate.params[0] } });
      break;
    case 'CX':
      circuit.addGate('cx', -1, [a, b]);
      break;
    case 'CP':
      circuit.addGate('cu1', -1, [a, b], { params: { lambda: gate.params[0] } });
      break;
    case 'SWAP':
      circuit.addGate('swap', -1, [a, b]);
      break;
    case 'RZZ':
      circuit.addGate('zz', -1, [a, b], { params: { theta: gate.params[0] } });
      break;
    default:
      throw new Error(`no reference mapping for gate kind ${gate.kind}`);
  }
}

export function referenceAmplitudes(circuit: RawCircuit): Amplitudes {
  const qc = new QuantumCircuit(circuit.numQubits);
  for (const gate of circuit.gates) {
    addGate(qc, gate);
  }
  qc.run();
  const size = 1 << circuit.numQubits;
  const re = new Float64Array(size);
  const im = new Float64Array(size);
  for (const [index, value] of Object.entries(qc.state as Record<string, any>)) {
    const i = Number(index);
    re[i] = value.re;
    im[i] = value.im;
  }
  return { re, im };
}

export function maxDeviation(a: Amplitudes, b: Amplitudes): number {
  if (a.re.length !== b.re.length) {
    throw new Error(`amplitude count mismatch: ${a.re.length} vs ${b.re.length}`);
  }
  let worst = 0;
  for (let i = 0; i < a.re.length; i++) {
    const dev = Math.hypot(a.re[i] - b.re[i], a.im[i] - b.im[i]);
    if (dev > worst) worst = dev;
  }
  return worst;
}
