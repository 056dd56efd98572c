// Pins the reference simulator to the toolkit's gate conventions: wire 0 is
// the least significant state-index bit, rotations use half angles, CP
// phases only |11>, and RZZ is diag(e^-it/2, e^+it/2, e^+it/2, e^-it/2).

import test from 'node:test';
import assert from 'node:assert/strict';
import { parseRawCircuit } from './rawCircuit';
import { maxDeviation, referenceAmplitudes } from './reference';

const INV_SQRT2 = Math.SQRT1_2;

function amps(text: string, n: number) {
  return referenceAmplitudes(parseRawCircuit(text, n));
}

function assertClose(actual: number, expected: number, eps = 1e-12) {
  assert.ok(Math.abs(actual - expected) <= eps, `${actual} != ${expected}`);
}

test('X on wire 0 lights the least significant bit', () => {
  const a = amps('X 0 0', 2);
  assertClose(a.re[0b01], 1);
  assertClose(a.re[0b10], 0);
});

test('H produces |+>', () => {
  const a = amps('H 0 0', 1);
  assertClose(a.re[0], INV_SQRT2);
  assertClose(a.re[1], INV_SQRT2);
});

test('CX uses control-first target order', () => {
  const a = amps('X 0 0\nCX 0 1 1', 2);
  assertClose(a.re[0b11], 1);
});

test('RZ is the symmetric half-angle rotation', () => {
  const theta = Math.PI / 2;
  const a = amps(`H 0 0\nRZ 0 1 ${theta}`, 1);
  assertClose(a.re[0], 0.5);
  assertClose(a.im[0], -0.5);
  assertClose(a.re[1], 0.5);
  assertClose(a.im[1], 0.5);
});

test('RX and RY follow the half-angle convention', () => {
  const rx = amps(`RX 0 0 ${Math.PI}`, 1);
  assertClose(rx.re[1], 0);
  assertClose(rx.im[1], -1);
  const ry = amps(`RY 0 0 ${Math.PI / 2}`, 1);
  assertClose(ry.re[0], Math.cos(Math.PI / 4));
  assertClose(ry.re[1], Math.sin(Math.PI / 4));
});

test('CP phases only the |11> component', () => {
  const theta = Math.PI / 3;
  const a = amps(`H 0 0\nH 1 1\nCP 0 1 2 ${theta}`, 2);
  assertClose(a.re[3], 0.5 * Math.cos(theta));
  assertClose(a.im[3], 0.5 * Math.sin(theta));
  assertClose(a.re[1], 0.5);
  assertClose(a.im[1], 0);
});

test('RZZ applies parity phases', () => {
  const theta = Math.PI / 2;
  const a = amps(`H 0 0\nH 1 1\nRZZ 0 1 2 ${theta}`, 2);
  for (const [index, sign] of [[0, -1], [1, 1], [2, 1], [3, -1]] as const) {
    assertClose(a.re[index], 0.5 * Math.cos(theta / 2));
    assertClose(a.im[index], sign * 0.5 * Math.sin(theta / 2));
  }
});

test('U is the generic one-qubit rotation', () => {
  const [theta, phi] = [1.0, 0.5];
  const a = amps(`U 0 0 ${theta} ${phi} 0.25`, 1);
  assertClose(a.re[0], Math.cos(theta / 2));
  assertClose(a.re[1], Math.sin(theta / 2) * Math.cos(phi));
  assertClose(a.im[1], Math.sin(theta / 2) * Math.sin(phi));
});

test('SWAP exchanges wire values', () => {
  const a = amps('X 0 0\nSWAP 0 1 1', 2);
  assertClose(a.re[0b10], 1);
});

test('maxDeviation reports the largest amplitude distance', () => {
  const a = amps('H 0 0', 1);
  const b = amps('X 0 0', 1);
  assertClose(maxDeviation(a, a), 0);
  assert.ok(maxDeviation(a, b) > 0.5);
});
