import test from 'node:test';
import assert from 'node:assert/strict';
import { DEFAULT_ANGLE, parseRawCircuit } from './rawCircuit';

test('parses a plain gate line', () => {
  const c = parseRawCircuit('H 0 0', 4);
  assert.deepEqual(c.gates, [{ kind: 'H', targets: [0], id: 0, params: [] }]);
});

test('fills the default angle when params are omitted', () => {
  const c = parseRawCircuit('RZZ 2 4 2', 8);
  assert.deepEqual(c.gates[0].targets, [2, 4]);
  assert.deepEqual(c.gates[0].params, [DEFAULT_ANGLE]);
});

test('keeps explicit parameters', () => {
  const c = parseRawCircuit('U 1 0 0.25 0.5 0.75', 2);
  assert.deepEqual(c.gates[0].params, [0.25, 0.5, 0.75]);
});

test('skips blank lines', () => {
  const c = parseRawCircuit('H 0 0\n\nX 1 1\n', 2);
  assert.equal(c.gates.length, 2);
});

test('rejects unknown gates and bad indices', () => {
  assert.throws(() => parseRawCircuit('FOO 0 0', 2), /unknown gate/);
  assert.throws(() => parseRawCircuit('H 9 0', 2), /out of range/);
  assert.throws(() => parseRawCircuit('H 0 0 1 2', 2), /token count/);
});
