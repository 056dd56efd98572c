// Parser for the toolkit's raw circuit text format:
//   [kind] [targets...] [id] [params...]
// Parametric gates may omit their angles; the toolkit's default is pi/4.

export const DEFAULT_ANGLE = Math.PI / 4;

export type RawGate = {
  kind: string;
  targets: number[];
  id: number;
  params: number[];
};

export type RawCircuit = {
  numQubits: number;
  gates: RawGate[];
};

const ARITY: Record<string, number> = {
  H: 1, X: 1, U: 1, RX: 1, RY: 1, RZ: 1,
  CX: 2, CP: 2, SWAP: 2, RZZ: 2,
};

const NUM_PARAMS: Record<string, number> = {
  H: 0, X: 0, CX: 0, SWAP: 0,
  CP: 1, RX: 1, RY: 1, RZ: 1, RZZ: 1, U: 3,
};

export function parseRawCircuit(text: string, numQubits: number): RawCircuit {
  const gates: RawGate[] = [];
  const lines = text.split(/\r?\n/);
  for (let lineNo = 1; lineNo <= lines.length; lineNo++) {
    const tokens = lines[lineNo - 1].trim().split(/\s+/).filter((t) => t.length > 0);
    if (tokens.length === 0) continue;
    const kind = tokens[0];
    const arity = ARITY[kind];
    if (arity === undefined) {
      throw new Error(`line ${lineNo}: unknown gate symbol ${kind}`);
    }
    const nParams = NUM_PARAMS[kind];
    if (tokens.length !== 1 + arity + 1 && tokens.length !== 1 + arity + 1 + nParams) {
      throw new Error(`line ${lineNo}: wrong token count for ${kind}`);
    }
    const targets = tokens.slice(1, 1 + arity).map(Number);
    for (const q of targets) {
      if (!Number.isInteger(q) || q < 0 || q >= numQubits) {
        throw new Error(`line ${lineNo}: qubit index ${q} out of range`);
      }
    }
    const id = Number(tokens[1 + arity]);
    const paramTokens = tokens.slice(1 + arity + 1);
    const params = paramTokens.length
      ? paramTokens.map(Number)
      : new Array(nParams).fill(DEFAULT_ANGLE);
    gates.push({ kind, targets, id, params });
  }
  return { numQubits, gates };
}
