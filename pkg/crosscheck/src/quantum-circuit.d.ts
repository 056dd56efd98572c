declare module 'quantum-circuit' {
  class QuantumCircuit {
    constructor(numQubits: number);
    state: Record<string, { re: number; im: number }>;
    basicGates: Record<string, unknown>;
    addGate(name: string, column: number, wires: number[],
            options?: { params?: Record<string, number> }): void;
    run(): void;
  }
  export = QuantumCircuit;
}
