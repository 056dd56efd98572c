"""
Deterministic benchmark circuit generators.

Families: gate layers (one gate of a given kind per qubit), QFT, QAOA on
the complete graph, Bernstein-Vazirani, and seeded stand-ins for the
hidden-shift / quantum-volume / supremacy / variational benchmarks whose
31-qubit gate counts land within 10% of the published workloads.
"""
from __future__ import annotations

import math

import numpy as np

from .circuit import Gate, GateKind, RawCircuit, default_params

GATE_FAMILIES = ("h", "u", "x", "cx", "cp", "swap", "rx", "ry", "rz", "rzz")
CIRCUIT_FAMILIES = ("bv", "hs", "qaoa", "qft", "qv", "sc", "vc")
ALL_FAMILIES = CIRCUIT_FAMILIES + GATE_FAMILIES

_TWO_PI = 2 * math.pi


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.gates: list[Gate] = []

    def add(self, kind: GateKind, targets: tuple[int, ...], params: tuple = ()) -> None:
        self.gates.append(Gate(kind, targets, len(self.gates), params))

    def circuit(self) -> RawCircuit:
        return RawCircuit(self.n, tuple(self.gates))


def _angles(rng: np.random.Generator, count: int) -> tuple[float, ...]:
    return tuple(float(a) for a in rng.uniform(0.0, _TWO_PI, size=count))


def gen_gate_layer(kind: GateKind, n: int, seed: int = 0) -> RawCircuit:
    """One gate of `kind` per qubit; two-qubit kinds pair q with (q+1) mod n."""
    arity = 2 if kind in (GateKind.CX, GateKind.CP, GateKind.SWAP, GateKind.RZZ) else 1
    if n < arity:
        raise ValueError(f"{kind.value} layer needs at least {arity} qubits")
    rng = np.random.default_rng(seed)
    b = _Builder(n)
    n_params = len(default_params(kind))
    for q in range(n):
        targets = (q,) if arity == 1 else (q, (q + 1) % n)
        b.add(kind, targets, _angles(rng, n_params))
    return b.circuit()


def gen_qft(n: int) -> RawCircuit:
    """Textbook QFT without the terminal swap network: n(n+1)/2 gates."""
    if n < 1:
        raise ValueError("QFT needs at least 1 qubit")
    b = _Builder(n)
    for q in range(n - 1, -1, -1):
        b.add(GateKind.H, (q,))
        for j in range(q - 1, -1, -1):
            b.add(GateKind.CP, (j, q), (math.pi / (1 << (q - j)),))
    return b.circuit()


def gen_qaoa(n: int, p: int = 5, seed: int = 0) -> RawCircuit:
    """Complete-graph MaxCut ansatz: n + p*(n*(n-1)/2 + n) gates."""
    if n < 2:
        raise ValueError("QAOA needs at least 2 qubits")
    rng = np.random.default_rng(seed)
    b = _Builder(n)
    for q in range(n):
        b.add(GateKind.H, (q,))
    for _ in range(p):
        gamma = _angles(rng, 1)
        for i in range(n):
            for j in range(i + 1, n):
                b.add(GateKind.RZZ, (i, j), gamma)
        beta = _angles(rng, 1)
        for q in range(n):
            b.add(GateKind.RX, (q,), beta)
    return b.circuit()


def gen_bv(n: int, secret: str | None = None) -> RawCircuit:
    """H on all qubits, CX from each set secret bit to qubit n-1, H on all:
    2n + popcount(secret) gates."""
    if n < 2:
        raise ValueError("BV needs at least 2 qubits")
    if secret is None:
        secret = "1" * (n - 1)
    if len(secret) != n - 1 or set(secret) - {"0", "1"}:
        raise ValueError(f"secret must be a bitstring of length {n - 1}")
    b = _Builder(n)
    for q in range(n):
        b.add(GateKind.H, (q,))
    for j, bit in enumerate(secret):
        if bit == "1":
            b.add(GateKind.CX, (j, n - 1))
    for q in range(n):
        b.add(GateKind.H, (q,))
    return b.circuit()


def _gen_hs(n: int, rng: np.random.Generator) -> RawCircuit:
    # Three H layers around two shift-oracle passes: 5n - 6 gates at n >= 3.
    b = _Builder(n)

    def h_layer():
        for q in range(n):
            b.add(GateKind.H, (q,))

    def oracle_pass():
        for i in range(max(0, n - 3)):
            q = int(rng.integers(0, n))
            if i % 2 == 0:
                b.add(GateKind.X, (q,))
            else:
                b.add(GateKind.RZZ, (q, (q + 1) % n), _angles(rng, 1))

    h_layer()
    oracle_pass()
    h_layer()
    oracle_pass()
    h_layer()
    return b.circuit()


def _gen_qv(n: int, rng: np.random.Generator) -> RawCircuit:
    # Rounds of random pairings, three gates per pair: 495 gates at n=31.
    rounds = max(1, round(n * 11 / 31))
    b = _Builder(n)
    for _ in range(rounds):
        order = rng.permutation(n)
        for i in range(n // 2):
            a, c = int(order[2 * i]), int(order[2 * i + 1])
            b.add(GateKind.U, (a,), _angles(rng, 3))
            b.add(GateKind.U, (c,), _angles(rng, 3))
            b.add(GateKind.CX, (a, c))
    return b.circuit()


def _gen_sc(n: int, rng: np.random.Generator) -> RawCircuit:
    # H layer plus 8 cycles of paired RZZ and single-qubit rotations: 9n gates.
    b = _Builder(n)
    for q in range(n):
        b.add(GateKind.H, (q,))
    for _ in range(8):
        order = rng.permutation(n)
        for i in range(n // 2):
            b.add(GateKind.RZZ, (int(order[2 * i]), int(order[2 * i + 1])), _angles(rng, 1))
        for i in range(n - n // 2):
            kind = GateKind.RX if rng.integers(0, 2) == 0 else GateKind.RY
            b.add(kind, (int(rng.integers(0, n)),), _angles(rng, 1))
    return b.circuit()


def _gen_vc(n: int, rng: np.random.Generator) -> RawCircuit:
    # Four entangling layers plus a final rotation layer: 9n gates.
    b = _Builder(n)
    for _ in range(4):
        for q in range(n):
            b.add(GateKind.RY, (q,), _angles(rng, 1))
        for q in range(n):
            b.add(GateKind.CX, (q, (q + 1) % n))
    for q in range(n):
        b.add(GateKind.RY, (q,), _angles(rng, 1))
    return b.circuit()


_MISC = {"hs": _gen_hs, "qv": _gen_qv, "sc": _gen_sc, "vc": _gen_vc}


def gen_misc(family: str, n: int, seed: int = 0) -> RawCircuit:
    if n < 2:
        raise ValueError("need at least 2 qubits")
    return _MISC[family](n, np.random.default_rng(seed))


def generate(family: str, n: int, seed: int = 0, *, p: int = 5,
             secret: str | None = None) -> RawCircuit:
    """Build a benchmark circuit by family name (see ALL_FAMILIES)."""
    family = family.lower()
    if family == "qft":
        return gen_qft(n)
    if family == "qaoa":
        return gen_qaoa(n, p=p, seed=seed)
    if family == "bv":
        return gen_bv(n, secret)
    if family in _MISC:
        return gen_misc(family, n, seed)
    if family in GATE_FAMILIES:
        return gen_gate_layer(GateKind(family.upper()), n, seed)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(ALL_FAMILIES)}")
