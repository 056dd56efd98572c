"""
Brute-force dense reference simulator and circuit-order validation.

Everything here is deliberately independent of the partitioned simulator:
gates are applied through their full matrices over a single dense state,
and bit permutations are computed index-by-index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import (
    Gate,
    GateBlock,
    GateKind,
    InMemSwap,
    CrossRankSwap,
    OptimizedCircuit,
    RawCircuit,
    apply_swap_to_permutation,
    gate_matrix,
)

MAX_ORACLE_QUBITS = 26


def apply_gate_dense(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply gate via its dense matrix. Axis j of the tensor view is bit n-1-j."""
    mat = gate_matrix(gate)
    k = len(gate.targets)
    tensor = state.reshape([2] * n)
    # targets[0] is the most significant bit of the matrix index
    axes = [n - 1 - q for q in gate.targets]
    rest = [a for a in range(n) if a not in axes]
    tensor = np.transpose(tensor, axes + rest).reshape(1 << k, -1)
    tensor = mat @ tensor
    tensor = tensor.reshape([2] * k + [2] * (n - k))
    inv = np.argsort(axes + rest)
    return np.transpose(tensor, inv).reshape(-1)


def oracle_simulate(circuit: RawCircuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Gate-by-gate dense simulation from |0...0> (or a given state)."""
    n = circuit.num_qubits
    if n > MAX_ORACLE_QUBITS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_QUBITS} qubits, got {n}")
    if initial is None:
        state = np.zeros(1 << n, dtype=complex)
        state[0] = 1.0
    else:
        state = np.array(initial, dtype=complex)
    for gate in circuit.gates:
        state = apply_gate_dense(state, gate, n)
    return state


def bitswap_scalar(i: int, a_bits: tuple[int, ...], b_bits: tuple[int, ...]) -> int:
    """Exchange bit sorted(a)[k] with bit sorted(b)[k] of index i."""
    if set(a_bits) & set(b_bits):
        raise ValueError("bit sets overlap")
    for a, b in zip(sorted(a_bits), sorted(b_bits)):
        ba, bb = (i >> a) & 1, (i >> b) & 1
        if ba != bb:
            i ^= (1 << a) | (1 << b)
    return i


def bitswap_permute(state: np.ndarray, a_bits: tuple[int, ...], b_bits: tuple[int, ...]) -> np.ndarray:
    """Reference permutation: new[i] = old[bitswap(i, A, B)]."""
    n_elems = len(state)
    idx = np.array([bitswap_scalar(i, tuple(a_bits), tuple(b_bits)) for i in range(n_elems)])
    return state[idx]


# ---------------------------------------------------------------------------
# circuit-order validation


@dataclass
class OrderReport:
    ok: bool
    messages: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _require_unfused(opt: OptimizedCircuit) -> None:
    for ins in opt.instructions:
        if isinstance(ins, GateBlock):
            for g in ins.gates:
                if g.kind is GateKind.D:
                    raise ValueError("order restoration requires a non-fused circuit")


def restore_order(opt: OptimizedCircuit) -> list[Gate]:
    """Rewrite every block gate back to logical targets and sort by id."""
    _require_unfused(opt)
    perm = list(range(opt.num_qubits))
    restored: list[Gate] = []
    for ins in opt.instructions:
        if isinstance(ins, GateBlock):
            for g in ins.gates:
                restored.append(g.remapped(perm))
        elif isinstance(ins, InMemSwap):
            apply_swap_to_permutation(perm, ins.out_set, ins.in_set)
        elif isinstance(ins, CrossRankSwap):
            apply_swap_to_permutation(perm, ins.local_set, ins.rank_set)
    restored.sort(key=lambda g: g.gid)
    return restored


def validate_order(raw: RawCircuit, opt: OptimizedCircuit) -> OrderReport:
    """Pass iff the restored listing equals the raw one and per-qubit gate
    ids are increasing across the optimized stream."""
    messages: list[str] = []
    restored = restore_order(opt)

    if len(restored) != len(raw.gates):
        messages.append(f"gate count mismatch: raw {len(raw.gates)}, optimized {len(restored)}")
    else:
        for want, got in zip(raw.gates, restored):
            if (want.kind, want.canonical_targets(), want.gid) != (got.kind, got.canonical_targets(), got.gid):
                messages.append(
                    f"gate {want.gid}: expected {want.kind.value} {want.canonical_targets()}, "
                    f"restored {got.kind.value} {got.canonical_targets()} (id {got.gid})")

    perm = list(range(opt.num_qubits))
    last_gid: dict[int, int] = {}
    for ins in opt.instructions:
        if isinstance(ins, GateBlock):
            for g in ins.gates:
                for pos in g.targets:
                    q = perm[pos]
                    if q in last_gid and g.gid < last_gid[q]:
                        messages.append(
                            f"qubit {q}: gate id {g.gid} appears after id {last_gid[q]}")
                    last_gid[q] = max(g.gid, last_gid.get(q, -1))
        elif isinstance(ins, InMemSwap):
            apply_swap_to_permutation(perm, ins.out_set, ins.in_set)
        elif isinstance(ins, CrossRankSwap):
            apply_swap_to_permutation(perm, ins.local_set, ins.rank_set)

    return OrderReport(not messages, messages)


def logical_state(physical: np.ndarray, permutation: tuple[int, ...]) -> np.ndarray:
    """Undo a physical->logical qubit permutation on a dense state vector."""
    n = len(permutation)
    if len(physical) != 1 << n:
        raise ValueError("state size does not match permutation length")
    if tuple(permutation) == tuple(range(n)):
        return physical.copy()
    logical = np.arange(1 << n, dtype=np.int64)
    phys = np.zeros(1 << n, dtype=np.int64)
    for pos in range(n):
        phys |= ((logical >> permutation[pos]) & 1) << pos
    return physical[phys]
