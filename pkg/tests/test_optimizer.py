import time

import numpy as np
import pytest

from quokka.circuit import (
    Gate,
    GateBlock,
    GateKind,
    InMemSwap,
    CrossRankSwap,
    LayoutParams,
    RawCircuit,
    gate_matrix,
    parse_raw,
    serialize_optimized,
)
from quokka.generators import generate
from quokka.optimizer import (
    OptimizeError,
    find_gate_blocks,
    find_max_gate,
    fuse_block_gates,
    optimize,
    update_dependency,
)
from quokka.oracle import oracle_simulate
from quokka.simulator import SimConfig, simulate
from conftest import EXAMPLE_OPTIMIZED, random_circuit


def g(kind, targets, gid, params=()):
    return Gate(kind, targets, gid, params)


def test_dependency_single_gate():
    deps = update_dependency([g(GateKind.H, (0,), 0)])
    assert deps == [frozenset({0})]


def test_dependency_independent_gates():
    deps = update_dependency([g(GateKind.CX, (0, 1), 0), g(GateKind.H, (2,), 1)])
    assert deps[1] == frozenset({2})


def test_dependency_transitive_closure(example_raw):
    deps = update_dependency(list(example_raw.gates))
    # the RZZ on (0,2) rides on the earlier RZZ (2,4): qubit 4 joins its set
    assert deps[8] == frozenset({0, 2, 4})
    assert deps[13] == frozenset({5, 7})


def test_dependency_monotone_under_prefix_removal():
    rng = np.random.default_rng(2)
    for _ in range(20):
        gates = list(random_circuit(8, 30, rng).gates)
        full = update_dependency(gates)
        shorter = update_dependency(gates[5:])
        for d_full, d_short in zip(full[5:], shorter):
            assert d_short <= d_full


def test_find_max_gate_example(example_raw):
    remaining = [gt for gt in example_raw.gates if gt.gid not in (0, 1, 6)]
    assert find_max_gate(remaining, 4) == frozenset({2, 4, 5, 7})


def test_find_max_gate_single():
    assert find_max_gate([g(GateKind.H, (7,), 0)], 4) == frozenset({7})


def test_find_max_gate_two_independent_pairs():
    gates = [g(GateKind.RZZ, (0, 1), 0, (0.1,)), g(GateKind.RZZ, (2, 3), 1, (0.2,))]
    assert find_max_gate(gates, 4) == frozenset({0, 1, 2, 3})


def test_find_max_gate_too_wide():
    with pytest.raises(OptimizeError, match="wider than chunk"):
        find_max_gate([g(GateKind.RZZ, (0, 1), 0, (0.1,))], 1)


def test_initial_block_extraction(example_raw):
    blocks = find_gate_blocks(list(example_raw.gates), 4, initial=True)
    assert [gt.gid for gt in blocks[0][1]] == [0, 1, 6]


def test_extract_block(example_raw):
    from quokka.optimizer import extract_block
    block, rest = extract_block(list(example_raw.gates), {0, 1, 2, 3})
    assert [gt.gid for gt in block] == [0, 1, 6]
    assert len(rest) == 11
    assert extract_block([], {0, 1}) == ([], [])
    all_in, none_left = extract_block(list(example_raw.gates), range(10))
    assert len(all_in) == 14 and none_left == []


def test_find_gate_blocks_degenerate_cases():
    assert find_gate_blocks([], 4, initial=True) == []
    rng = np.random.default_rng(0)
    c = random_circuit(3, 12, rng)
    blocks = find_gate_blocks(list(c.gates), 3, initial=True)
    assert len(blocks) == 1  # everything fits one chunk
    blocks = find_gate_blocks(list(random_circuit(8, 25, rng).gates), 8, initial=True)
    assert len(blocks) == 1


def test_optimize_matches_example_listing(example_raw):
    layout = LayoutParams(n=10, c=4, r=2)
    opt = optimize(example_raw, layout)
    assert serialize_optimized(opt).split() == EXAMPLE_OPTIMIZED.split()


def test_fusion_example_structure(example_raw):
    layout = LayoutParams(n=10, c=4, r=2, f=4)
    opt = optimize(example_raw, layout, enable_fusion=True)
    blocks = opt.gate_blocks()
    assert [gt.gid for gt in blocks[0].gates] == [0, 1, 6]
    # two merged diagonals covering original ids {2,3,9} and {8,12}
    k2 = [gt for gt in blocks[1].gates if gt.kind is GateKind.D]
    k3 = [gt for gt in blocks[2].gates if gt.kind is GateKind.D]
    assert len(k2) == 1 and k2[0].targets == (0, 1, 2, 3)
    assert len(k3) == 1 and k3[0].targets == (0, 1, 2, 3)
    assert [gt.gid for gt in blocks[1].gates if gt.kind is not GateKind.D] == [13]
    assert [gt.gid for gt in blocks[2].gates if gt.kind is not GateKind.D] == [7]
    assert [gt.gid for gt in blocks[3].gates] == [4, 11, 5, 10]
    # the swap skeleton is unchanged by fusion
    swaps = [i for i in opt.instructions if not isinstance(i, GateBlock)]
    layout0 = LayoutParams(n=10, c=4, r=2)
    swaps0 = [i for i in optimize(example_raw, layout0).instructions
              if not isinstance(i, GateBlock)]
    assert swaps == swaps0


def test_fused_diagonal_matches_matrix_product():
    theta1, theta2 = 0.6, 1.9
    gates = [g(GateKind.RZZ, (0, 1), 0, (theta1,)), g(GateKind.RZZ, (0, 1), 1, (theta2,))]
    (fused,) = fuse_block_gates(gates, 2)
    assert fused.kind is GateKind.D
    product = gate_matrix(gates[0]) @ gate_matrix(gates[1])
    assert np.allclose(np.diag(gate_matrix(fused)), np.diag(product))


def test_single_diagonal_stays_native():
    gates = [g(GateKind.RZ, (0,), 0, (0.4,))]
    assert fuse_block_gates(gates, 3) == gates


def test_same_qubit_diagonals_stay_native():
    gates = [g(GateKind.RZ, (0,), 0, (0.4,)), g(GateKind.RZ, (0,), 1, (0.9,))]
    assert fuse_block_gates(gates, 3) == gates


def test_fusion_run_split_when_support_exceeds_scope():
    gates = [g(GateKind.RZZ, (0, 1), 0, (0.1,)),
             g(GateKind.RZZ, (2, 3), 1, (0.2,)),
             g(GateKind.RZZ, (0, 3), 2, (0.3,))]
    out = fuse_block_gates(gates, 2)
    assert all(gt.kind is GateKind.RZZ for gt in out)  # nothing fits together in 2 qubits
    out = fuse_block_gates(gates, 4)
    assert [gt.kind for gt in out] == [GateKind.D]


def test_optimize_flag_validation(example_raw):
    with pytest.raises(OptimizeError, match="cross-rank"):
        optimize(example_raw, LayoutParams(n=10, c=4, r=2), enable_xrs=False)
    with pytest.raises(OptimizeError, match="fusion"):
        optimize(example_raw, LayoutParams(n=10, c=4, r=2, f=0), enable_fusion=True)


def _flatten_ids(opt):
    ids = []
    for ins in opt.instructions:
        if isinstance(ins, GateBlock):
            ids += [gt.gid for gt in ins.gates]
    return ids


def test_partition_chunk_fit_and_per_qubit_order():
    rng = np.random.default_rng(42)
    for _ in range(15):
        n = int(rng.integers(5, 11))
        raw = random_circuit(n, int(rng.integers(10, 80)), rng)
        for ims in (True, False):
            r = int(rng.integers(0, 3))
            if r > n - 4:
                r = 0
            layout = LayoutParams(n=n, c=4, r=r)
            opt = optimize(raw, layout, enable_ims=ims, enable_xrs=True)
            ids = _flatten_ids(opt)
            assert sorted(ids) == [gt.gid for gt in raw.gates]  # exactly once
            if ims:
                for ins in opt.instructions:
                    if isinstance(ins, GateBlock):
                        assert all(t < 4 for gt in ins.gates for t in gt.targets)
            # per-qubit id order (tracked through the evolving permutation)
            perm = list(range(n))
            last = {}
            for ins in opt.instructions:
                if isinstance(ins, GateBlock):
                    for gt in ins.gates:
                        for pos in gt.targets:
                            q = perm[pos]
                            assert last.get(q, -1) < gt.gid
                            last[q] = gt.gid
                elif isinstance(ins, InMemSwap):
                    from quokka.circuit import apply_swap_to_permutation
                    apply_swap_to_permutation(perm, ins.out_set, ins.in_set)
                elif isinstance(ins, CrossRankSwap):
                    from quokka.circuit import apply_swap_to_permutation
                    apply_swap_to_permutation(perm, ins.local_set, ins.rank_set)


def test_semantic_equivalence_mini_sweep():
    rng = np.random.default_rng(9)
    for _ in range(8):
        n = int(rng.integers(5, 11))
        raw = random_circuit(n, int(rng.integers(15, 70)), rng)
        ref = oracle_simulate(raw)
        for ims, fusion in ((True, False), (True, True), (False, False), (False, True)):
            r = min(2, n - 4)
            layout = LayoutParams(n=n, c=4, r=r, f=4 if fusion else 0)
            opt = optimize(raw, layout, enable_ims=ims, enable_fusion=fusion)
            res = simulate(opt, SimConfig(layout))
            assert np.max(np.abs(res.logical_vector() - ref)) <= 1e-12


def test_fusion_scope_smaller_than_chunk():
    # F < C splits each block into several fusion groups
    rng = np.random.default_rng(404)
    for _ in range(6):
        n = int(rng.integers(7, 12))
        raw = random_circuit(n, int(rng.integers(30, 100)), rng)
        ref = oracle_simulate(raw)
        layout = LayoutParams(n=n, c=5, r=1, f=2)
        opt = optimize(raw, layout, enable_fusion=True)
        res = simulate(opt, SimConfig(layout))
        assert np.max(np.abs(res.logical_vector() - ref)) <= 1e-12


def test_table_circuits_optimize_quickly():
    raw = generate("qft", 31)
    layout = LayoutParams(n=31, c=10)
    t0 = time.perf_counter()
    opt = optimize(raw, layout)
    assert time.perf_counter() - t0 < 1.0
    blocks = opt.gate_blocks()
    assert all(t < 10 for b in blocks for gt in b.gates for t in gt.targets)
