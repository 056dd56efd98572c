"""
Circuit optimizer: hierarchical gate-block finding plus swap insertion.

A gate block is a maximal ordered set of gates whose dependency qubits fit
inside one chunk. Blocks are found greedily: the dependency set covering
the most pending gates seeds the chunk set, then whole dependency sets are
merged while the schedulable-gate count keeps growing. Swap instructions
(in-memory between cache blocks, the SQS/CSQS/SQS sandwich between device
blocks) rotate the physical qubit layout so that every emitted block's
targets land below the chunk boundary.
"""
from __future__ import annotations

import numpy as np

from .circuit import (
    CrossRankSwap,
    Gate,
    GateBlock,
    GateKind,
    InMemSwap,
    Instruction,
    LayoutParams,
    OptimizedCircuit,
    RawCircuit,
)


class OptimizeError(ValueError):
    pass


def _popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    v = arr.astype(np.uint64)
    out = np.zeros(v.shape, dtype=np.int64)
    while v.any():
        out += (v & np.uint64(1)).astype(np.int64)
        v >>= np.uint64(1)
    return out


def _mask_bits(mask: int) -> list[int]:
    bits = []
    q = 0
    while mask:
        if mask & 1:
            bits.append(q)
        mask >>= 1
        q += 1
    return bits


def _dep_masks(gates: list[Gate]) -> list[int]:
    """Forward-sweep dependency closure: dep(g) = targets(g) plus the deps of
    every earlier pending gate sharing a qubit, transitively."""
    pending: dict[int, int] = {}
    deps = []
    for g in gates:
        m = 0
        for q in g.targets:
            m |= 1 << q
            m |= pending.get(q, 0)
        deps.append(m)
        for q in g.targets:
            pending[q] = m
    return deps


def update_dependency(gates: list[Gate]) -> list[frozenset[int]]:
    """Per-gate set of qubits that must be chunk-resident for it to run now."""
    return [frozenset(_mask_bits(m)) for m in _dep_masks(gates)]


def _subset_counts(deps: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """counts[k] = number of deps contained in masks[k]."""
    counts = np.empty(len(masks), dtype=np.int64)
    step = max(1, (1 << 22) // max(1, len(deps)))
    for i in range(0, len(masks), step):
        m = masks[i:i + step]
        counts[i:i + step] = ((deps[None, :] & ~m[:, None]) == 0).sum(axis=1)
    return counts


def _next_block(gates: list[Gate], chunk_size: int) -> tuple[int, list[int]]:
    """Pick the next chunk set and the gate indices it schedules.

    Returns (chunk mask, indices ordered by when they became schedulable:
    seed-covered gates first, then the gates enabled by each merge, keeping
    list order within each step).
    """
    deps = _dep_masks(gates)
    deps_np = np.array(deps, dtype=np.uint64)
    pops = _popcount(deps_np)

    uniq: dict[int, int] = {}
    for i, d in enumerate(deps):
        if pops[i] <= chunk_size and d not in uniq:
            uniq[d] = i
    if not uniq:
        raise OptimizeError("gate wider than chunk")
    seed_masks = np.array(list(uniq), dtype=np.uint64)
    seed_counts = _subset_counts(deps_np, seed_masks)
    best = int(np.argmax(seed_counts))  # first occurrence wins: earliest gate
    chunk = int(seed_masks[best])

    scheduled = (deps_np & ~np.uint64(chunk)) == 0
    order = list(np.nonzero(scheduled)[0])
    count = int(scheduled.sum())

    while True:
        cands: dict[int, tuple[int, int]] = {}  # union -> (added mask, first gate idx)
        for i in np.nonzero(~scheduled)[0]:
            d = deps[int(i)]
            union = chunk | d
            if union != chunk and bin(union).count("1") <= chunk_size and union not in cands:
                cands[union] = (union & ~chunk, int(i))
        if not cands:
            break
        unions = np.array(list(cands), dtype=np.uint64)
        gains = _subset_counts(deps_np, unions)
        top = int(gains.max())
        if top <= count:
            break
        ties = [int(unions[k]) for k in np.nonzero(gains == top)[0]]
        # lowest added qubit index first, then earliest owning gate
        union = min(ties, key=lambda u: ((cands[u][0] & -cands[u][0]).bit_length(), cands[u][1]))
        now = (deps_np & ~np.uint64(union)) == 0
        order += list(np.nonzero(now & ~scheduled)[0])
        scheduled = now
        chunk = union
        count = top

    return chunk, [int(i) for i in order]


def find_max_gate(gates: list[Gate], chunk_size: int) -> frozenset[int]:
    """Chunk set the greedy search would pick for the pending gate list."""
    mask, _ = _next_block(gates, chunk_size)
    return frozenset(_mask_bits(mask))


def extract_block(gates: list[Gate], chunk_set) -> tuple[list[Gate], list[Gate]]:
    """Pull every gate whose dependency set fits the given chunk set.

    Returns (block gates, remaining gates), both in list order.
    """
    mask = 0
    for q in chunk_set:
        mask |= 1 << q
    deps = _dep_masks(gates)
    block = [g for g, d in zip(gates, deps) if d & ~mask == 0]
    rest = [g for g, d in zip(gates, deps) if d & ~mask != 0]
    return block, rest


def find_gate_blocks(gates: list[Gate], chunk_size: int, *,
                     initial: bool) -> list[tuple[int, list[Gate]]]:
    """Partition gates into (chunk mask, gate list) blocks.

    With `initial`, the first block is drawn from the identity chunk set
    {q0..q_{chunk_size-1}} before the greedy search starts.
    """
    remaining = list(gates)
    blocks: list[tuple[int, list[Gate]]] = []
    if initial and remaining:
        mask = (1 << chunk_size) - 1
        block, remaining = extract_block(remaining, range(chunk_size))
        if block:
            blocks.append((mask, block))
    while remaining:
        mask, order = _next_block(remaining, chunk_size)
        chosen = set(order)
        blocks.append((mask, [remaining[i] for i in order]))
        remaining = [g for i, g in enumerate(remaining) if i not in chosen]
    return blocks


# ---------------------------------------------------------------------------
# diagonal fusion


def _extended_diagonal(gate: Gate, union: list[int]) -> np.ndarray:
    """Gate's diagonal lifted to the union qubit set (union[0] = MSB)."""
    k = len(union)
    bit_of = {q: k - 1 - i for i, q in enumerate(union)}
    idx = np.arange(1 << k)
    sub = np.zeros(1 << k, dtype=np.int64)
    t = len(gate.targets)
    for j, q in enumerate(gate.targets):
        sub |= ((idx >> bit_of[q]) & 1) << (t - 1 - j)
    if gate.kind is GateKind.RZ:
        own = np.array([np.exp(-0.5j * gate.params[0]), np.exp(0.5j * gate.params[0])])
    elif gate.kind is GateKind.RZZ:
        e_m, e_p = np.exp(-0.5j * gate.params[0]), np.exp(0.5j * gate.params[0])
        own = np.array([e_m, e_p, e_p, e_m])
    elif gate.kind is GateKind.CP:
        own = np.array([1, 1, 1, np.exp(1j * gate.params[0])], dtype=complex)
    elif gate.kind is GateKind.D:
        own = np.asarray(gate.params, dtype=complex)
    else:
        raise OptimizeError(f"{gate.kind.value} is not diagonal")
    return own[sub]


def _merge_run(run: list[Gate]) -> list[Gate]:
    support = sorted({q for g in run for q in g.targets})
    if len(run) < 2 or len(support) < 2:
        return run
    diag = np.ones(1 << len(support), dtype=complex)
    for g in run:
        diag *= _extended_diagonal(g, support)
    gid = min(g.gid for g in run)
    return [Gate(GateKind.D, tuple(support), gid, tuple(diag))]


def _fuse_group(group: list[Gate], scope: int) -> list[Gate]:
    """Hoist diagonal gates (with their prerequisite chains) ahead of
    unrelated gates, then multiply out maximal diagonal runs."""
    if not any(g.is_diagonal for g in group):
        return list(group)

    in_closure = [g.is_diagonal for g in group]
    # ancestors: an earlier gate sharing a qubit (not both diagonal) must stay ahead
    for j in range(len(group) - 1, -1, -1):
        if not in_closure[j]:
            continue
        for i in range(j - 1, -1, -1):
            if in_closure[i]:
                continue
            blocked = set(group[i].targets) & set(group[j].targets)
            if blocked and not (group[i].is_diagonal and group[j].is_diagonal):
                in_closure[i] = True
    emitted = [g for g, keep in zip(group, in_closure) if keep]
    emitted += [g for g, keep in zip(group, in_closure) if not keep]

    # slots hold either a gate or an open diagonal run
    out: list[Gate | list[Gate]] = []
    runs: list[dict] = []  # {gates, support, blocked}
    for g in emitted:
        if not g.is_diagonal:
            out.append(g)
            for r in runs:
                r["blocked"] |= set(g.targets)
            continue
        placed = False
        for r in runs:
            support = r["support"] | set(g.targets)
            if not (set(g.targets) & r["blocked"]) and len(support) <= scope:
                r["gates"].append(g)
                r["support"] = support
                placed = True
                break
        if not placed:
            r = {"gates": [g], "support": set(g.targets), "blocked": set()}
            runs.append(r)
            out.append(r["gates"])

    result: list[Gate] = []
    for slot in out:
        if isinstance(slot, list):
            result += _merge_run(slot)
        else:
            result.append(slot)
    return result


def fuse_block_gates(gates: list[Gate], scope: int) -> list[Gate]:
    """Diagonal fusion over one gate block (targets already chunk-local)."""
    if scope < 2:
        raise OptimizeError("fusion scope must cover at least 2 qubits")
    out: list[Gate] = []
    for _, group in find_gate_blocks(gates, scope, initial=True):
        out += _fuse_group(group, scope)
    return out


# ---------------------------------------------------------------------------
# full optimization


def optimize(raw: RawCircuit, layout: LayoutParams, *, enable_ims: bool = True,
             enable_xrs: bool = True, enable_fusion: bool = False) -> OptimizedCircuit:
    """Rewrite a raw circuit into gate blocks plus swap instructions.

    Level 1 groups gates into device blocks (chunk = the N-R local qubits)
    separated by cross-rank swap sandwiches; level 2 regroups each device
    block into cache blocks (chunk = C) separated by in-memory swaps; level 3
    optionally fuses diagonal runs inside each cache block (scope = F).
    """
    n, r, c, f = layout.n, layout.r, layout.c, layout.f
    local = n - r
    if r > 0 and not enable_xrs:
        raise OptimizeError("cross-rank swapping is disabled but R > 0")
    if enable_fusion and f < 2:
        raise OptimizeError("fusion enabled but fusion scope F < 2")

    perm = list(range(n))  # position -> logical
    pos = list(range(n))   # logical -> position
    instructions: list[Instruction] = []

    def apply_pairs(a: list[int], b: list[int]) -> None:
        for pa, pb in zip(sorted(a), sorted(b)):
            qa, qb = perm[pa], perm[pb]
            perm[pa], perm[pb] = qb, qa
            pos[qa], pos[qb] = pb, pa

    def emit_ims(out_pos: list[int], in_pos: list[int]) -> None:
        instructions.append(InMemSwap(tuple(sorted(out_pos)), tuple(sorted(in_pos))))
        apply_pairs(out_pos, in_pos)

    def bring_into_chunk(needed: list[int]) -> None:
        incoming = [q for q in needed if pos[q] >= c]
        if not incoming:
            return
        resident = sorted(perm[p] for p in range(c))
        needed_set = set(needed)
        evict = [q for q in resident if q not in needed_set][:len(incoming)]
        emit_ims(sorted(pos[q] for q in evict), sorted(pos[q] for q in incoming))

    def bring_into_local(needed: list[int]) -> None:
        incoming = [q for q in needed if pos[q] >= local]
        s = len(incoming)
        if not s:
            return
        resident = sorted(perm[p] for p in range(local))
        needed_set = set(needed)
        evict = [q for q in resident if q not in needed_set][:s]
        top = list(range(local - s, local))
        ev_pos = sorted(pos[q] for q in evict)
        srcs = [p for p in ev_pos if p not in top]
        dsts = [p for p in top if p not in ev_pos]
        if srcs:
            emit_ims(srcs, dsts)
        rank_pos = sorted(pos[q] for q in incoming)
        instructions.append(CrossRankSwap(tuple(top), tuple(rank_pos)))
        apply_pairs(top, rank_pos)
        if dsts:
            emit_ims(srcs, dsts)

    def emit_block(gates: list[Gate]) -> None:
        if enable_fusion:
            gates = fuse_block_gates(gates, f)
        instructions.append(GateBlock(tuple(gates)))

    device_blocks = find_gate_blocks(list(raw.gates), local, initial=True)
    for bi, (dev_mask, dev_gates) in enumerate(device_blocks):
        bring_into_local(_mask_bits(dev_mask))
        if enable_ims:
            for cs_mask, bgates in find_gate_blocks(dev_gates, c, initial=(bi == 0)):
                bring_into_chunk(_mask_bits(cs_mask))
                mapped = [g.remapped(pos) for g in bgates]
                for g in mapped:
                    if any(t >= c for t in g.targets):
                        raise OptimizeError(f"gate {g.gid} not chunk-resident after swaps")
                emit_block(mapped)
        else:
            # No qubit reordering below the rank level: group maximal runs of
            # in-chunk gates; anything wider runs as a singleton memory-level block.
            run: list[Gate] = []
            for g in dev_gates:
                mapped = g.remapped(pos)
                if all(t < c for t in mapped.targets):
                    run.append(mapped)
                else:
                    if run:
                        emit_block(run)
                        run = []
                    instructions.append(GateBlock((mapped,)))
            if run:
                emit_block(run)

    return OptimizedCircuit(n, layout, tuple(instructions), tuple(perm))
