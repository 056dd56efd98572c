"""
Partitioned state-vector simulator.

The state is split across 2^R simulated ranks, each holding a contiguous
slice of 2^(N-R) amplitudes. Gate blocks run chunk-by-chunk through a
cache-sized scratch view, in-memory swaps move whole cache lines via the
bitshift/bitswap index remapping, and cross-rank swaps stage an in-place
all-to-all through per-rank exchange buffers, one window of 2^(B-S) values
per peer at a time.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

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
    gate_matrix,
)

_SQRT1_2 = 1.0 / math.sqrt(2.0)
_BATCH_AMPS = 1 << 18      # amplitudes per in-cache batch (4 MiB of complex128)
_SWAP_BATCH = 1 << 20      # thread indices per in-memory-swap batch


class SimulationError(RuntimeError):
    pass


@dataclass
class StatePartition:
    rank_id: int
    amps: np.ndarray


@dataclass
class SimConfig:
    layout: LayoutParams
    workers_per_rank: int = 1


def _physical_memory_bytes() -> int:
    try:
        return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
    except (ValueError, OSError):
        return 1 << 62


def init_state(layout: LayoutParams) -> list[StatePartition]:
    """|0...0>: amplitude 1 at global index 0, split across 2^R ranks."""
    required = (1 << layout.n) * 16
    if layout.n > 34 or required > _physical_memory_bytes() * 0.95:
        raise SimulationError(f"cannot allocate state: {required} bytes required")
    size = 1 << layout.local_qubits
    try:
        parts = [StatePartition(r, np.zeros(size, dtype=np.complex128))
                 for r in range(layout.num_ranks)]
    except MemoryError:
        raise SimulationError(f"cannot allocate state: {required} bytes required")
    parts[0].amps[0] = 1.0
    return parts


# ---------------------------------------------------------------------------
# bit-permutation kernels


def bitswap(i, a_bits, b_bits):
    """Exchange bit sorted(a)[k] with bit sorted(b)[k]; ints or int arrays."""
    if set(a_bits) & set(b_bits):
        raise ValueError("bit sets overlap")
    for a, b in zip(sorted(a_bits), sorted(b_bits)):
        diff = ((i >> a) ^ (i >> b)) & 1
        i = i ^ (diff << a) ^ (diff << b)
    return i


def shift_pairs(a_bits, b_bits, cl: int, n_local: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Bit pairs (P, Q) whose exchange compacts the out-of-line partners of
    line-region swap bits down to the positions just above CL."""
    a_in = [x for x in sorted(a_bits) if x < cl]
    b_in = [x for x in sorted(b_bits) if x < cl]
    d = abs(len(a_in) - len(b_in))
    if d == 0:
        return (), ()
    donors = b_bits if len(a_in) > len(b_in) else a_bits
    donor_out = sorted(x for x in donors if x >= cl)
    p0 = [x for x in range(cl, cl + d) if x < n_local]
    q0 = donor_out[:len(p0)]
    p0 = p0[:len(q0)]
    common = set(p0) & set(q0)
    return (tuple(x for x in p0 if x not in common),
            tuple(x for x in q0 if x not in common))


def bitshift(t, a_bits, b_bits, cl: int, n_local: int):
    """Cache-line friendly iteration-order remap: a bijection that keeps the
    low CL bits in place (whole-line traffic) while pulling the swap bits'
    out-of-line partners just above the line."""
    p, q = shift_pairs(a_bits, b_bits, cl, n_local)
    return bitswap(t, p, q) if p else t


def _swap_pair_stream(n_local: int, a_bits, b_bits, cl: int,
                      start: int, stop: int | None, batch: int = _SWAP_BATCH):
    """Yield (m, n) index batches of the in-memory swap walk.

    Both m = bitshift(t) and n = bitswap(m) are bit permutations, so they
    distribute over disjoint index fields: tables over a low/high split of t
    replace per-index bit arithmetic with two gathers.
    """
    stop = (1 << n_local) if stop is None else stop
    split = min(16, n_local)
    size = 1 << split
    lo_t = np.arange(size, dtype=np.int64)
    hi_t = np.arange(1 << max(0, n_local - split), dtype=np.int64) << split
    m_lo = bitshift(lo_t, a_bits, b_bits, cl, n_local)
    m_hi = bitshift(hi_t, a_bits, b_bits, cl, n_local)
    n_lo = bitswap(m_lo, a_bits, b_bits)
    n_hi = bitswap(m_hi, a_bits, b_bits)
    rows = max(1, batch // size)
    pos = start
    while pos < stop:
        if pos % size or stop - pos < size:  # unaligned edge
            h, o = pos >> split, pos & (size - 1)
            end = min(size, o + (stop - pos))
            yield m_hi[h] | m_lo[o:end], n_hi[h] | n_lo[o:end]
            pos += end - o
            continue
        h0 = pos >> split
        h1 = min(h0 + rows, stop >> split)
        m = (m_hi[h0:h1, None] | m_lo[None, :]).reshape(-1)
        n = (n_hi[h0:h1, None] | n_lo[None, :]).reshape(-1)
        yield m, n
        pos = h1 << split


def swap_visit_stream(n_local: int, a_bits, b_bits, cl: int,
                      start: int = 0, stop: int | None = None, batch: int = _SWAP_BATCH):
    """Yield the array-offset batches an in-memory swap walks (before the
    pair lookup); used both by the swap kernel and by instrumentation."""
    for m, _ in _swap_pair_stream(n_local, a_bits, b_bits, cl, start, stop, batch):
        yield m


def in_memory_swap(amps: np.ndarray, out_set, in_set, cl: int,
                   start: int = 0, stop: int | None = None) -> None:
    """Permute amps in place: new[i] = old[bitswap(i, out, in)].

    Iterates thread indices through bitshift so each visited batch walks
    whole cache lines; the m > n guard touches each pair exactly once, so
    disjoint index ranges may run concurrently.
    """
    n_local = int(amps.size).bit_length() - 1
    for q in tuple(out_set) + tuple(in_set):
        if not (0 <= q < n_local):
            raise ValueError(f"swap bit {q} out of range for {n_local} local qubits")
    for m, n in _swap_pair_stream(n_local, out_set, in_set, cl, start, stop):
        sel = m > n
        mi, ni = m[sel], n[sel]
        tmp = amps[mi]
        amps[mi] = amps[ni]
        amps[ni] = tmp


def cross_rank_swap(partitions: list[StatePartition], local_set, rank_set,
                    layout: LayoutParams, buffers: list[np.ndarray] | None = None,
                    run_tasks=None) -> None:
    """Exchange the top-of-local bits with rank bits via a buffered,
    in-place all-to-all among each group of 2^S ranks."""
    local = layout.local_qubits
    s = len(local_set)
    if tuple(sorted(local_set)) != tuple(range(local - s, local)):
        raise SimulationError(f"cross-rank local set {local_set} is not top-of-local")
    if len(rank_set) != s:
        raise SimulationError("cross-rank swap sets differ in size")
    for q in rank_set:
        if not (local <= q < layout.n):
            raise SimulationError(f"rank bit {q} outside [{local}, {layout.n})")
    if layout.b < s:
        raise SimulationError(f"buffer of 2^{layout.b} too small for {s} swap pairs")
    if buffers is None:
        buffers = [np.empty(1 << layout.b, dtype=np.complex128) for _ in partitions]
    if run_tasks is None:
        run_tasks = lambda tasks: [t() for t in tasks]

    seg = 1 << (local - s)
    win = 1 << (layout.b - s)
    rank_bit_pos = sorted(q - local for q in rank_set)

    member_of = {}
    groups: dict[int, list[int]] = {}
    for part in partitions:
        rho = 0
        key = part.rank_id
        for k, bit in enumerate(rank_bit_pos):
            rho |= ((part.rank_id >> bit) & 1) << k
            key &= ~(1 << bit)
        member_of[part.rank_id] = rho
        groups.setdefault(key, [None] * (1 << s))[rho] = part.rank_id

    def send(rank_id: int, members: list[int], offset: int, w: int):
        def task():
            x = member_of[rank_id]
            src = partitions[rank_id].amps
            for y, peer in enumerate(members):
                buffers[peer][x * win:x * win + w] = src[y * seg + offset:y * seg + offset + w]
        return task

    def recv(rank_id: int, offset: int, w: int):
        def task():
            dst = partitions[rank_id].amps
            buf = buffers[rank_id]
            for x in range(1 << s):
                dst[x * seg + offset:x * seg + offset + w] = buf[x * win:x * win + w]
        return task

    for offset in range(0, seg, win):
        w = min(win, seg - offset)
        run_tasks([send(r, members, offset, w)
                   for members in groups.values() for r in members])
        run_tasks([recv(r, offset, w) for members in groups.values() for r in members])


# ---------------------------------------------------------------------------
# gate kernels on a (rows, 2^width) view


def _apply_1q(flat: np.ndarray, gate: Gate, tail: int) -> None:
    t = gate.targets[0]
    v = flat.reshape(-1, 2, (1 << t) * tail)
    a0, a1 = v[:, 0, :], v[:, 1, :]
    kind = gate.kind
    if kind is GateKind.H:
        s = (a0 + a1) * _SQRT1_2
        d = (a0 - a1) * _SQRT1_2
        a0[:] = s
        a1[:] = d
    elif kind is GateKind.X:
        tmp = a0.copy()
        a0[:] = a1
        a1[:] = tmp
    elif kind is GateKind.RZ:
        a0 *= np.exp(-0.5j * gate.params[0])
        a1 *= np.exp(0.5j * gate.params[0])
    else:  # U, RX, RY via their 2x2 entries
        m = gate_matrix(gate)
        n0 = m[0, 0] * a0 + m[0, 1] * a1
        n1 = m[1, 0] * a0 + m[1, 1] * a1
        a0[:] = n0
        a1[:] = n1


def _apply_2q(flat: np.ndarray, gate: Gate, tail: int) -> None:
    q0, q1 = gate.targets
    lo, hi = min(q0, q1), max(q0, q1)
    v = flat.reshape(-1, 2, 1 << (hi - lo - 1), 2, (1 << lo) * tail)
    kind = gate.kind

    def bits(bhi, blo):
        return v[:, bhi, :, blo, :]

    if kind is GateKind.CX:
        control = gate.targets[0]
        if control == hi:
            x0, x1 = bits(1, 0), bits(1, 1)
        else:
            x0, x1 = bits(0, 1), bits(1, 1)
        tmp = x0.copy()
        x0[:] = x1
        x1[:] = tmp
    elif kind is GateKind.SWAP:
        tmp = bits(0, 1).copy()
        bits(0, 1)[:] = bits(1, 0)
        bits(1, 0)[:] = tmp
    elif kind is GateKind.CP:
        bits(1, 1)[:] *= np.exp(1j * gate.params[0])
    elif kind is GateKind.RZZ:
        e_m = np.exp(-0.5j * gate.params[0])
        e_p = np.exp(0.5j * gate.params[0])
        bits(0, 0)[:] *= e_m
        bits(1, 1)[:] *= e_m
        bits(0, 1)[:] *= e_p
        bits(1, 0)[:] *= e_p
    else:
        raise SimulationError(f"no 2-qubit kernel for {kind.value}")


def _diag_multiplier(gate: Gate, width: int) -> np.ndarray:
    """Per-amplitude phase vector of a diagonal gate over a 2^width space."""
    entries = np.ascontiguousarray(np.diagonal(gate_matrix(gate)))
    k = len(gate.targets)
    idx = np.arange(1 << width)
    sub = np.zeros(1 << width, dtype=np.int64)
    for j, q in enumerate(gate.targets):
        sub |= ((idx >> q) & 1) << (k - 1 - j)
    return entries[sub]


def _apply_gate_flat(flat: np.ndarray, gate: Gate, width: int, tail: int) -> None:
    """Apply one gate to a flattened batch laid out as (2^width, tail)."""
    if any(t >= width for t in gate.targets):
        raise SimulationError(
            f"gate {gate.kind.value} {gate.targets} does not fit width {width}")
    if gate.kind is GateKind.D:
        if width > 20:
            raise SimulationError("fused diagonal outside the chunk path")
        if tail == 1:
            flat.reshape(-1, 1 << width)[...] *= _diag_multiplier(gate, width)[None, :]
        else:
            flat.reshape(1 << width, tail)[...] *= _diag_multiplier(gate, width)[:, None]
    elif len(gate.targets) == 1:
        _apply_1q(flat, gate, tail)
    else:
        _apply_2q(flat, gate, tail)


def apply_gate_2d(arr2d: np.ndarray, gate: Gate, width: int) -> None:
    """Apply one gate to every row of a (rows, 2^width) view; targets < width."""
    for row0 in range(0, arr2d.shape[0], max(1, _BATCH_AMPS >> width)):
        sub = arr2d[row0:row0 + max(1, _BATCH_AMPS >> width)]
        _apply_gate_flat(sub.reshape(-1), gate, width, 1)


def apply_gate_block(partition: StatePartition, block: GateBlock, c: int, cl: int,
                     row_start: int = 0, row_stop: int | None = None) -> None:
    """Run a whole block chunk-by-chunk.

    A batch of chunks is copied once into an amplitude-major scratch (the
    in-cache working set), every gate of the block is applied to it in
    order, and the result is written back. Bitwise identical to
    chunk-unaware application: only addresses change, not operations.
    """
    view = partition.amps.reshape(-1, 1 << c)
    row_stop = view.shape[0] if row_stop is None else row_stop
    step = max(1, _BATCH_AMPS >> c)
    for r0 in range(row_start, row_stop, step):
        sub = view[r0:min(r0 + step, row_stop)]
        scratch = np.ascontiguousarray(sub.T)  # (2^c, batch), amplitude-major
        tail = scratch.shape[1]
        flat = scratch.reshape(-1)
        for gate in block.gates:
            _apply_gate_flat(flat, gate, c, tail)
        sub[...] = scratch.T


def apply_gate_full(amps: np.ndarray, gate: Gate, part: int = 0, parts: int = 1) -> None:
    """Memory-level path: apply one gate across the whole local array,
    optionally as one of `parts` disjoint aligned slices."""
    n_local = int(amps.size).bit_length() - 1
    unit = 1 << (max(gate.targets) + 1)
    n_units = amps.size // unit
    if n_units >= parts > 1:
        lo = n_units * part // parts
        hi = n_units * (part + 1) // parts
        if lo == hi:
            return
        sub = amps[lo * unit:hi * unit]
    else:
        if part != 0:
            return
        sub = amps
    apply_gate_2d(sub.reshape(-1, unit), gate, max(gate.targets) + 1)


# ---------------------------------------------------------------------------
# executor


@dataclass
class SimResult:
    partitions: list[StatePartition]
    final_permutation: tuple[int, ...]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def layout_local(self) -> int:
        return int(self.partitions[0].amps.size).bit_length() - 1

    def norm(self) -> float:
        total = 0.0
        for p in self.partitions:
            total += float(np.sum(np.abs(p.amps) ** 2))
        return math.sqrt(total)

    def physical_vector(self) -> np.ndarray:
        return np.concatenate([p.amps for p in self.partitions])

    def logical_vector(self) -> np.ndarray:
        from .oracle import logical_state
        return logical_state(self.physical_vector(), self.final_permutation)

    def amplitude(self, logical_index: int) -> complex:
        return get_amplitude(self.partitions, logical_index, self.final_permutation)


def get_amplitude(partitions: list[StatePartition], logical_index: int,
                  permutation: tuple[int, ...]) -> complex:
    n = len(permutation)
    if not (0 <= logical_index < (1 << n)):
        raise IndexError(f"logical index {logical_index} out of range")
    phys = 0
    for pos in range(n):
        phys |= ((logical_index >> permutation[pos]) & 1) << pos
    local = int(partitions[0].amps.size).bit_length() - 1
    return complex(partitions[phys >> local].amps[phys & ((1 << local) - 1)])


class Simulator:
    """Executes optimized instruction streams over simulated ranks.

    One persistent thread pool of 2^R x workers_per_rank threads drives all
    instruction phases; joins between phases act as barriers. Results are
    bit-identical for every worker count.
    """

    def __init__(self, layout: LayoutParams, workers_per_rank: int = 1):
        self.layout = layout
        self.workers_per_rank = max(1, int(workers_per_rank))
        self.partitions = init_state(layout)
        self._buffers: list[np.ndarray] | None = None
        self._pool: ThreadPoolExecutor | None = None

    # -- plumbing

    def reset(self) -> None:
        for p in self.partitions:
            p.amps[:] = 0
        self.partitions[0].amps[0] = 1.0

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def total_workers(self) -> int:
        return self.layout.num_ranks * self.workers_per_rank

    def _run_tasks(self, tasks) -> None:
        tasks = list(tasks)
        # Threads only pay off on large states; the split itself is
        # bit-identical either way.
        if self.total_workers == 1 or len(tasks) == 1 or self.layout.n < 18:
            for t in tasks:
                t()
            return
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.total_workers)
        futures = [self._pool.submit(t) for t in tasks]
        for f in futures:
            f.result()

    def _ensure_buffers(self) -> list[np.ndarray]:
        if self._buffers is None:
            self._buffers = [np.empty(1 << self.layout.b, dtype=np.complex128)
                             for _ in self.partitions]
        return self._buffers

    # -- instruction dispatch

    def _block_tasks(self, block: GateBlock):
        lay = self.layout
        chunked = all(t < lay.c for g in block.gates for t in g.targets)
        tasks = []
        if chunked:
            rows = 1 << (lay.local_qubits - lay.c)
            w = min(self.workers_per_rank, rows)
            for part in self.partitions:
                for i in range(w):
                    r0, r1 = rows * i // w, rows * (i + 1) // w
                    tasks.append(lambda p=part, a=r0, b=r1:
                                 apply_gate_block(p, block, lay.c, lay.cl, a, b))
        else:
            for gate in block.gates:
                if max(gate.targets) >= lay.local_qubits:
                    raise SimulationError(
                        f"gate target {max(gate.targets)} beyond local range")
            # memory-level path, one gate at a time to preserve order
            return None
        return tasks

    def _run_block(self, block: GateBlock) -> None:
        tasks = self._block_tasks(block)
        if tasks is not None:
            self._run_tasks(tasks)
            return
        w = self.workers_per_rank
        for gate in block.gates:
            self._run_tasks([
                (lambda p=part, i=i, g=gate: apply_gate_full(p.amps, g, i, w))
                for part in self.partitions for i in range(w)])

    def _run_ims(self, ins: InMemSwap) -> None:
        lay = self.layout
        size = 1 << lay.local_qubits
        w = min(self.workers_per_rank, max(1, size // _SWAP_BATCH)) or 1
        tasks = []
        for part in self.partitions:
            for i in range(w):
                t0, t1 = size * i // w, size * (i + 1) // w
                tasks.append(lambda p=part, a=t0, b=t1:
                             in_memory_swap(p.amps, ins.out_set, ins.in_set, lay.cl, a, b))
        self._run_tasks(tasks)

    def _run_xrs(self, ins: CrossRankSwap) -> None:
        cross_rank_swap(self.partitions, ins.local_set, ins.rank_set, self.layout,
                        self._ensure_buffers(), run_tasks=self._run_tasks)

    def run(self, opt: OptimizedCircuit | list[Instruction],
            final_permutation: tuple[int, ...] | None = None) -> SimResult:
        """Execute an instruction stream against the current state."""
        if isinstance(opt, OptimizedCircuit):
            if opt.num_qubits != self.layout.n:
                raise SimulationError(
                    f"circuit has {opt.num_qubits} qubits, layout has {self.layout.n}")
            instructions = opt.instructions
            final_permutation = opt.final_permutation
        else:
            instructions = tuple(opt)
            if final_permutation is None:
                from .circuit import replay_permutation
                final_permutation = replay_permutation(instructions, self.layout.n)
        timings = {"gate": 0.0, "ims": 0.0, "xrs": 0.0}
        for ins in instructions:
            t0 = time.perf_counter()
            if isinstance(ins, GateBlock):
                self._run_block(ins)
                timings["gate"] += time.perf_counter() - t0
            elif isinstance(ins, InMemSwap):
                self._run_ims(ins)
                timings["ims"] += time.perf_counter() - t0
            else:
                self._run_xrs(ins)
                timings["xrs"] += time.perf_counter() - t0
        return SimResult(self.partitions, tuple(final_permutation), timings)

    def run_gate_by_gate(self, raw: RawCircuit) -> SimResult:
        """Baseline scheme: every gate swept across the full local state."""
        if self.layout.r != 0:
            raise SimulationError("gate-by-gate baseline runs on a single rank")
        timings = {"gate": 0.0, "ims": 0.0, "xrs": 0.0}
        t0 = time.perf_counter()
        w = self.workers_per_rank
        for gate in raw.gates:
            self._run_tasks([
                (lambda i=i, g=gate: apply_gate_full(self.partitions[0].amps, g, i, w))
                for i in range(w)])
        timings["gate"] = time.perf_counter() - t0
        return SimResult(self.partitions, tuple(range(self.layout.n)), timings)


def simulate(opt: OptimizedCircuit, cfg: SimConfig) -> SimResult:
    """One-shot execution from |0...0> under the given config."""
    sim = Simulator(cfg.layout, cfg.workers_per_rank)
    try:
        return sim.run(opt)
    finally:
        sim.close()
