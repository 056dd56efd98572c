"""
Circuit data model, gate semantics, and the two on-disk text formats.

Raw circuit files carry one gate per line:

    [kind] [targets...] [id] [params...]

Optimized circuit files alternate a count line with that many payload
lines; a record whose single payload line starts with ``SQS`` or ``CSQS``
is an in-memory / cross-rank qubit swap instead of a gate block.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

DEFAULT_ANGLE = math.pi / 4

_SQRT1_2 = 1.0 / math.sqrt(2.0)


class ParseError(ValueError):
    """Raised for malformed circuit text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class GateKind(Enum):
    H = "H"
    X = "X"
    U = "U"
    CX = "CX"
    CP = "CP"
    SWAP = "SWAP"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    RZZ = "RZZ"
    D = "D"  # fused diagonal on k qubits, textual form D<k>


# Fixed arity / parameter count per kind; D is variable (arity from the label,
# 2^k complex diagonal entries as parameters).
_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.U: 1, GateKind.RX: 1,
    GateKind.RY: 1, GateKind.RZ: 1, GateKind.CX: 2, GateKind.CP: 2,
    GateKind.SWAP: 2, GateKind.RZZ: 2,
}
_NUM_PARAMS = {
    GateKind.H: 0, GateKind.X: 0, GateKind.CX: 0, GateKind.SWAP: 0,
    GateKind.CP: 1, GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1,
    GateKind.RZZ: 1, GateKind.U: 3,
}

DIAGONAL_KINDS = frozenset({GateKind.RZ, GateKind.RZZ, GateKind.CP, GateKind.D})
# Kinds whose operator is invariant under target reordering.
SYMMETRIC_KINDS = frozenset({GateKind.SWAP, GateKind.RZZ, GateKind.CP, GateKind.D})
# Gate set admitted in raw files (Table-style benchmark set; D appears only in
# optimized files as fusion output).
RAW_KINDS = frozenset(_ARITY)


def kind_arity(kind: GateKind, targets: tuple[int, ...] = ()) -> int:
    return len(targets) if kind is GateKind.D else _ARITY[kind]


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    gid: int
    params: tuple = ()

    def __post_init__(self):
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets in {self.kind.value} gate {self.gid}")
        if self.kind is GateKind.D:
            k = len(self.targets)
            if k < 2:
                raise ValueError("fused diagonal needs at least 2 qubits")
            if len(self.params) != 1 << k:
                raise ValueError(f"D{k} needs {1 << k} diagonal entries, got {len(self.params)}")
        else:
            if len(self.targets) != _ARITY[self.kind]:
                raise ValueError(f"{self.kind.value} takes {_ARITY[self.kind]} targets")
            if len(self.params) != _NUM_PARAMS[self.kind]:
                raise ValueError(f"{self.kind.value} takes {_NUM_PARAMS[self.kind]} parameters")

    @property
    def is_diagonal(self) -> bool:
        return self.kind in DIAGONAL_KINDS

    def remapped(self, positions: list[int] | dict[int, int]) -> "Gate":
        """Return a copy with each target q replaced by positions[q].

        Targets of symmetric kinds are canonicalized ascending so emitted
        listings are deterministic.
        """
        new = tuple(positions[q] for q in self.targets)
        if self.kind in SYMMETRIC_KINDS:
            new = tuple(sorted(new))
        return Gate(self.kind, new, self.gid, self.params)

    def canonical_targets(self) -> tuple[int, ...]:
        return tuple(sorted(self.targets)) if self.kind in SYMMETRIC_KINDS else self.targets


def default_params(kind: GateKind) -> tuple:
    return (DEFAULT_ANGLE,) * _NUM_PARAMS[kind]


@dataclass(frozen=True)
class RawCircuit:
    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        last = -1
        for g in self.gates:
            if g.gid <= last:
                raise ValueError(f"gate ids must strictly increase; id {g.gid} after {last}")
            last = g.gid


@dataclass(frozen=True)
class LayoutParams:
    """Partitioning constants: N total qubits, R rank bits, C chunk bits,
    CL cache-line bits, F fusion scope, B exchange-buffer bits."""

    n: int
    c: int
    r: int = 0
    cl: int = 2
    f: int = 0
    b: int | None = None

    def __post_init__(self):
        if self.b is None:
            object.__setattr__(self, "b", self.n - self.r)
        if not (0 <= self.r <= self.n):
            raise ValueError(f"need 0 <= R <= N, got R={self.r}, N={self.n}")
        if not (0 < self.c <= self.n - self.r):
            raise ValueError(f"need 0 < C <= N-R, got C={self.c}, N-R={self.n - self.r}")
        if not (0 <= self.cl <= self.c):
            raise ValueError(f"need CL <= C, got CL={self.cl}, C={self.c}")
        if not (0 <= self.f <= self.c):
            raise ValueError(f"need F <= C, got F={self.f}, C={self.c}")
        if not (0 <= self.b <= self.n - self.r):
            raise ValueError(f"need B <= N-R, got B={self.b}, N-R={self.n - self.r}")

    @property
    def local_qubits(self) -> int:
        return self.n - self.r

    @property
    def num_ranks(self) -> int:
        return 1 << self.r


@dataclass(frozen=True)
class GateBlock:
    gates: tuple[Gate, ...]


@dataclass(frozen=True)
class InMemSwap:
    out_set: tuple[int, ...]
    in_set: tuple[int, ...]

    def __post_init__(self):
        if len(self.out_set) != len(self.in_set):
            raise ValueError("swap sets must have equal size")
        if set(self.out_set) & set(self.in_set):
            raise ValueError("swap sets must be disjoint")


@dataclass(frozen=True)
class CrossRankSwap:
    local_set: tuple[int, ...]
    rank_set: tuple[int, ...]

    def __post_init__(self):
        if len(self.local_set) != len(self.rank_set):
            raise ValueError("swap sets must have equal size")


Instruction = GateBlock | InMemSwap | CrossRankSwap


def apply_swap_to_permutation(perm: list[int], a: tuple[int, ...], b: tuple[int, ...]) -> None:
    """Exchange permutation entries pairwise: sorted(a)[k] <-> sorted(b)[k]."""
    for pa, pb in zip(sorted(a), sorted(b)):
        perm[pa], perm[pb] = perm[pb], perm[pa]


def replay_permutation(instructions: tuple[Instruction, ...], n: int) -> tuple[int, ...]:
    """Physical-position -> logical-qubit map after all swap instructions."""
    perm = list(range(n))
    for ins in instructions:
        if isinstance(ins, InMemSwap):
            apply_swap_to_permutation(perm, ins.out_set, ins.in_set)
        elif isinstance(ins, CrossRankSwap):
            apply_swap_to_permutation(perm, ins.local_set, ins.rank_set)
    return tuple(perm)


@dataclass(frozen=True)
class OptimizedCircuit:
    num_qubits: int
    layout: LayoutParams
    instructions: tuple[Instruction, ...]
    final_permutation: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.final_permutation:
            object.__setattr__(
                self, "final_permutation", replay_permutation(self.instructions, self.num_qubits)
            )

    def gate_blocks(self) -> list[GateBlock]:
        return [i for i in self.instructions if isinstance(i, GateBlock)]


# ---------------------------------------------------------------------------
# parsing / serialization


def _parse_kind(token: str) -> tuple[GateKind, int | None]:
    """Return (kind, arity override). D<k> carries its arity in the label."""
    if token.startswith("D") and token[1:].isdigit():
        k = int(token[1:])
        return GateKind.D, k
    try:
        return GateKind(token), None
    except ValueError:
        raise KeyError(token)


def _parse_gate_line(tokens: list[str], line_no: int, num_qubits: int,
                     allow_fused: bool) -> Gate:
    try:
        kind, d_arity = _parse_kind(tokens[0])
    except KeyError:
        raise ParseError(line_no, f"unknown gate symbol {tokens[0]!r}")
    if kind is GateKind.D and not allow_fused:
        raise ParseError(line_no, "fused diagonal gates are not valid in raw circuits")
    arity = d_arity if d_arity is not None else _ARITY[kind]
    if kind is GateKind.D:
        # No id token: D<k> t1..tk followed by 2^k re/im pairs.
        want = 1 + arity + 2 * (1 << arity)
        if len(tokens) != want:
            raise ParseError(line_no, f"D{arity} line needs {want} tokens, got {len(tokens)}")
        try:
            targets = tuple(int(t) for t in tokens[1:1 + arity])
            floats = [float(t) for t in tokens[1 + arity:]]
        except ValueError as exc:
            raise ParseError(line_no, str(exc))
        params = tuple(complex(floats[2 * i], floats[2 * i + 1]) for i in range(1 << arity))
        gid = -1
    else:
        n_par = _NUM_PARAMS[kind]
        if len(tokens) == 1 + arity + 1:
            param_tokens: list[str] = []
        elif len(tokens) == 1 + arity + 1 + n_par:
            param_tokens = tokens[1 + arity + 1:]
        else:
            raise ParseError(line_no, f"wrong token count for {kind.value}: got {len(tokens)}")
        try:
            targets = tuple(int(t) for t in tokens[1:1 + arity])
            gid = int(tokens[1 + arity])
            params = tuple(float(t) for t in param_tokens) if param_tokens else default_params(kind)
        except ValueError as exc:
            raise ParseError(line_no, str(exc))
    for q in targets:
        if not (0 <= q < num_qubits):
            raise ParseError(line_no, f"qubit index out of range: {q} (N={num_qubits})")
    if len(set(targets)) != len(targets):
        raise ParseError(line_no, f"duplicate target qubits in {kind.value}")
    if gid < 0 and kind is not GateKind.D:
        raise ParseError(line_no, f"negative gate id {gid}")
    return Gate(kind, targets, gid, params)


def parse_raw(text: str, num_qubits: int) -> RawCircuit:
    """Parse the raw circuit format. Gate ids must strictly increase in file order."""
    gates: list[Gate] = []
    last_gid = -1
    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        gate = _parse_gate_line(tokens, line_no, num_qubits, allow_fused=False)
        if gate.gid == last_gid:
            raise ParseError(line_no, f"duplicate gate id {gate.gid}")
        if gate.gid < last_gid:
            raise ParseError(line_no, f"gate id {gate.gid} out of order after {last_gid}")
        last_gid = gate.gid
        gates.append(gate)
    return RawCircuit(num_qubits, tuple(gates))


def _fmt(x: float) -> str:
    return repr(float(x))


def _gate_line(g: Gate) -> str:
    parts = [f"D{len(g.targets)}" if g.kind is GateKind.D else g.kind.value]
    parts += [str(t) for t in g.targets]
    if g.kind is GateKind.D:
        for e in g.params:
            e = complex(e)
            parts += [_fmt(e.real), _fmt(e.imag)]
    else:
        parts.append(str(g.gid))
        if g.params != default_params(g.kind):
            parts += [_fmt(p) for p in g.params]
    return " ".join(parts)


def serialize_raw(circuit: RawCircuit) -> str:
    """One gate per line; parametric angles equal to the default are omitted
    so default-angle listings round-trip token-identically."""
    return "\n".join(_gate_line(g) for g in circuit.gates)


def _parse_swap_line(tokens: list[str], line_no: int) -> Instruction:
    name = tokens[0]
    if len(tokens) < 2:
        raise ParseError(line_no, f"{name} needs a pair count")
    try:
        m = int(tokens[1])
        ops = [int(t) for t in tokens[2:]]
    except ValueError as exc:
        raise ParseError(line_no, str(exc))
    if len(tokens) != 2 + 2 * m:
        raise ParseError(line_no, f"{name} {m} needs exactly {2 + 2 * m} tokens, got {len(tokens)}")
    a, b = tuple(ops[:m]), tuple(ops[m:])
    return InMemSwap(a, b) if name == "SQS" else CrossRankSwap(a, b)


def parse_optimized(text: str, layout: LayoutParams) -> OptimizedCircuit:
    """Parse the optimized format; '#' comments are ignored."""
    lines = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if body.strip():
            lines.append((line_no, body.split()))
    instructions: list[Instruction] = []
    i = 0
    while i < len(lines):
        line_no, tokens = lines[i]
        if len(tokens) != 1:
            raise ParseError(line_no, f"expected a record count, got {' '.join(tokens)!r}")
        try:
            count = int(tokens[0])
        except ValueError:
            raise ParseError(line_no, f"expected a record count, got {tokens[0]!r}")
        if count < 1:
            raise ParseError(line_no, "record count must be positive")
        if i + 1 + count > len(lines):
            raise ParseError(line_no, f"record claims {count} lines but file ends early")
        payload = lines[i + 1:i + 1 + count]
        first_tok = payload[0][1][0] if payload else ""
        if first_tok in ("SQS", "CSQS"):
            if count != 1:
                raise ParseError(line_no, "swap records hold exactly one line")
            ln, toks = payload[0]
            ins = _parse_swap_line(toks, ln)
            if isinstance(ins, InMemSwap):
                for q in ins.out_set + ins.in_set:
                    if not (0 <= q < layout.local_qubits):
                        raise ParseError(ln, f"SQS index {q} outside local range")
            else:
                for q in ins.local_set:
                    if not (0 <= q < layout.local_qubits):
                        raise ParseError(ln, f"CSQS local index {q} outside local range")
                for q in ins.rank_set:
                    if not (layout.local_qubits <= q < layout.n):
                        raise ParseError(ln, f"CSQS rank index {q} outside rank range")
            instructions.append(ins)
        else:
            gates = []
            for ln, toks in payload:
                g = _parse_gate_line(toks, ln, layout.n, allow_fused=True)
                for q in g.targets:
                    if q >= layout.c:
                        raise ParseError(ln, f"gate target {q} >= chunk qubits C={layout.c}")
                gates.append(g)
            instructions.append(GateBlock(tuple(gates)))
        i += 1 + count
    return OptimizedCircuit(layout.n, layout, tuple(instructions))


def serialize_optimized(circuit: OptimizedCircuit) -> str:
    lines: list[str] = []
    for ins in circuit.instructions:
        if isinstance(ins, GateBlock):
            lines.append(str(len(ins.gates)))
            lines += [_gate_line(g) for g in ins.gates]
        elif isinstance(ins, InMemSwap):
            lines.append("1")
            lines.append("SQS " + " ".join(
                str(x) for x in (len(ins.out_set),) + ins.out_set + ins.in_set))
        else:
            lines.append("1")
            lines.append("CSQS " + " ".join(
                str(x) for x in (len(ins.local_set),) + ins.local_set + ins.rank_set))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# gate matrices

def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    ct, st = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[ct, -cmath.exp(1j * lam) * st],
                     [cmath.exp(1j * phi) * st, cmath.exp(1j * (phi + lam)) * ct]])


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense unitary of dimension 2^arity.

    Basis index convention: targets[0] is the most significant bit of the
    matrix index, so a two-qubit gate acts on (a_00, a_01, a_10, a_11) with
    the first bit belonging to targets[0] (the control for CX/CP).
    """
    k = gate.kind
    p = gate.params
    if k is GateKind.H:
        return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
    if k is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k is GateKind.U:
        return _u3(*p)
    if k is GateKind.CX:
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if k is GateKind.CP:
        return np.diag([1, 1, 1, cmath.exp(1j * p[0])])
    if k is GateKind.SWAP:
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if k is GateKind.RX:
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if k is GateKind.RY:
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k is GateKind.RZ:
        return np.diag([cmath.exp(-1j * p[0] / 2), cmath.exp(1j * p[0] / 2)])
    if k is GateKind.RZZ:
        e_m, e_p = cmath.exp(-1j * p[0] / 2), cmath.exp(1j * p[0] / 2)
        return np.diag([e_m, e_p, e_p, e_m])
    if k is GateKind.D:
        entries = np.asarray(p, dtype=complex)
        if np.max(np.abs(np.abs(entries) - 1.0)) > 1e-9:
            raise ValueError("non-unitary fused gate")
        return np.diag(entries)
    raise ValueError(f"no matrix for {k}")
