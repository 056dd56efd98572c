"""Cache-aware state-vector quantum circuit simulation toolkit."""

from .circuit import (
    CrossRankSwap,
    Gate,
    GateBlock,
    GateKind,
    InMemSwap,
    LayoutParams,
    OptimizedCircuit,
    ParseError,
    RawCircuit,
    gate_matrix,
    parse_optimized,
    parse_raw,
    serialize_optimized,
    serialize_raw,
)
from .generators import generate
from .optimizer import OptimizeError, optimize
from .oracle import bitswap_permute, oracle_simulate, restore_order, validate_order
from .simulator import (
    SimConfig,
    SimulationError,
    Simulator,
    bitshift,
    bitswap,
    cross_rank_swap,
    in_memory_swap,
    init_state,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "CrossRankSwap", "Gate", "GateBlock", "GateKind", "InMemSwap",
    "LayoutParams", "OptimizedCircuit", "ParseError", "RawCircuit",
    "gate_matrix", "parse_optimized", "parse_raw", "serialize_optimized",
    "serialize_raw", "generate", "OptimizeError", "optimize",
    "bitswap_permute", "oracle_simulate", "restore_order", "validate_order",
    "SimConfig", "SimulationError", "Simulator", "bitshift", "bitswap",
    "cross_rank_swap", "in_memory_swap", "init_state", "simulate",
]
