"""Exact two-terminal reliability for binary-state networks that grow in stages."""

from increl.connectivity import (
    LayerTrace,
    NodePartition,
    extend_partition,
    extend_partition_detail,
    is_connected,
    layered_search,
    partition_nodes,
)
from increl.engine import (
    EngineState,
    Retained,
    StageResult,
    TraceRow,
    full_enumeration_counts,
    initial_stage,
    run,
    run_expansion,
)
from increl.enumeration import BitCursor, counting_vectors
from increl.model import (
    ArcSpec,
    Bits,
    CapExceededError,
    Expansion,
    ExpansionError,
    Network,
    ParseError,
    concat_bits,
    extend_network,
    induced_arcs,
    vector_probability,
)
from increl.netfile import parse_expansion_specs, parse_network, serialize_network
from increl.oracle import brute_force_feasible_set, brute_force_reliability

__version__ = "0.1.0"

__all__ = [
    "ArcSpec",
    "Bits",
    "BitCursor",
    "CapExceededError",
    "EngineState",
    "Expansion",
    "ExpansionError",
    "LayerTrace",
    "Network",
    "NodePartition",
    "ParseError",
    "Retained",
    "StageResult",
    "TraceRow",
    "brute_force_feasible_set",
    "brute_force_reliability",
    "concat_bits",
    "counting_vectors",
    "extend_network",
    "extend_partition",
    "extend_partition_detail",
    "full_enumeration_counts",
    "induced_arcs",
    "initial_stage",
    "is_connected",
    "layered_search",
    "parse_expansion_specs",
    "parse_network",
    "partition_nodes",
    "run",
    "run_expansion",
    "serialize_network",
    "vector_probability",
    "__version__",
]
