"""Token composition graphs built from ERC-20 Transfer event logs.

The pipeline: ingest raw EVM logs (JSON-RPC or JSONL files), decode
Transfer events, detect tokenising meta-events (deposit & mint,
withdraw & burn) per transaction, aggregate them into a directed token
graph, and analyze its topology (degrees, components, cycles, longest
paths).  A read-only HTTP API serves built graphs to the explorer UI.
"""

from tokengraph.evm_log_model import (
    TRANSFER_TOPIC,
    ZERO_ADDRESS,
    RawLog,
    TransferEvent,
    TransferKind,
    classify,
    decode_transfer,
)
from tokengraph.meta_events import (
    ActionKind,
    PairingMode,
    PairingPolicy,
    TokenisingMetaEvent,
    apply_two_way_filter,
    detect,
    detect_all,
)
from tokengraph.token_graph import EdgeEvidence, GraphMode, TokenGraph, build

__all__ = [
    "TRANSFER_TOPIC",
    "ZERO_ADDRESS",
    "RawLog",
    "TransferEvent",
    "TransferKind",
    "classify",
    "decode_transfer",
    "ActionKind",
    "PairingMode",
    "PairingPolicy",
    "TokenisingMetaEvent",
    "apply_two_way_filter",
    "detect",
    "detect_all",
    "EdgeEvidence",
    "GraphMode",
    "TokenGraph",
    "build",
]
