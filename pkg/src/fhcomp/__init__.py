"""Fronthaul compression control for a C-RAN downlink shared by K cells.

A slot-driven simulator of the fronthaul load/latency trade-off plus a
DDQN controller that tunes per-cell compression parameters (modulation
cap, precoder weight bitwidth, precoder granularity) to maximize link
utilization under a latency constraint.
"""

__version__ = "0.1.0"

from .fhcore import (
    SystemConfig,
    ConfigSpace,
    CompressionConfig,
    SlotRecord,
    payload_bits,
    weight_bits,
    fh_rate,
    slot_utilization,
    average_utilization,
    action_space_cardinality,
)

__all__ = [
    "SystemConfig",
    "ConfigSpace",
    "CompressionConfig",
    "SlotRecord",
    "payload_bits",
    "weight_bits",
    "fh_rate",
    "slot_utilization",
    "average_utilization",
    "action_space_cardinality",
]
