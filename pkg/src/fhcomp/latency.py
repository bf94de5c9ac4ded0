"""Parametric fronthaul latency model.

A slot's aggregate bits are treated as a head-of-line burst serialized
at link rate, plus a fixed processing delay and a uniform jitter term
drawn once per slot and shared by all cells on the link.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import slot_latencies


@dataclass(frozen=True)
class LatencyModelConfig:
    alpha_burst: float = 0.5
    d_proc_s: float = 10e-6
    jitter_max_s: float = 5e-6
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.alpha_burst <= 1:
            raise ValueError("alpha_burst must lie in [0, 1]")
        if self.d_proc_s < 0 or self.jitter_max_s < 0:
            raise ValueError("delays must be non-negative")


def jitter_stream(cfg: LatencyModelConfig) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1, 0)))


def slot_latency(per_cell_bits, c_fh_bps: float, cfg: LatencyModelConfig,
                 rng: np.random.Generator) -> np.ndarray:
    """Latency (s) per cell for one slot; all K entries are equal.

    The K cells share the link, so the burst is the cell sum and the
    jitter draw is common to the slot.
    """
    per_cell_bits = np.asarray(per_cell_bits, dtype=np.float64)
    if per_cell_bits.ndim != 1:
        raise ValueError("per_cell_bits must be a length-K sequence")
    if c_fh_bps <= 0:
        raise ValueError("c_fh_bps must be strictly positive")
    total = np.array([per_cell_bits.sum()])
    eps = rng.uniform(0.0, cfg.jitter_max_s, size=1)
    lat = slot_latencies(total, c_fh_bps, cfg.alpha_burst, cfg.d_proc_s, eps)[0]
    return np.full(per_cell_bits.shape[0], lat)


def interval_latencies(total_bits_per_slot, c_fh_bps: float,
                       cfg: LatencyModelConfig,
                       rng: np.random.Generator) -> np.ndarray:
    """Per-slot latencies for a whole decision interval (vectorized path)."""
    total_bits_per_slot = np.asarray(total_bits_per_slot, dtype=np.float64)
    eps = rng.uniform(0.0, cfg.jitter_max_s, size=total_bits_per_slot.shape[0])
    return slot_latencies(total_bits_per_slot, c_fh_bps,
                          cfg.alpha_burst, cfg.d_proc_s, eps)
