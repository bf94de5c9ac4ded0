"""Per-slot, per-cell scheduled-PRB process (truncated Gaussian)."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrafficConfig:
    mean_prb: float = 175.0
    sigma_prb: float = 1.0
    n_prb_max: int = 273
    seed: int = 0

    def __post_init__(self):
        if self.sigma_prb < 0:
            raise ValueError("sigma_prb must be non-negative")
        if not 0 < self.mean_prb <= self.n_prb_max:
            raise ValueError(
                f"mean_prb={self.mean_prb} outside (0, {self.n_prb_max}]")


def cell_stream(cfg: TrafficConfig, cell: int) -> np.random.Generator:
    """Independent per-cell RNG stream, stable under cell-count changes."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=(0, cell)))


def sample_prbs(rng: np.random.Generator, cfg: TrafficConfig, size=None):
    """Draw scheduled-PRB counts: round(N(mean, sigma^2)) clamped to [1, max]."""
    x = rng.normal(cfg.mean_prb, cfg.sigma_prb, size=size)
    return np.clip(np.rint(x), 1, cfg.n_prb_max).astype(np.int64)


class TrafficProcess:
    """K independent seeded PRB streams, one per cell."""

    def __init__(self, cfg: TrafficConfig, k_cells: int):
        self.cfg = cfg
        self.k_cells = k_cells
        self._streams = [cell_stream(cfg, k) for k in range(k_cells)]

    def sample(self, n_slots: int) -> np.ndarray:
        """Scheduled PRBs as an int64 array of shape (n_slots, k_cells)."""
        out = np.empty((n_slots, self.k_cells), dtype=np.int64)
        for k, rng in enumerate(self._streams):
            out[:, k] = sample_prbs(rng, self.cfg, size=n_slots)
        return out
