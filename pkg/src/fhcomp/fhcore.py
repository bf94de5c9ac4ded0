"""Fronthaul load model: payload/weight bit accounting, rates, utilization.

All bit counts are exact integers; rates and utilizations are float64.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters of the simulated C-RAN downlink."""

    bandwidth_hz: float = 100e6
    scs_index_mu: int = 1
    n_prb_max: int = 273
    n_re_per_prb_slot: int = 168
    n_ant: int = 64
    n_layers: int = 12
    t_slot_s: float = 5e-4
    t_symb_s: float = 33.33e-6
    c_fh_bps: float = 25e9
    k_cells: int = 3

    def __post_init__(self):
        if self.scs_index_mu not in range(5):
            raise ValueError(f"scs_index_mu must be in 0..4, got {self.scs_index_mu}")
        if self.n_re_per_prb_slot != 12 * 14:
            raise ValueError("n_re_per_prb_slot must be 12*14=168")
        if self.n_layers > self.n_ant:
            raise ValueError("n_layers must not exceed n_ant")
        for name in ("bandwidth_hz", "n_prb_max", "n_ant", "n_layers",
                     "t_slot_s", "t_symb_s", "c_fh_bps", "k_cells"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


def _check_set(name: str, values: Tuple[int, ...]) -> None:
    if len(values) == 0:
        raise ValueError(f"{name} must be non-empty")
    if any(values[i] >= values[i + 1] for i in range(len(values) - 1)):
        raise ValueError(f"{name} must be strictly increasing, got {values}")
    if values[0] <= 0:
        raise ValueError(f"{name} values must be positive")


@dataclass(frozen=True)
class ConfigSpace:
    """Ordered per-parameter value sets for the compression configuration."""

    q_set: Tuple[int, ...] = (6, 8)
    b_set: Tuple[int, ...] = (16, 17, 18, 19, 20, 21, 22)
    r_set: Tuple[int, ...] = (1, 2, 4)

    def __post_init__(self):
        object.__setattr__(self, "q_set", tuple(self.q_set))
        object.__setattr__(self, "b_set", tuple(self.b_set))
        object.__setattr__(self, "r_set", tuple(self.r_set))
        _check_set("q_set", self.q_set)
        _check_set("b_set", self.b_set)
        _check_set("r_set", self.r_set)

    def config_at(self, q_idx: int, b_idx: int, r_idx: int) -> "CompressionConfig":
        return CompressionConfig(self.q_set[q_idx], self.b_set[b_idx], self.r_set[r_idx])

    def indices_of(self, cfg: "CompressionConfig") -> Tuple[int, int, int]:
        return (self.q_set.index(cfg.q), self.b_set.index(cfg.b_w), self.r_set.index(cfg.r_w))


DEFAULT_SPACE = ConfigSpace()


@dataclass(frozen=True)
class CompressionConfig:
    """Per-cell compression triple: modulation cap, weight bits, granularity."""

    q: int
    b_w: int
    r_w: int

    def validate(self, space: ConfigSpace = DEFAULT_SPACE) -> "CompressionConfig":
        if self.q not in space.q_set:
            raise ValueError(f"q={self.q} not in {space.q_set}")
        if self.b_w not in space.b_set:
            raise ValueError(f"b_w={self.b_w} not in {space.b_set}")
        if self.r_w not in space.r_set:
            raise ValueError(f"r_w={self.r_w} not in {space.r_set}")
        return self


@dataclass(frozen=True)
class SlotRecord:
    """Per-slot per-cell fronthaul load sample."""

    t: int
    k: int
    n_prb: int
    config: CompressionConfig
    payload_bits: int
    weight_bits: int
    rate_bps: float
    util: float
    latency_s: float = 0.0


def payload_bits(sys: SystemConfig, n_prb: int, q: int,
                 space: ConfigSpace = DEFAULT_SPACE) -> int:
    """Data payload bits for one cell in one slot."""
    if not 0 <= n_prb <= sys.n_prb_max:
        raise ValueError(f"n_prb={n_prb} outside [0, {sys.n_prb_max}]")
    if q not in space.q_set:
        raise ValueError(f"q={q} not in {space.q_set}")
    return sys.n_re_per_prb_slot * sys.n_layers * n_prb * q


def weight_bits(sys: SystemConfig, n_prb: int, r_w: int, b_w: int,
                space: ConfigSpace = DEFAULT_SPACE) -> int:
    """Precoding-weight bits for one cell in one slot."""
    if n_prb < 0:
        raise ValueError(f"n_prb={n_prb} must be non-negative")
    if r_w <= 0 or r_w not in space.r_set:
        raise ValueError(f"r_w={r_w} not in {space.r_set}")
    if b_w not in space.b_set:
        raise ValueError(f"b_w={b_w} not in {space.b_set}")
    return math.ceil(n_prb / r_w) * sys.n_layers * sys.n_ant * b_w


def fh_rate(sys: SystemConfig, n_prb: int, cfg: CompressionConfig,
            space: ConfigSpace = DEFAULT_SPACE) -> float:
    """Fronthaul data rate (bit/s) for one cell in one slot."""
    total = (payload_bits(sys, n_prb, cfg.q, space)
             + weight_bits(sys, n_prb, cfg.r_w, cfg.b_w, space))
    return total / sys.t_slot_s


def slot_utilization(rate_bps: float, c_fh_bps: float) -> float:
    """Per-slot per-cell FH utilization: rate over capacity."""
    if c_fh_bps <= 0:
        raise ValueError("c_fh_bps must be strictly positive")
    return rate_bps / c_fh_bps


def average_utilization(records: Sequence[SlotRecord]) -> float:
    """Mean over slots of the per-slot cell-sum utilization.

    The cell sum is intentionally not divided by the number of cells.
    Requires a complete T x K grid of records.
    """
    if not records:
        raise ValueError("no records")
    slots = sorted({rec.t for rec in records})
    cells = sorted({rec.k for rec in records})
    seen = {(rec.t, rec.k) for rec in records}
    if len(seen) != len(records) or len(seen) != len(slots) * len(cells):
        raise ValueError("records do not form a complete T x K grid")
    return sum(rec.util for rec in records) / len(slots)


def action_space_cardinality(n_q: int, n_b: int, n_r: int, k_cells: int) -> int:
    """Size of the joint per-cell configuration action space."""
    if min(n_q, n_b, n_r) < 1 or k_cells < 1:
        raise ValueError("set sizes and cell count must be positive")
    return (n_q * n_b * n_r) ** k_cells
