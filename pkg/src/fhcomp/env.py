"""Constrained-MDP environment: state, delta actions, reward, slot loop."""

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from . import oracle
from ._kernels import slot_bits
from .fhcore import (CompressionConfig, ConfigSpace, DEFAULT_SPACE, SystemConfig)
from .latency import LatencyModelConfig, interval_latencies, jitter_stream
from .traffic import TrafficConfig, TrafficProcess

# One delta per decision step, applied to the round-robin-selected cell.
ACTIONS = ("NOOP", "Q-", "Q+", "B-", "B+", "R-", "R+")
N_ACTIONS = len(ACTIONS)


@dataclass(frozen=True)
class EnvState:
    """Per-cell interval KPIs plus the current configuration indices."""

    utils: Tuple[float, ...]
    latencies_s: Tuple[float, ...]
    q_idx: Tuple[int, ...]
    b_idx: Tuple[int, ...]
    r_idx: Tuple[int, ...]


@dataclass(frozen=True)
class EnvAction:
    cell: int
    delta: str

    def __post_init__(self):
        if self.delta not in ACTIONS:
            raise ValueError(f"unknown delta {self.delta!r}")


@dataclass(frozen=True)
class RewardConfig:
    lam: float = 1.0
    d: float = 0.999
    tau_max_s: float = 260e-6
    delta: float = 1e-3
    gamma: float = 0.95

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 <= self.d <= 1:
            raise ValueError("d must lie in [0, 1]")
        if self.tau_max_s <= 0:
            raise ValueError("tau_max_s must be strictly positive")


@dataclass(frozen=True)
class StepInfo:
    """Per-decision-interval aggregates for KPI reporting."""

    step: int
    cell: int
    action: str
    configs: Tuple[Tuple[int, int, int], ...]
    cell_utils: Tuple[float, ...]
    cell_sum_util: float
    max_latency_s: float
    indicator: int
    delivered_payload_bits: int
    violation_slots: int
    n_slots: int


def apply_action(state: EnvState, action: EnvAction,
                 space: ConfigSpace = DEFAULT_SPACE) -> EnvState:
    """Move the targeted index by one step; out-of-bounds moves saturate."""
    if action.delta == "NOOP":
        return state
    param, sign = action.delta[0], (1 if action.delta[1] == "+" else -1)
    name, values = {
        "Q": ("q_idx", space.q_set),
        "B": ("b_idx", space.b_set),
        "R": ("r_idx", space.r_set),
    }[param]
    idx = list(getattr(state, name))
    new = idx[action.cell] + sign
    if 0 <= new < len(values):
        idx[action.cell] = new
    return replace(state, **{name: tuple(idx)})


def compute_reward(cell_utils: Sequence[float], max_latency_s: float,
                   cfg: RewardConfig) -> float:
    """Lagrangian reward: cell-sum utilization plus constraint indicator term."""
    util_sum = float(np.sum(cell_utils))
    if util_sum < 0:
        raise ValueError("utilizations must be non-negative")
    g = (1.0 if max_latency_s < cfg.tau_max_s else 0.0) - cfg.d
    return util_sum + cfg.lam * g


def encode_state(state: EnvState, space: ConfigSpace, tau_max_s: float) -> np.ndarray:
    """Fixed-layout feature vector, 5 entries per cell.

    Per cell: [K*util clipped to [0, 1.5], min(latency/tau_max, 2),
    normalized q/b/r indices]. Singleton sets encode as 0.
    """
    k = len(state.utils)
    feats = np.empty(5 * k)
    for c in range(k):
        feats[5 * c] = min(max(k * state.utils[c], 0.0), 1.5)
        feats[5 * c + 1] = min(state.latencies_s[c] / tau_max_s, 2.0)
        feats[5 * c + 2] = _norm_idx(state.q_idx[c], len(space.q_set))
        feats[5 * c + 3] = _norm_idx(state.b_idx[c], len(space.b_set))
        feats[5 * c + 4] = _norm_idx(state.r_idx[c], len(space.r_set))
    return feats


def _norm_idx(idx: int, size: int) -> float:
    return idx / (size - 1) if size > 1 else 0.0


def reference_policy(sys: SystemConfig,
                     space: ConfigSpace = DEFAULT_SPACE) -> CompressionConfig:
    """Static configuration dimensioned for full load under the FH capacity."""
    return oracle.best_static_config(sys, sys.n_prb_max, "capacity", space).config


class FronthaulEnv:
    """Slot-driven fronthaul simulator with delta-configuration actions.

    Each decision step applies one delta to the round-robin-selected
    cell, then simulates ``n_dec_slots`` slots. Offered utilization
    beyond the link capacity is capped (the link cannot carry more than
    ``c_fh_bps``), which keeps the per-slot cell-sum utilization <= 1.
    """

    def __init__(self, sys: SystemConfig = SystemConfig(),
                 space: ConfigSpace = DEFAULT_SPACE,
                 traffic_cfg: TrafficConfig = TrafficConfig(),
                 latency_cfg: LatencyModelConfig = LatencyModelConfig(),
                 reward_cfg: RewardConfig = RewardConfig(),
                 n_dec_slots: int = 10,
                 initial_config: Optional[CompressionConfig] = None,
                 explore_reset_seed: Optional[int] = None):
        if n_dec_slots < 1:
            raise ValueError("n_dec_slots must be positive")
        self.sys = sys
        self.space = space
        self.traffic_cfg = traffic_cfg
        self.latency_cfg = latency_cfg
        self.reward_cfg = reward_cfg
        self.n_dec_slots = n_dec_slots
        # episode start: maximum compression (lowest q and b, highest r)
        if initial_config is None:
            initial_config = space.config_at(0, 0, len(space.r_set) - 1)
        self.initial_config = initial_config.validate(space)
        self.n_actions = N_ACTIONS
        self.obs_dim = 5 * sys.k_cells
        self._traffic = TrafficProcess(traffic_cfg, sys.k_cells)
        self._jitter_rng = jitter_stream(latency_cfg)
        # exploring starts for training: reset to uniform random configurations
        self._reset_rng = (np.random.default_rng(
            np.random.SeedSequence(entropy=explore_reset_seed, spawn_key=(2, 0)))
            if explore_reset_seed is not None else None)
        self.state: Optional[EnvState] = None
        self._decision_count = 0

    def reset(self, configs: Optional[Sequence[CompressionConfig]] = None) -> np.ndarray:
        """Reset configs and warm up one interval to populate the KPIs."""
        k = self.sys.k_cells
        if configs is None:
            # exploring starts alternate with the canonical start so both
            # the random frontier and the deterministic start state stay
            # represented in the training distribution
            if self._reset_rng is not None and self._reset_rng.random() < 0.5:
                configs = [self.space.config_at(
                    int(self._reset_rng.integers(len(self.space.q_set))),
                    int(self._reset_rng.integers(len(self.space.b_set))),
                    int(self._reset_rng.integers(len(self.space.r_set))))
                    for _ in range(k)]
            else:
                configs = [self.initial_config] * k
        if len(configs) != k:
            raise ValueError(f"expected {k} configs")
        idx = [self.space.indices_of(c.validate(self.space)) for c in configs]
        self.state = EnvState(
            utils=(0.0,) * k,
            latencies_s=(0.0,) * k,
            q_idx=tuple(i[0] for i in idx),
            b_idx=tuple(i[1] for i in idx),
            r_idx=tuple(i[2] for i in idx),
        )
        self._decision_count = 0
        utils, max_lat, _, _ = self._simulate_interval()
        self.state = replace(self.state, utils=utils,
                             latencies_s=(max_lat,) * k)
        return encode_state(self.state, self.space, self.reward_cfg.tau_max_s)

    def step(self, action_index: int):
        """Apply a delta action, simulate one interval, return transition."""
        if self.state is None:
            raise RuntimeError("call reset() before step()")
        if not 0 <= action_index < N_ACTIONS:
            raise ValueError(f"action index {action_index} outside 0..6")
        cell = self._decision_count % self.sys.k_cells
        action = EnvAction(cell, ACTIONS[action_index])
        self.state = apply_action(self.state, action, self.space)

        utils, max_lat, delivered, viol_slots = self._simulate_interval()
        k = self.sys.k_cells
        self.state = replace(self.state, utils=utils,
                             latencies_s=(max_lat,) * k)
        reward = compute_reward(utils, max_lat, self.reward_cfg)
        info = StepInfo(
            step=self._decision_count,
            cell=cell,
            action=action.delta,
            configs=tuple(
                (self.space.q_set[self.state.q_idx[c]],
                 self.space.b_set[self.state.b_idx[c]],
                 self.space.r_set[self.state.r_idx[c]]) for c in range(k)),
            cell_utils=utils,
            cell_sum_util=float(np.sum(utils)),
            max_latency_s=max_lat,
            indicator=1 if max_lat < self.reward_cfg.tau_max_s else 0,
            delivered_payload_bits=delivered,
            violation_slots=viol_slots,
            n_slots=self.n_dec_slots,
        )
        self._decision_count += 1
        feats = encode_state(self.state, self.space, self.reward_cfg.tau_max_s)
        return feats, reward, info

    def set_configs(self, configs: Sequence[CompressionConfig]) -> np.ndarray:
        """Reset with explicit per-cell configurations (static baselines)."""
        return self.reset(configs=configs)

    def current_configs(self) -> Tuple[CompressionConfig, ...]:
        return tuple(
            self.space.config_at(self.state.q_idx[c], self.state.b_idx[c],
                                 self.state.r_idx[c])
            for c in range(self.sys.k_cells))

    def _simulate_interval(self):
        sys = self.sys
        k = sys.k_cells
        n_prb = self._traffic.sample(self.n_dec_slots)
        q = np.array([self.space.q_set[i] for i in self.state.q_idx], dtype=np.int64)
        b = np.array([self.space.b_set[i] for i in self.state.b_idx], dtype=np.int64)
        r = np.array([self.space.r_set[i] for i in self.state.r_idx], dtype=np.int64)
        payload, weight = slot_bits(n_prb, q, b, r, sys.n_re_per_prb_slot,
                                    sys.n_layers, sys.n_ant)
        bits = payload + weight
        total_bits = bits.sum(axis=1).astype(np.float64)
        rates = bits / sys.t_slot_s
        offered_util = rates / sys.c_fh_bps
        # the shared link saturates at capacity: cap the carried utilization
        slot_sum = offered_util.sum(axis=1)
        scale = np.minimum(1.0, 1.0 / np.maximum(slot_sum, 1e-300))
        util = offered_util * scale[:, None]
        latencies = interval_latencies(total_bits, sys.c_fh_bps,
                                       self.latency_cfg, self._jitter_rng)
        ok = latencies < self.reward_cfg.tau_max_s
        delivered = int(payload.sum(axis=1)[ok].sum())
        viol_slots = int(np.count_nonzero(~ok))
        utils = tuple(float(u) for u in util.mean(axis=0))
        return utils, float(latencies.max()), delivered, viol_slots
