"""Ground-truth baselines: exhaustive static-config search, value iteration."""

import itertools
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .fhcore import (CompressionConfig, ConfigSpace, DEFAULT_SPACE,
                     SystemConfig, fh_rate, payload_bits, weight_bits)
from .latency import LatencyModelConfig


class InfeasibleError(ValueError):
    """No configuration satisfies the requested constraint."""


@dataclass(frozen=True)
class StaticConfigResult:
    config: CompressionConfig
    aggregate_rate_bps: float
    cell_sum_util: float


def enumerate_configs(space: ConfigSpace = DEFAULT_SPACE):
    for q, b, r in itertools.product(space.q_set, space.b_set, space.r_set):
        yield CompressionConfig(q, b, r)


def _feasible(sys: SystemConfig, n_prb: int, cfg: CompressionConfig,
              space: ConfigSpace, mode: str,
              latency_cfg: Optional[LatencyModelConfig],
              tau_max_s: Optional[float]) -> Tuple[bool, float]:
    rate = fh_rate(sys, n_prb, cfg, space)
    aggregate = sys.k_cells * rate
    if mode == "capacity":
        return aggregate <= sys.c_fh_bps, aggregate
    if mode == "latency":
        if latency_cfg is None or tau_max_s is None:
            raise ValueError("latency mode needs latency_cfg and tau_max_s")
        bits = (payload_bits(sys, n_prb, cfg.q, space)
                + weight_bits(sys, n_prb, cfg.r_w, cfg.b_w, space))
        # worst-case jitter: oracle-feasible implies the constraint holds w.p. 1
        worst = (latency_cfg.alpha_burst * (sys.k_cells * bits) / sys.c_fh_bps
                 + latency_cfg.d_proc_s + latency_cfg.jitter_max_s)
        return worst < tau_max_s, aggregate
    raise ValueError(f"unknown mode {mode!r}")


def best_static_config(sys: SystemConfig, n_prb: int, mode: str = "capacity",
                       space: ConfigSpace = DEFAULT_SPACE,
                       latency_cfg: Optional[LatencyModelConfig] = None,
                       tau_max_s: Optional[float] = None) -> StaticConfigResult:
    """Best symmetric static configuration (same triple on all K cells).

    Enumerates the whole configuration space at the given load and
    returns the feasible configuration maximizing cell-sum utilization.
    Ties break deterministically by (higher q, lower r_w, higher b_w).
    """
    best = None
    best_key = None
    for cfg in enumerate_configs(space):
        ok, aggregate = _feasible(sys, n_prb, cfg, space, mode, latency_cfg, tau_max_s)
        if not ok:
            continue
        util = aggregate / sys.c_fh_bps
        key = (util, cfg.q, -cfg.r_w, cfg.b_w)
        if best_key is None or key > best_key:
            best_key = key
            best = StaticConfigResult(cfg, aggregate, util)
    if best is None:
        raise InfeasibleError(
            f"no feasible configuration at n_prb={n_prb} in {mode} mode")
    return best


def best_static_config_asymmetric(sys: SystemConfig, n_prb: int,
                                  mode: str = "latency",
                                  space: ConfigSpace = DEFAULT_SPACE,
                                  latency_cfg: Optional[LatencyModelConfig] = None,
                                  tau_max_s: Optional[float] = None):
    """Per-cell asymmetric enumeration; exponential, guarded to K <= 3."""
    if sys.k_cells > 3:
        raise ValueError("asymmetric enumeration limited to K <= 3")
    configs = list(enumerate_configs(space))
    bits = {}
    for cfg in configs:
        bits[cfg] = (payload_bits(sys, n_prb, cfg.q, space)
                     + weight_bits(sys, n_prb, cfg.r_w, cfg.b_w, space))
    best = None
    best_util = -1.0
    for combo in itertools.product(configs, repeat=sys.k_cells):
        total = sum(bits[c] for c in combo)
        aggregate = total / sys.t_slot_s
        if mode == "capacity":
            ok = aggregate <= sys.c_fh_bps
        else:
            if latency_cfg is None or tau_max_s is None:
                raise ValueError("latency mode needs latency_cfg and tau_max_s")
            worst = (latency_cfg.alpha_burst * total / sys.c_fh_bps
                     + latency_cfg.d_proc_s + latency_cfg.jitter_max_s)
            ok = worst < tau_max_s
        if ok and aggregate / sys.c_fh_bps > best_util:
            best_util = aggregate / sys.c_fh_bps
            best = combo
    if best is None:
        raise InfeasibleError("no feasible asymmetric configuration")
    return best, best_util


def value_iteration(transitions: np.ndarray, rewards: np.ndarray,
                    gamma: float, tol: float = 1e-10,
                    max_iter: int = 1_000_000) -> np.ndarray:
    """Optimal Q table for an explicit finite MDP.

    ``transitions`` has shape (S, A, S) with stochastic rows;
    ``rewards`` has shape (S, A).
    """
    transitions = np.asarray(transitions, dtype=np.float64)
    rewards = np.asarray(rewards, dtype=np.float64)
    n_s, n_a, n_s2 = transitions.shape
    if n_s2 != n_s or rewards.shape != (n_s, n_a):
        raise ValueError("inconsistent MDP shapes")
    row_sums = transitions.sum(axis=2)
    if not np.allclose(row_sums, 1.0, atol=1e-12):
        raise ValueError("transition rows must sum to 1")
    if np.any(transitions < 0):
        raise ValueError("transition probabilities must be non-negative")
    q = np.zeros((n_s, n_a))
    for _ in range(max_iter):
        v = q.max(axis=1)
        q_new = rewards + gamma * transitions @ v
        if np.max(np.abs(q_new - q)) < tol:
            return q_new
        q = q_new
    raise RuntimeError("value iteration did not converge")
