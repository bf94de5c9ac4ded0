"""DDQN learner: Boltzmann behaviour policy, replay, training loop."""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .qnet import (MLP, MlpSpec, Optimizer, ddqn_targets, forward,
                   soft_update, train_step)
from .replay import PrioritizedReplayBuffer

__all__ = [
    "ExplorationSchedule", "TrainConfig", "TrainResult",
    "boltzmann_probs", "select_action", "ddqn_targets", "train",
    "greedy_policy", "run_policy",
]


@dataclass
class ExplorationSchedule:
    """Softmax temperature with multiplicative decay down to a floor."""

    alpha_temp: float = 1.0
    decay: float = 0.995
    floor: float = 0.01

    def __post_init__(self):
        if self.alpha_temp <= 0 or self.floor <= 0:
            raise ValueError("temperature and floor must be strictly positive")

    def anneal(self) -> None:
        self.alpha_temp = max(self.alpha_temp * self.decay, self.floor)


def boltzmann_probs(q_values: np.ndarray, alpha: float) -> np.ndarray:
    """Softmax over Q/alpha with max subtraction for numerical stability."""
    q = np.asarray(q_values, dtype=np.float64)
    z = (q - q.max()) / alpha
    e = np.exp(z)
    return e / e.sum()


def select_action(q_values: np.ndarray, schedule: ExplorationSchedule,
                  rng: np.random.Generator) -> int:
    probs = boltzmann_probs(q_values, schedule.alpha_temp)
    return int(rng.choice(len(probs), p=probs))


@dataclass
class TrainConfig:
    gamma: float = 0.95
    lr: float = 1e-3
    optimizer: str = "adam"
    batch_size: int = 64
    warmup: int = 500
    updates_per_step: int = 1
    kappa: float = 5e-3
    total_steps: int = 3000
    episode_len: int = 200
    buffer_capacity: int = 100_000
    per_alpha: float = 0.6
    per_beta_start: float = 0.4
    per_beta_end: float = 1.0
    per_eps: float = 1e-6
    temp_start: float = 1.0
    temp_decay: float = 0.995
    temp_floor: float = 0.01
    hidden_dims: Tuple[int, ...] = (128, 128)
    seed: int = 0

    def __post_init__(self):
        self.hidden_dims = tuple(self.hidden_dims)
        if not self.batch_size <= self.warmup <= self.buffer_capacity:
            raise ValueError("need batch_size <= warmup <= buffer_capacity")


@dataclass
class LogRow:
    step: int
    reward: float
    loss: float
    temperature: float
    beta_per: float
    cell_sum_util: float
    max_latency_us: float
    violation: int
    configs: Tuple[Tuple[int, int, int], ...]


@dataclass
class TrainResult:
    net: MLP
    target_net: MLP
    log: List[LogRow] = field(default_factory=list)


def _seed_for(master: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master, spawn_key=(stream,))


def train(env, cfg: TrainConfig,
          checkpoint_cb: Optional[Callable[[int, MLP, MLP], None]] = None) -> TrainResult:
    """Run the DDQN training loop on an environment.

    ``env`` must expose reset() -> features, step(a) -> (features, reward,
    info), n_actions and obs_dim. Episodes are truncated every
    ``episode_len`` steps; there are no terminal states.
    """
    spec = MlpSpec(env.obs_dim, cfg.hidden_dims, env.n_actions,
                   init_seed=int(_seed_for(cfg.seed, 2).generate_state(1)[0]))
    net = MLP(spec)
    target_net = net.copy()
    opt = Optimizer(net, lr=cfg.lr, method=cfg.optimizer)
    buf = PrioritizedReplayBuffer(cfg.buffer_capacity, env.obs_dim,
                                  alpha=cfg.per_alpha, beta=cfg.per_beta_start,
                                  eps=cfg.per_eps,
                                  seed=int(_seed_for(cfg.seed, 4).generate_state(1)[0]))
    action_rng = np.random.default_rng(_seed_for(cfg.seed, 3))
    schedule = ExplorationSchedule(cfg.temp_start, cfg.temp_decay, cfg.temp_floor)

    total_updates = max(1, (cfg.total_steps - cfg.warmup) * cfg.updates_per_step)
    updates_done = 0
    result = TrainResult(net=net, target_net=target_net)
    s = env.reset()
    for step in range(cfg.total_steps):
        q = forward(net, s)
        a = select_action(q, schedule, action_rng)
        s2, reward, info = env.step(a)
        buf.push(s, a, reward, s2)
        loss = 0.0
        if len(buf) >= cfg.warmup:
            for _ in range(cfg.updates_per_step):
                batch, idx, weights = buf.sample(cfg.batch_size)
                loss, td = train_step(net, target_net, batch, weights, opt,
                                      cfg.gamma)
                soft_update(target_net, net, cfg.kappa)
                buf.update_priorities(idx, td)
                schedule.anneal()
                updates_done += 1
                frac = min(1.0, updates_done / total_updates)
                buf.beta = cfg.per_beta_start + frac * (cfg.per_beta_end
                                                        - cfg.per_beta_start)
        result.log.append(LogRow(
            step=step,
            reward=float(reward),
            loss=float(loss),
            temperature=schedule.alpha_temp,
            beta_per=buf.beta,
            cell_sum_util=getattr(info, "cell_sum_util", 0.0),
            max_latency_us=getattr(info, "max_latency_s", 0.0) * 1e6,
            violation=1 - getattr(info, "indicator", 1),
            configs=getattr(info, "configs", ()),
        ))
        if checkpoint_cb is not None:
            checkpoint_cb(step, net, target_net)
        s = s2
        if (step + 1) % cfg.episode_len == 0:
            s = env.reset()
    return result


def greedy_policy(net: MLP) -> Callable[[np.ndarray], int]:
    """Deterministic argmax policy (the alpha -> 0 limit of Boltzmann)."""
    def policy(features: np.ndarray) -> int:
        return int(np.argmax(forward(net, features)))
    return policy


def run_policy(env, policy: Callable[[np.ndarray], int], n_steps: int):
    """Roll a fixed policy and collect the per-step environment infos."""
    s = env.reset()
    infos = []
    for _ in range(n_steps):
        s, _, info = env.step(policy(s))
        infos.append(info)
    return infos
