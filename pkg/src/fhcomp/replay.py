"""Prioritized experience replay over a sum tree (proportional variant)."""

import numpy as np

from ._kernels import tree_find_many, tree_set_many


class SumTree:
    """Binary indexed tree of priorities; root at 1, leaves at capacity+i."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        # round up to a power of two so leaf/parent indexing stays trivial
        self.capacity = 1
        while self.capacity < capacity:
            self.capacity *= 2
        self.n_leaves = capacity
        self.tree = np.zeros(2 * self.capacity)

    def set_many(self, leaves, values) -> None:
        tree_set_many(self.tree, self.capacity, leaves, values)

    def total(self) -> float:
        return float(self.tree[1])

    def leaf(self, idx: int) -> float:
        return float(self.tree[self.capacity + idx])

    def find_many(self, targets) -> np.ndarray:
        return tree_find_many(self.tree, self.capacity, targets)


class PrioritizedReplayBuffer:
    """Ring buffer of transitions sampled proportionally to priority^alpha.

    Priorities are |TD error| + eps; new items enter at the running
    maximum priority so they are replayed at least once. Importance
    weights are (N * P(i))^-beta normalized to max 1.
    """

    def __init__(self, capacity: int, obs_dim: int, alpha: float = 0.6,
                 beta: float = 0.4, eps: float = 1e-6, seed: int = 0):
        if not 0 <= alpha:
            raise ValueError("alpha must be non-negative")
        self.capacity = capacity
        self.alpha = alpha
        self.beta = beta
        self.eps = eps
        self.states = np.zeros((capacity, obs_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, obs_dim))
        self.priorities = np.zeros(capacity)
        self.tree = SumTree(capacity)
        self.size = 0
        self._next = 0
        self.max_priority = eps
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return self.size

    def push(self, state, action, reward, next_state) -> None:
        i = self._next
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self._set_priorities(np.array([i]), np.array([self.max_priority]))
        self._next = (self._next + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int):
        """Proportional sample: (batch tuple, tree indices, importance weights)."""
        if self.size < batch_size:
            raise ValueError(
                f"buffer holds {self.size} < batch_size {batch_size}")
        targets = self._rng.random(batch_size) * self.tree.total()
        idx = self.tree.find_many(targets)
        probs = self.tree.tree[self.tree.capacity + idx] / self.tree.total()
        weights = (self.size * probs) ** (-self.beta)
        # normalize by the largest possible weight (smallest stored probability)
        min_prob = self.priorities[:self.size].min() ** self.alpha / self.tree.total()
        weights /= (self.size * min_prob) ** (-self.beta)
        batch = (self.states[idx], self.actions[idx], self.rewards[idx],
                 self.next_states[idx])
        return batch, idx, weights

    def update_priorities(self, indices, td_errors) -> None:
        indices = np.asarray(indices, dtype=np.int64)
        if np.any(indices < 0) or np.any(indices >= self.size):
            raise IndexError("priority index out of range")
        prios = np.abs(np.asarray(td_errors, dtype=np.float64)) + self.eps
        self._set_priorities(indices, prios)

    def _set_priorities(self, indices, prios) -> None:
        self.priorities[indices] = prios
        self.tree.set_many(indices, prios ** self.alpha)
        m = float(prios.max())
        if m > self.max_priority:
            self.max_priority = m
