"""Hot inner loops of the slot simulator and the replay sum tree.

Every kernel exists in two variants: a numba-jitted loop and a numpy
fallback, selected once at import time via :mod:`fhcomp.backend`.
Integer bit counts are exact in both; float expressions use the same
operation order so the paths agree bitwise.
"""

import numpy as np

from .backend import NUMBA_ENABLED, maybe_njit


# ---------------------------------------------------------------------------
# slot bit accounting
# ---------------------------------------------------------------------------

def _slot_bits_loop(n_prb, q, b, r, n_re, n_layers, n_ant, payload, weight):
    n_slots, k = n_prb.shape
    for t in range(n_slots):
        for c in range(k):
            n = n_prb[t, c]
            payload[t, c] = n_re * n_layers * n * q[c]
            groups = (n + r[c] - 1) // r[c]
            weight[t, c] = groups * n_layers * n_ant * b[c]


_slot_bits_jit = maybe_njit(_slot_bits_loop)


def slot_bits(n_prb, q, b, r, n_re, n_layers, n_ant):
    """Payload and precoder-weight bits per (slot, cell).

    ``n_prb`` is an int64 array of shape (n_slots, K); ``q``, ``b``, ``r``
    are int64 arrays of per-cell parameters.
    """
    n_prb = np.ascontiguousarray(n_prb, dtype=np.int64)
    q = np.ascontiguousarray(q, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    r = np.ascontiguousarray(r, dtype=np.int64)
    if NUMBA_ENABLED:
        payload = np.empty_like(n_prb)
        weight = np.empty_like(n_prb)
        _slot_bits_jit(n_prb, q, b, r, n_re, n_layers, n_ant, payload, weight)
        return payload, weight
    payload = n_re * n_layers * n_prb * q[None, :]
    weight = ((n_prb + r[None, :] - 1) // r[None, :]) * n_layers * n_ant * b[None, :]
    return payload, weight


# ---------------------------------------------------------------------------
# shared-link burst latency
# ---------------------------------------------------------------------------

def _slot_latency_loop(total_bits, c_fh_bps, alpha_burst, d_proc_s, jitter, out):
    for t in range(total_bits.shape[0]):
        out[t] = alpha_burst * total_bits[t] / c_fh_bps + d_proc_s + jitter[t]


_slot_latency_jit = maybe_njit(_slot_latency_loop)


def slot_latencies(total_bits, c_fh_bps, alpha_burst, d_proc_s, jitter):
    """Per-slot FH latency for aggregate offered bits (one value per slot)."""
    total_bits = np.ascontiguousarray(total_bits, dtype=np.float64)
    jitter = np.ascontiguousarray(jitter, dtype=np.float64)
    if NUMBA_ENABLED:
        out = np.empty_like(total_bits)
        _slot_latency_jit(total_bits, c_fh_bps, alpha_burst, d_proc_s, jitter, out)
        return out
    return alpha_burst * total_bits / c_fh_bps + d_proc_s + jitter


# ---------------------------------------------------------------------------
# sum tree (binary indexed, root at 1, leaves at [capacity, 2*capacity))
# ---------------------------------------------------------------------------

def _tree_set_many_loop(tree, capacity, leaves, values):
    for i in range(leaves.shape[0]):
        pos = capacity + leaves[i]
        delta = values[i] - tree[pos]
        while pos >= 1:
            tree[pos] += delta
            pos >>= 1


def _tree_find_many_loop(tree, capacity, targets, out):
    for i in range(targets.shape[0]):
        v = targets[i]
        pos = 1
        while pos < capacity:
            left = pos << 1
            if v < tree[left]:
                pos = left
            else:
                v -= tree[left]
                pos = left + 1
        out[i] = pos - capacity


_tree_set_many = maybe_njit(_tree_set_many_loop)
_tree_find_many_jit = maybe_njit(_tree_find_many_loop)


def tree_set_many(tree, capacity, leaves, values):
    """Write leaf values and propagate partial sums up to the root."""
    _tree_set_many(
        tree,
        capacity,
        np.ascontiguousarray(leaves, dtype=np.int64),
        np.ascontiguousarray(values, dtype=np.float64),
    )


def tree_find_many(tree, capacity, targets):
    """Map prefix-sum targets in [0, total) to leaf indices."""
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    out = np.empty(targets.shape[0], dtype=np.int64)
    _tree_find_many_jit(tree, capacity, targets, out)
    return out
