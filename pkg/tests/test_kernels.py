import json
import os
import subprocess
import sys

import numpy as np

from fhcomp import _kernels as K
from fhcomp.backend import backend_name

RNG = np.random.default_rng(0)


def _random_inputs(n_slots=500, k=3):
    n_prb = RNG.integers(1, 274, size=(n_slots, k)).astype(np.int64)
    q = np.array([6, 8, 6], dtype=np.int64)
    b = np.array([16, 19, 22], dtype=np.int64)
    r = np.array([4, 2, 1], dtype=np.int64)
    return n_prb, q, b, r


class TestSlotBitsParity:
    def test_loop_matches_vectorized_expression(self):
        n_prb, q, b, r = _random_inputs()
        payload, weight = K.slot_bits(n_prb, q, b, r, 168, 12, 64)
        payload_ref = 168 * 12 * n_prb * q[None, :]
        weight_ref = ((n_prb + r[None, :] - 1) // r[None, :]) * 12 * 64 * b[None, :]
        assert np.array_equal(payload, payload_ref)
        assert np.array_equal(weight, weight_ref)

    def test_active_backend_matches_pure_python_loop(self):
        n_prb, q, b, r = _random_inputs(n_slots=50)
        payload, weight = K.slot_bits(n_prb, q, b, r, 168, 12, 64)
        p2 = np.empty_like(n_prb)
        w2 = np.empty_like(n_prb)
        K._slot_bits_loop(n_prb, q, b, r, 168, 12, 64, p2, w2)
        assert np.array_equal(payload, p2)
        assert np.array_equal(weight, w2)


class TestLatencyParity:
    def test_active_backend_matches_pure_python_loop(self):
        total = RNG.uniform(0, 1.5e7, size=1000)
        jitter = RNG.uniform(0, 5e-6, size=1000)
        out = K.slot_latencies(total, 25e9, 0.5, 10e-6, jitter)
        ref = np.empty_like(out)
        K._slot_latency_loop(total, 25e9, 0.5, 10e-6, jitter, ref)
        # bitwise equality: both paths use the same float op order
        assert np.array_equal(out, ref)


class TestSumTreeParity:
    def test_set_and_find_match_pure_python_loop(self):
        capacity = 64
        idx = RNG.integers(0, capacity, size=200).astype(np.int64)
        vals = RNG.uniform(0.01, 5.0, size=200)

        tree_a = np.zeros(2 * capacity)
        K.tree_set_many(tree_a, capacity, idx, vals)
        tree_b = np.zeros(2 * capacity)
        K._tree_set_many_loop(tree_b, capacity, idx, vals)
        assert np.array_equal(tree_a, tree_b)

        targets = RNG.uniform(0, tree_a[1], size=500)
        found_a = K.tree_find_many(tree_a, capacity, targets)
        found_b = np.empty(500, dtype=np.int64)
        K._tree_find_many_loop(tree_b, capacity, targets, found_b)
        assert np.array_equal(found_a, found_b)


class TestBackendFlag:
    def _digest_in_subprocess(self, flag):
        code = (
            "import json, numpy as np\n"
            "from fhcomp._kernels import slot_bits, slot_latencies\n"
            "from fhcomp.backend import backend_name\n"
            "rng = np.random.default_rng(7)\n"
            "n_prb = rng.integers(1, 274, size=(200, 3)).astype(np.int64)\n"
            "q = np.array([6, 8, 6], dtype=np.int64)\n"
            "b = np.array([16, 19, 22], dtype=np.int64)\n"
            "r = np.array([4, 2, 1], dtype=np.int64)\n"
            "p, w = slot_bits(n_prb, q, b, r, 168, 12, 64)\n"
            "lat = slot_latencies((p + w).sum(axis=1).astype(float), 25e9,"
            " 0.5, 10e-6, rng.uniform(0, 5e-6, 200))\n"
            "print(json.dumps({'backend': backend_name(),"
            " 'p': int(p.sum()), 'w': int(w.sum()),"
            " 'lat': lat.tobytes().hex()}))\n")
        env = dict(os.environ, FHCOMP_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        return json.loads(out.stdout.strip().splitlines()[-1])

    def test_forced_backends_agree_bitwise(self):
        a = self._digest_in_subprocess("0")
        b = self._digest_in_subprocess("1")
        assert a["backend"] == "numpy"
        assert b["backend"] == "numba"
        assert a["p"] == b["p"]
        assert a["w"] == b["w"]
        assert a["lat"] == b["lat"]

    def test_backend_name_reports_active_choice(self):
        assert backend_name() in ("numpy", "numba")
