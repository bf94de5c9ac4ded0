import math

import numpy as np
import pytest

from fhcomp.fhcore import (CompressionConfig, ConfigSpace, SlotRecord,
                           SystemConfig, action_space_cardinality,
                           average_utilization, fh_rate, payload_bits,
                           slot_utilization, weight_bits)

SYS = SystemConfig()


class TestPayloadBits:
    def test_full_load_q6(self):
        assert payload_bits(SYS, 273, 6) == 3_302_208

    def test_full_load_q8(self):
        assert payload_bits(SYS, 273, 8) == 4_402_944

    def test_zero_prbs(self):
        assert payload_bits(SYS, 0, 6) == 0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            payload_bits(SYS, 274, 6)
        with pytest.raises(ValueError):
            payload_bits(SYS, -1, 6)
        with pytest.raises(ValueError):
            payload_bits(SYS, 100, 4)


class TestWeightBits:
    def test_examples(self):
        assert weight_bits(SYS, 273, 4, 16) == 847_872
        assert weight_bits(SYS, 273, 1, 22) == 4_612_608
        assert weight_bits(SYS, 0, 4, 16) == 0

    def test_rejects_bad_granularity(self):
        with pytest.raises(ValueError):
            weight_bits(SYS, 100, 0, 16)
        with pytest.raises(ValueError):
            weight_bits(SYS, 100, 3, 16)

    def test_ceiling_boundary(self):
        # n = r*m and n = r*m - r + 1 land in the same ceiling bucket
        for r_w in (2, 4):
            for m in range(1, 60):
                hi = weight_bits(SYS, r_w * m, r_w, 16)
                lo = weight_bits(SYS, r_w * m - r_w + 1, r_w, 16)
                assert hi == lo


class TestRateAndUtil:
    def test_rate_examples(self):
        assert fh_rate(SYS, 273, CompressionConfig(6, 16, 4)) == pytest.approx(8.30016e9)
        assert fh_rate(SYS, 273, CompressionConfig(8, 16, 4)) == pytest.approx(10.501632e9)
        assert fh_rate(SYS, 0, CompressionConfig(8, 22, 1)) == 0.0

    def test_utilization(self):
        assert slot_utilization(8.30016e9, 25e9) == pytest.approx(0.3320064)
        assert slot_utilization(25e9, 25e9) == 1.0
        assert slot_utilization(0.0, 25e9) == 0.0
        with pytest.raises(ValueError):
            slot_utilization(1e9, 0.0)


def _record(t, k, util):
    return SlotRecord(t=t, k=k, n_prb=0, config=CompressionConfig(6, 16, 4),
                      payload_bits=0, weight_bits=0, rate_bps=0.0, util=util)


class TestAverageUtilization:
    def test_single_slot_three_cells(self):
        recs = [_record(0, k, 0.332) for k in range(3)]
        assert average_utilization(recs) == pytest.approx(0.996)

    def test_all_zero(self):
        recs = [_record(t, k, 0.0) for t in range(4) for k in range(2)]
        assert average_utilization(recs) == 0.0

    def test_mean_over_slots_of_cell_sums(self):
        recs = [_record(0, 0, 0.1), _record(0, 1, 0.3),
                _record(1, 0, 0.2), _record(1, 1, 0.4)]
        assert average_utilization(recs) == pytest.approx(0.5)

    def test_rejects_incomplete_grid(self):
        recs = [_record(0, 0, 0.1), _record(0, 1, 0.3), _record(1, 0, 0.2)]
        with pytest.raises(ValueError):
            average_utilization(recs)


class TestActionSpaceCardinality:
    def test_default_space_counts(self):
        assert action_space_cardinality(2, 7, 3, 3) == 74_088
        assert action_space_cardinality(2, 7, 3, 1) == 42
        assert action_space_cardinality(1, 1, 1, 5) == 1


class TestConfigSpace:
    def test_sets_must_increase(self):
        with pytest.raises(ValueError):
            ConfigSpace(q_set=(8, 6))
        with pytest.raises(ValueError):
            ConfigSpace(b_set=())

    def test_index_roundtrip(self):
        space = ConfigSpace()
        cfg = space.config_at(1, 3, 2)
        assert cfg == CompressionConfig(8, 19, 4)
        assert space.indices_of(cfg) == (1, 3, 2)


class TestSystemConfigInvariants:
    def test_re_count_fixed(self):
        with pytest.raises(ValueError):
            SystemConfig(n_re_per_prb_slot=167)

    def test_layers_bounded_by_antennas(self):
        with pytest.raises(ValueError):
            SystemConfig(n_layers=65)


def _brute_force_bits(n_prb, q, b_w, r_w):
    """Independent PRB-by-PRB / weight-by-weight bit count."""
    payload = 0
    for _ in range(n_prb):
        for _layer in range(SYS.n_layers):
            payload += SYS.n_re_per_prb_slot * q
    groups = set()
    for prb in range(n_prb):
        groups.add(prb // r_w)
    weight = 0
    for _g in groups:
        weight += SYS.n_layers * SYS.n_ant * b_w
    return payload, weight


class TestBruteForceExactness:
    def test_random_draws_match_oracle(self):
        rng = np.random.default_rng(1234)
        space = ConfigSpace()
        for _ in range(1000):
            n_prb = int(rng.integers(0, SYS.n_prb_max + 1))
            q = int(rng.choice(space.q_set))
            b_w = int(rng.choice(space.b_set))
            r_w = int(rng.choice(space.r_set))
            p_ref, w_ref = _brute_force_bits(n_prb, q, b_w, r_w)
            assert payload_bits(SYS, n_prb, q) == p_ref
            assert weight_bits(SYS, n_prb, r_w, b_w) == w_ref
            rate = fh_rate(SYS, n_prb, CompressionConfig(q, b_w, r_w))
            assert rate * SYS.t_slot_s == pytest.approx(p_ref + w_ref, rel=1e-12)

    def test_monotonicity(self):
        for n in (1, 50, 273):
            assert payload_bits(SYS, n, 8) > payload_bits(SYS, n, 6)
            assert weight_bits(SYS, n, 1, 16) >= weight_bits(SYS, n, 2, 16) \
                >= weight_bits(SYS, n, 4, 16)
            assert weight_bits(SYS, n, 4, 17) > weight_bits(SYS, n, 4, 16)
        assert payload_bits(SYS, 101, 6) > payload_bits(SYS, 100, 6)


class TestReferenceDimensioning:
    def test_reference_config_fits_and_q8_exceeds(self):
        agg = 3 * fh_rate(SYS, 273, CompressionConfig(6, 16, 4))
        assert agg == pytest.approx(24.90048e9)
        assert agg <= 25e9
        space = ConfigSpace()
        for b_w in space.b_set:
            for r_w in space.r_set:
                agg8 = 3 * fh_rate(SYS, 273, CompressionConfig(8, b_w, r_w))
                assert agg8 > 25e9
