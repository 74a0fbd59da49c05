import math

import numpy as np
import pytest

from oracles import exact_bec_evolution, simpson_bhattacharyya
from polarlink.channels import AwgnBpsk, Bec, RayleighBpsk
from polarlink.construction import (
    ConditionalDensityPair,
    RecursionRule,
    Z0Policy,
    awgn_density_pair,
    bhattacharyya_numeric,
    construct_code,
    evolve,
    initial_z,
    initial_z_awgn,
    initial_z_rayleigh,
    rate_to_k,
    rayleigh_density_pair,
    select_information_set,
    union_bound,
)

RAYLEIGH_MEAN = math.sqrt(2 * math.log(4)) * 0.7


class TestBhattacharyyaNumeric:
    def test_identical_densities_give_one(self):
        pair = awgn_density_pair(1.0)
        same = ConditionalDensityPair(pair.w0, pair.w0, pair.support)
        assert bhattacharyya_numeric(same) == pytest.approx(1.0, abs=1e-8)

    def test_disjoint_supports_give_zero(self):
        def w0(y):
            return 1.0 if 0.0 <= y <= 1.0 else 0.0

        def w1(y):
            return 1.0 if 2.0 <= y <= 3.0 else 0.0

        pair = ConditionalDensityPair(w0, w1, (-0.5, 3.5))
        assert bhattacharyya_numeric(pair) == pytest.approx(0.0, abs=1e-8)

    def test_unit_gaussians(self):
        got = bhattacharyya_numeric(awgn_density_pair(1.0))
        assert got == pytest.approx(math.exp(-0.5), abs=1e-8)
        assert got == pytest.approx(simpson_bhattacharyya(-1, 1, 1.0), abs=1e-7)

    def test_rejects_unnormalized_density(self):
        def w(y):
            return 1.0 if 0.0 <= y <= 2.0 else 0.0  # integrates to 2

        pair = ConditionalDensityPair(w, w, (-1.0, 3.0))
        with pytest.raises(ValueError):
            bhattacharyya_numeric(pair)

    def test_rejects_non_finite_density(self):
        def w(y):
            return math.inf if abs(y) < 0.1 else 0.0

        pair = ConditionalDensityPair(w, w, (-1.0, 1.0))
        with pytest.raises(ValueError):
            bhattacharyya_numeric(pair)


class TestInitialValues:
    def test_awgn_unit_sigma(self):
        assert initial_z_awgn(1.0) == pytest.approx(0.606531, abs=1e-6)
        assert initial_z_awgn(1.0) == pytest.approx(
            simpson_bhattacharyya(-1, 1, 1.0), abs=1e-7
        )

    def test_awgn_small_sigma(self):
        assert initial_z_awgn(0.1) == pytest.approx(math.exp(-50.0), rel=1e-12)

    def test_awgn_large_sigma(self):
        assert initial_z_awgn(10.0) == pytest.approx(0.995012, abs=1e-6)

    def test_awgn_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            initial_z_awgn(0.0)
        with pytest.raises(ValueError):
            initial_z_awgn(-1.0)

    def test_awgn_monotone_in_sigma(self):
        sigmas = np.linspace(0.2, 5.0, 40)
        vals = [initial_z_awgn(s) for s in sigmas]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_rayleigh_zero_db(self):
        # 4**-0.49; the oracle integral confirms this digit-for-digit
        got = initial_z_rayleigh(0.7, 0.0)
        assert got == pytest.approx(0.5069797398950145, abs=1e-9)
        assert got == pytest.approx(
            simpson_bhattacharyya(-RAYLEIGH_MEAN, RAYLEIGH_MEAN, 1.0), abs=1e-7
        )

    def test_rayleigh_low_snr_limit(self):
        assert initial_z_rayleigh(0.7, -100.0) == pytest.approx(1.0, abs=1e-4)

    def test_rayleigh_ten_db(self):
        assert initial_z_rayleigh(0.7, 10.0) == pytest.approx(1.1218e-3, rel=1e-3)

    def test_rayleigh_rejects_bad_k(self):
        with pytest.raises(ValueError):
            initial_z_rayleigh(0.0, 1.0)

    def test_rayleigh_monotone_in_snr(self):
        snrs = np.linspace(-5.0, 15.0, 40)
        vals = [initial_z_rayleigh(0.7, s) for s in snrs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_closed_forms_match_quadrature(self):
        for sigma in (0.5, 1.0, 2.0):
            pair = awgn_density_pair(sigma)
            assert initial_z_awgn(sigma) == pytest.approx(
                bhattacharyya_numeric(pair), abs=1e-6
            )
        for snr in (-3.0, 0.0, 6.0):
            pair = rayleigh_density_pair(0.7, snr)
            assert initial_z_rayleigh(0.7, snr) == pytest.approx(
                bhattacharyya_numeric(pair), abs=1e-6
            )


class TestZ0Policy:
    def test_bec_proposed_is_epsilon(self):
        assert initial_z(Bec(0.5), Z0Policy.proposed()) == 0.5

    def test_constant_overrides_channel(self):
        assert initial_z(AwgnBpsk(1.0), Z0Policy.constant(0.5)) == 0.5

    def test_hybrid_low_snr_uses_proposed(self):
        ch = RayleighBpsk(0.7, 1.0)  # sigma 1 -> 0 dB
        got = initial_z(ch, Z0Policy.hybrid())
        assert got == pytest.approx(0.5069797398950145, abs=1e-9)

    def test_hybrid_boundary_is_strict(self):
        sigma_1db = math.sqrt(10 ** (-0.1))
        ch = RayleighBpsk(0.7, sigma_1db)  # exactly 1 dB -> proposed branch
        assert initial_z(ch, Z0Policy.hybrid()) == pytest.approx(
            initial_z_rayleigh(0.7, 1.0), abs=1e-9
        )

    def test_hybrid_high_snr_uses_half(self):
        sigma_2db = math.sqrt(10 ** (-0.2))
        assert initial_z(RayleighBpsk(0.7, sigma_2db), Z0Policy.hybrid()) == 0.5

    def test_hybrid_rejects_non_rayleigh(self):
        with pytest.raises(ValueError):
            initial_z(AwgnBpsk(1.0), Z0Policy.hybrid())

    def test_parse(self):
        assert Z0Policy.parse("proposed") == Z0Policy.proposed()
        assert Z0Policy.parse("hybrid") == Z0Policy.hybrid()
        assert Z0Policy.parse("constant:0.25") == Z0Policy.constant(0.25)
        with pytest.raises(ValueError):
            Z0Policy.parse("sometimes")
        with pytest.raises(ValueError):
            Z0Policy.constant(1.5)


class TestEvolve:
    def test_bec_two_levels_exact(self):
        got = evolve(0.5, 2, RecursionRule.BEC_EXACT)
        assert got.tolist() == [0.9375, 0.5625, 0.4375, 0.0625]

    def test_type2_one_level(self):
        assert evolve(0.5, 1, RecursionRule.TYPE2).tolist() == [0.5, 0.25]

    def test_zero_fixed_point(self):
        for rule in RecursionRule:
            assert evolve(0.0, 5, rule).tolist() == [0.0] * 32

    def test_one_fixed_point(self):
        for rule in RecursionRule:
            assert evolve(1.0, 3, rule).tolist() == [1.0] * 8

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            evolve(1.2, 3, RecursionRule.TYPE1)
        with pytest.raises(ValueError):
            evolve(-0.1, 3, RecursionRule.TYPE1)

    def test_values_stay_in_unit_interval(self):
        for rule in RecursionRule:
            z = evolve(0.3, 10, rule)
            assert (z >= 0).all() and (z <= 1).all()

    def test_type1_equals_bec_exact(self):
        a = evolve(0.37, 8, RecursionRule.TYPE1)
        b = evolve(0.37, 8, RecursionRule.BEC_EXACT)
        assert (a == b).all()

    def test_branch_ordering(self):
        # plus child z^2 <= parent z <= minus child, for every rule
        rng = np.random.default_rng(17)
        for rule in RecursionRule:
            for z0 in rng.uniform(0.01, 0.99, 10):
                parent = evolve(z0, 3, rule)
                child = evolve(z0, 4, rule)
                assert (child[1::2] <= parent + 1e-15).all()
                assert (child[0::2] >= parent - 1e-15).all()

    def test_minus_branch_sandwich(self):
        # Type2 <= Type3 <= Type1 pointwise on the minus branches
        z = np.linspace(0.0, 1.0, 101)
        t1 = 2 * z - z**2
        t2 = z
        t3 = 0.5 * (2 * z - z**2 + z)
        assert (t2 <= t3 + 1e-15).all()
        assert (t3 <= t1 + 1e-15).all()
        for n in range(1, 6):
            v1 = evolve(0.41, n, RecursionRule.TYPE1)
            v2 = evolve(0.41, n, RecursionRule.TYPE2)
            v3 = evolve(0.41, n, RecursionRule.TYPE3)
            assert (v2[0::2] <= v3[0::2] + 1e-15).all()
            assert (v3[0::2] <= v1[0::2] + 1e-15).all()

    def test_erasure_rate_conservation_small_levels(self):
        # dyadic values fit float64 exactly through level 5
        levels = exact_bec_evolution(5)
        z = np.array([0.5])
        for lvl in range(1, 6):
            z = evolve(0.5, lvl, RecursionRule.BEC_EXACT)
            d, nums = levels[lvl]
            assert z.tolist() == [a / (1 << d) for a in nums]
            assert np.mean(1.0 - z) == 0.5


class TestSelection:
    def test_picks_smallest(self):
        got = select_information_set(np.array([0.9, 0.1, 0.5, 0.2]), 2)
        assert got.tolist() == [1, 3]

    def test_empty(self):
        assert select_information_set(np.array([0.5]), 0).tolist() == []

    def test_tie_break_low_index(self):
        got = select_information_set(np.array([0.5, 0.5, 0.5, 0.5]), 2)
        assert got.tolist() == [0, 1]

    def test_rejects_oversize(self):
        with pytest.raises(ValueError):
            select_information_set(np.array([0.5, 0.5]), 3)


class TestUnionBound:
    Z = np.array([0.9375, 0.5625, 0.4375, 0.0625])

    def test_single_term(self):
        assert union_bound(self.Z, [3]) == pytest.approx(0.0625)

    def test_empty_set(self):
        assert union_bound(self.Z, []) == 0.0

    def test_two_terms(self):
        assert union_bound(self.Z, [2, 3]) == pytest.approx(0.5)

    def test_can_exceed_one(self):
        assert union_bound(self.Z, [0, 1, 2, 3]) > 1.0

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            union_bound(self.Z, [4])


def test_rate_to_k():
    assert rate_to_k(8, 0.25) == 64
    assert rate_to_k(3, 0.5) == 4
    with pytest.raises(ValueError):
        rate_to_k(3, 1.5)


def test_construct_code_selects_reliable_channels():
    cfg, z = construct_code(Bec(0.5), 3, 2, RecursionRule.BEC_EXACT)
    assert cfg.K == 2 and cfg.N == 8
    assert (np.sort(z[cfg.info_set]) <= np.sort(z[cfg.frozen_set()])[:2]).all()
    # most reliable index for the erasure channel at rate 1/4 is the last one
    assert 7 in cfg.info_set
