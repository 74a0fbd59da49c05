import math

import numpy as np
import pytest
from scipy import stats

from polarlink.channels import (
    LLR_MAX,
    AwgnBpsk,
    Bec,
    Observation,
    RayleighBpsk,
    llr,
    modulate_bpsk,
    sigma2_to_snr_db,
    snr_db_to_sigma2,
    transmit,
)
from polarlink.seeding import derive_seed, make_rng, splitmix64


def test_snr_conversion():
    assert snr_db_to_sigma2(0.0) == pytest.approx(1.0)
    assert snr_db_to_sigma2(10.0) == pytest.approx(0.1)
    assert snr_db_to_sigma2(-10.0) == pytest.approx(10.0)
    assert sigma2_to_snr_db(0.1) == pytest.approx(10.0)


def test_channel_validation():
    with pytest.raises(ValueError):
        Bec(1.5)
    with pytest.raises(ValueError):
        AwgnBpsk(0.0)
    with pytest.raises(ValueError):
        RayleighBpsk(0.0, 1.0)
    with pytest.raises(ValueError):
        RayleighBpsk(0.7, -1.0)


def test_modulate_bpsk():
    assert modulate_bpsk([0, 0]).tolist() == [-1.0, -1.0]
    assert modulate_bpsk([1]).tolist() == [1.0]
    assert modulate_bpsk([]).tolist() == []


def test_awgn_near_zero_noise_is_identity():
    ch = AwgnBpsk(1e-9)
    sym = modulate_bpsk([0, 1, 1, 0])
    obs = transmit(sym, ch, make_rng(0))
    assert np.allclose(obs.y, sym, atol=1e-6)


def test_awgn_noise_moments():
    ch = AwgnBpsk(0.8)
    sym = np.ones(1_000_000)
    obs = transmit(sym, ch, make_rng(3))
    noise = obs.y - sym
    assert abs(noise.mean()) < 0.01 * 0.8
    assert noise.var() == pytest.approx(0.64, rel=0.01)


def test_rayleigh_fading_power():
    # mean squared amplitude is 2 k^2 = 0.98 at k = 0.7
    ch = RayleighBpsk(0.7, 0.5)
    obs = transmit(np.ones(1_000_000), ch, make_rng(4))
    assert obs.fading.min() >= 0
    assert float(np.mean(obs.fading**2)) == pytest.approx(0.98, abs=0.01)


def test_rayleigh_amplitude_distribution():
    ch = RayleighBpsk(0.7, 0.5)
    obs = transmit(np.ones(1_000_000), ch, make_rng(5))
    stat, _ = stats.kstest(obs.fading, stats.rayleigh(scale=0.7).cdf)
    assert stat < 0.01


def test_bec_extremes():
    bits = np.array([0.0, 1.0, 1.0, 0.0])
    all_erased = transmit(bits, Bec(1.0), make_rng(0))
    assert all_erased.erased.all()
    none_erased = transmit(bits, Bec(0.0), make_rng(0))
    assert not none_erased.erased.any()
    assert (none_erased.y == bits).all()


def test_transmit_rejects_wrong_alphabet():
    with pytest.raises(ValueError):
        transmit(np.array([0.0, 1.0]), AwgnBpsk(1.0), make_rng(0))
    with pytest.raises(ValueError):
        transmit(np.array([-1.0, 1.0]), Bec(0.5), make_rng(0))


def test_llr_awgn_values():
    ch = AwgnBpsk(1.0)
    obs = Observation(y=np.array([0.0, -1.0, 1.0]))
    got = llr(obs, ch)
    assert got.tolist() == [0.0, 2.0, -2.0]


def test_llr_clipping():
    ch = AwgnBpsk(1e-3)
    obs = Observation(y=np.array([-1.0, 1.0]))
    assert llr(obs, ch).tolist() == [LLR_MAX, -LLR_MAX]


def test_llr_bec_values():
    ch = Bec(0.5)
    obs = Observation(
        y=np.array([0.0, 1.0, 1.0]),
        erased=np.array([False, False, True]),
    )
    assert llr(obs, ch).tolist() == [LLR_MAX, -LLR_MAX, 0.0]


def test_llr_rayleigh_uses_fading():
    ch = RayleighBpsk(0.7, 1.0)
    obs = Observation(y=np.array([1.0, -2.0]), fading=np.array([0.5, 2.0]))
    assert llr(obs, ch).tolist() == [-1.0, 8.0]


def test_llr_variant_mismatch():
    awgn_obs = Observation(y=np.array([0.0]))
    with pytest.raises(ValueError):
        llr(awgn_obs, Bec(0.5))
    with pytest.raises(ValueError):
        llr(awgn_obs, RayleighBpsk(0.7, 1.0))
    rayleigh_obs = Observation(y=np.array([0.0]), fading=np.array([1.0]))
    with pytest.raises(ValueError):
        llr(rayleigh_obs, AwgnBpsk(1.0))


def test_llr_sign_favors_transmitted_bit():
    for sigma in (0.5, 1.2, 3.0):
        ch = AwgnBpsk(sigma)
        sym = modulate_bpsk(np.zeros(200_000, dtype=np.uint8))
        obs = transmit(sym, ch, make_rng(6))
        vals = llr(obs, ch)
        assert (vals > 0).mean() > 0.5


class TestReproducibility:
    def test_same_seed_bitwise_identical(self):
        ch = RayleighBpsk(0.7, 0.7)
        sym = modulate_bpsk(np.ones(4096, dtype=np.uint8))
        a = transmit(sym, ch, make_rng(99))
        b = transmit(sym, ch, make_rng(99))
        assert (a.y == b.y).all() and (a.fading == b.fading).all()

    def test_different_seeds_decorrelate(self):
        ch = AwgnBpsk(1.0)
        sym = np.ones(100_000)
        a = transmit(sym, ch, make_rng(1)).y - sym
        b = transmit(sym, ch, make_rng(2)).y - sym
        corr = np.corrcoef(a, b)[0, 1]
        assert abs(corr) < 0.01

    def test_derived_seeds_distinct(self):
        seeds = {derive_seed(42, i) for i in range(10_000)}
        assert len(seeds) == 10_000

    def test_golden_seed_values(self):
        # committed once; guards the seed -> stream contract
        assert splitmix64(0) == 16294208416658607535
        assert splitmix64(1) == 10451216379200822465
        assert derive_seed(42, 0) == 5592132763777985307
        assert derive_seed(42, 1) == 9129838320742759465
        assert derive_seed(0, 7) == 13309476754707697221

    def test_golden_stream_values(self):
        got = make_rng(derive_seed(42, 0)).standard_normal(4)
        expected = [
            -0.2769747610610953,
            0.29629522956297977,
            0.6210404536742623,
            1.3699142777285138,
        ]
        assert got.tolist() == pytest.approx(expected, rel=0, abs=0)
        bits = make_rng(derive_seed(42, 1)).integers(0, 2, 8)
        assert bits.tolist() == [1, 1, 0, 0, 0, 1, 0, 1]
        uni = make_rng(12345).random(3)
        assert uni.tolist() == pytest.approx(
            [0.42075435954078155, 0.6531709678504624, 0.4331635821770152],
            rel=0, abs=0,
        )
