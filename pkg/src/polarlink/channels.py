"""BPSK modulation, stochastic channel simulation, and LLR demodulation.

Channels: binary erasure, Gaussian noise, and per-symbol Rayleigh fading
(amplitude k * sqrt(x^2 + y^2) with standard-normal x, y). The receiver has
perfect knowledge of the realized fading amplitudes.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .polar import as_bits
from .seeding import derive_seed, make_rng  # noqa: F401  (re-exported)

LLR_MAX = 100.0


@dataclass(frozen=True)
class Bec:
    """Binary erasure channel with erasure probability epsilon."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")


@dataclass(frozen=True)
class AwgnBpsk:
    """BPSK over additive Gaussian noise with standard deviation sigma."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class RayleighBpsk:
    """BPSK over per-symbol Rayleigh fading plus Gaussian noise."""

    k: float
    sigma: float

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("scaling factor k must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


ChannelSpec = Union[Bec, AwgnBpsk, RayleighBpsk]


@dataclass
class Observation:
    """Channel output: values plus, when applicable, fading amplitudes or erasures."""

    y: np.ndarray
    fading: Optional[np.ndarray] = None
    erased: Optional[np.ndarray] = None


def snr_db_to_sigma2(snr_db):
    """Noise variance for an SNR in dB: 10^(-snr_db / 10)."""
    return 10.0 ** (-snr_db / 10.0)


def sigma2_to_snr_db(sigma2):
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    return -10.0 * math.log10(sigma2)


def modulate_bpsk(bits):
    """Antipodal map b -> 2b - 1 (bit 0 to -1, bit 1 to +1)."""
    return 2.0 * as_bits(bits).astype(np.float64) - 1.0


def transmit(symbols, channel, rng):
    """Push one frame of symbols through a channel; deterministic given the rng.

    AWGN/Rayleigh expect +/-1 symbols, the erasure channel expects 0/1 bits.
    Draw order (part of the seed -> stream contract): Rayleigh draws the two
    fading normals first, then the noise normals; AWGN draws noise only; the
    erasure channel draws one uniform per symbol.
    """
    s = np.asarray(symbols, dtype=np.float64)
    if isinstance(channel, Bec):
        if s.size and not np.isin(s, (0.0, 1.0)).all():
            raise ValueError("erasure channel expects 0/1 bits")
        erased = rng.random(s.size) < channel.epsilon
        return Observation(y=s.copy(), erased=erased)
    if s.size and not np.isin(s, (-1.0, 1.0)).all():
        raise ValueError("BPSK channel expects -1/+1 symbols")
    if isinstance(channel, AwgnBpsk):
        noise = rng.standard_normal(s.size) * channel.sigma
        return Observation(y=s + noise)
    if isinstance(channel, RayleighBpsk):
        gx = rng.standard_normal(s.size)
        gy = rng.standard_normal(s.size)
        fading = channel.k * np.hypot(gx, gy)
        noise = rng.standard_normal(s.size) * channel.sigma
        return Observation(y=fading * s + noise, fading=fading)
    raise TypeError(f"unsupported channel {channel!r}")


def llr(obs, channel):
    """Per-symbol log-likelihood ratios ln(W(y|0) / W(y|1)), clipped to +/-LLR_MAX.

    Positive favors bit 0. Rayleigh demodulation uses the recorded fading
    amplitudes (perfect channel state information).
    """
    if isinstance(channel, Bec):
        if obs.erased is None:
            raise ValueError("observation does not carry erasure flags")
        vals = np.where(obs.y > 0.5, -LLR_MAX, LLR_MAX)
        return np.where(obs.erased, 0.0, vals)
    if isinstance(channel, AwgnBpsk):
        if obs.erased is not None or obs.fading is not None:
            raise ValueError("observation was not produced by an AWGN channel")
        raw = -2.0 * obs.y / (channel.sigma**2)
    elif isinstance(channel, RayleighBpsk):
        if obs.fading is None:
            raise ValueError("observation does not carry fading amplitudes")
        raw = -2.0 * obs.fading * obs.y / (channel.sigma**2)
    else:
        raise TypeError(f"unsupported channel {channel!r}")
    return np.clip(raw, -LLR_MAX, LLR_MAX)
