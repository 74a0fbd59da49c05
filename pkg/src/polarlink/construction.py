"""Bhattacharyya-parameter code construction.

Initial values for erasure and continuous (Gaussian / Rayleigh-surrogate)
channels, three candidate polarization recursions plus the erasure-exact one,
information-set selection, and the union bound on block error probability.
"""

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .channels import AwgnBpsk, Bec, RayleighBpsk, sigma2_to_snr_db, snr_db_to_sigma2
from .polar import CodeConfig


class RecursionRule(enum.Enum):
    """Minus-branch update used when expanding the reliability tree.

    The plus branch is z^2 for every rule. TYPE1 and BEC_EXACT share the
    2z - z^2 minus branch; the latter is exact on erasure channels, the
    former uses the same formula as a bound elsewhere. TYPE2 keeps the
    parent value, TYPE3 averages the other two.
    """

    TYPE1 = "type1"
    TYPE2 = "type2"
    TYPE3 = "type3"
    BEC_EXACT = "bec"

    @classmethod
    def parse(cls, name):
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown recursion rule {name!r}") from None


def _minus_branch(z, rule):
    if rule in (RecursionRule.TYPE1, RecursionRule.BEC_EXACT):
        return 2.0 * z - z * z
    if rule is RecursionRule.TYPE2:
        return z.copy()
    if rule is RecursionRule.TYPE3:
        return 0.5 * (2.0 * z - z * z + z)
    raise ValueError(f"unknown recursion rule {rule!r}")


def evolve(z0, n, rule):
    """Expand a scalar initial reliability through n polarization levels.

    Returns the length-2^n vector in natural bit-channel order: even child
    2i takes the minus branch of parent i, odd child 2i+1 takes z^2. Values
    are clamped to [0, 1] after every level.
    """
    if not 0.0 <= z0 <= 1.0:
        raise ValueError(f"initial value {z0} outside [0, 1]")
    if n < 0:
        raise ValueError("exponent n must be >= 0")
    z = np.array([float(z0)])
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = _minus_branch(z, rule)
        nxt[1::2] = z * z
        z = np.clip(nxt, 0.0, 1.0)
    return z


def select_information_set(z, k):
    """Indices of the k smallest reliabilities, ties to the lower index, sorted."""
    z = np.asarray(z, dtype=float)
    if not 0 <= k <= z.size:
        raise ValueError(f"k={k} outside [0, {z.size}]")
    order = np.argsort(z, kind="stable")
    return np.sort(order[:k])


def union_bound(z, indices):
    """Sum of reliabilities over an index set; upper-bounds the block error rate.

    Not clamped: a sum above 1 simply means the bound is vacuous.
    """
    z = np.asarray(z, dtype=float)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= z.size):
        raise ValueError("index out of range")
    return float(z[idx].sum())


@dataclass
class ConditionalDensityPair:
    """Output densities of a binary-input continuous channel plus a quadrature support."""

    w0: Callable[[float], float]
    w1: Callable[[float], float]
    support: tuple


def bhattacharyya_numeric(densities, tol=1e-8):
    """Bhattacharyya parameter of a continuous channel by adaptive quadrature.

    Integrates sqrt(w0 * w1) over the support to absolute error <= tol.
    Each density must itself integrate to 1 within 1e-6 and be finite on
    the support.
    """
    lo, hi = densities.support
    probe = np.linspace(lo, hi, 257)
    for w in (densities.w0, densities.w1):
        vals = np.array([w(t) for t in probe], dtype=float)
        if not np.isfinite(vals).all() or (vals < 0).any():
            raise ValueError("density is non-finite or negative on the support")
        total, err = integrate.quad(w, lo, hi, epsabs=1e-9, limit=200)
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"density integrates to {total}, expected 1")

    def integrand(y):
        return math.sqrt(densities.w0(y) * densities.w1(y))

    value, err = integrate.quad(integrand, lo, hi, epsabs=tol, limit=200)
    if err > 100 * tol:
        raise RuntimeError(f"quadrature error estimate {err} exceeds tolerance")
    return float(min(max(value, 0.0), 1.0))


def _gaussian_pair(mean0, mean1, sigma):
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * sigma)

    def w0(y):
        return norm * math.exp(-((y - mean0) ** 2) / (2.0 * sigma * sigma))

    def w1(y):
        return norm * math.exp(-((y - mean1) ** 2) / (2.0 * sigma * sigma))

    lo = min(mean0, mean1) - 10.0 * sigma
    hi = max(mean0, mean1) + 10.0 * sigma
    return ConditionalDensityPair(w0, w1, (lo, hi))


def awgn_density_pair(sigma):
    """Unit-separation BPSK observation densities: Gaussians at -1 (bit 0) and +1."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return _gaussian_pair(-1.0, 1.0, sigma)


def rayleigh_density_pair(k, snr_db):
    """Construction-side Rayleigh surrogate densities.

    Gaussians centered at -/+ sqrt(2 ln 4) * k with variance 10^(-snr_db/10);
    used only to seed the reliability recursion, never for demodulation.
    """
    if k <= 0:
        raise ValueError("scaling factor k must be positive")
    mean = math.sqrt(2.0 * math.log(4.0)) * k
    sigma = math.sqrt(snr_db_to_sigma2(snr_db))
    return _gaussian_pair(-mean, mean, sigma)


def initial_z_awgn(sigma):
    """Initial reliability for BPSK over Gaussian noise: exp(-1 / (2 sigma^2)).

    Closed form of the Bhattacharyya integral for the awgn_density_pair;
    agrees with bhattacharyya_numeric to quadrature tolerance.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return math.exp(-1.0 / (2.0 * sigma * sigma))


def initial_z_rayleigh(k, snr_db):
    """Initial reliability of the Rayleigh surrogate pair: 4^(-k^2 / sigma^2)."""
    if k <= 0:
        raise ValueError("scaling factor k must be positive")
    sigma2 = snr_db_to_sigma2(snr_db)
    return math.pow(4.0, -(k * k) / sigma2)


@dataclass(frozen=True)
class Z0Policy:
    """How the recursion's initial value is chosen.

    kind is one of:
        "proposed" - channel-matched value (erasure probability, or the
            closed-form Gaussian / Rayleigh-surrogate Bhattacharyya integral);
        "constant" - fixed value carried in .value;
        "hybrid"   - Rayleigh only: constant 0.5 strictly above 1 dB SNR,
            otherwise the proposed value.
    """

    kind: str
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("proposed", "constant", "hybrid"):
            raise ValueError(f"unknown z0 policy {self.kind!r}")
        if self.kind == "constant":
            if self.value is None or not 0.0 <= self.value <= 1.0:
                raise ValueError("constant z0 policy needs a value in [0, 1]")

    @classmethod
    def proposed(cls):
        return cls("proposed")

    @classmethod
    def constant(cls, value):
        return cls("constant", float(value))

    @classmethod
    def hybrid(cls):
        return cls("hybrid")

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        if text == "proposed":
            return cls.proposed()
        if text == "hybrid":
            return cls.hybrid()
        if text.startswith("constant:"):
            return cls.constant(float(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse z0 policy {text!r}")

    def __str__(self):
        if self.kind == "constant":
            return f"constant:{self.value!r}"
        return self.kind


HYBRID_SNR_THRESHOLD_DB = 1.0


def initial_z(channel, policy):
    """Initial reliability for a channel under a Z0Policy."""
    if policy.kind == "constant":
        return float(policy.value)
    if policy.kind == "hybrid":
        if not isinstance(channel, RayleighBpsk):
            raise ValueError("hybrid z0 policy applies to Rayleigh channels only")
        snr_db = sigma2_to_snr_db(channel.sigma**2)
        if snr_db > HYBRID_SNR_THRESHOLD_DB:
            return 0.5
        return initial_z_rayleigh(channel.k, snr_db)
    # proposed
    if isinstance(channel, Bec):
        return float(channel.epsilon)
    if isinstance(channel, AwgnBpsk):
        return initial_z_awgn(channel.sigma)
    if isinstance(channel, RayleighBpsk):
        return initial_z_rayleigh(channel.k, sigma2_to_snr_db(channel.sigma**2))
    raise TypeError(f"unsupported channel {channel!r}")


def rate_to_k(n, rate):
    """Information length for a target rate at block length 2^n."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    return int(round(rate * (1 << n)))


def construct_code(channel, n, k, rule, policy=None):
    """Build a code for a channel: evolve the initial value, pick the k best.

    Returns (CodeConfig, reliability vector). Frozen values default to zero.
    """
    if policy is None:
        policy = Z0Policy.proposed()
    z0 = initial_z(channel, policy)
    z = evolve(z0, n, rule)
    info = select_information_set(z, k)
    return CodeConfig(n=n, info_set=info), z
