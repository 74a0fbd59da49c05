"""Polar encoding: Kronecker powers of the 2x2 lower-triangular kernel over GF(2).

Natural (non-bit-reversed) row order is used everywhere; the construction,
encoder, and decoder in this package all share that convention.
"""

import json
from dataclasses import dataclass, field

import numpy as np

KERNEL = np.array([[1, 0], [1, 1]], dtype=np.uint8)

# Dense materialization above this exponent is refused (2^16 x 2^16 already
# needs 4 GiB); encode() handles any size via the in-place butterfly.
MAX_EXPLICIT_EXPONENT = 16


def as_bits(bits):
    """Coerce to a uint8 array and reject anything outside {0, 1}."""
    arr = np.asarray(bits)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit vector entries must be 0 or 1")
    return arr.astype(np.uint8)


def _exponent_of(length):
    n = int(length).bit_length() - 1
    if length <= 0 or (1 << n) != length:
        raise ValueError(f"length {length} is not a power of two")
    return n


@dataclass(frozen=True)
class CodeConfig:
    """One polar code instance: exponent, information positions, frozen values.

    Attributes:
        n: block-length exponent, N = 2**n.
        info_set: sorted unique indices in [0, N) carrying information bits.
        frozen_values: bits placed at the complement positions (default all
            zero), in ascending position order.
    """

    n: int
    info_set: np.ndarray
    frozen_values: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("exponent n must be >= 0")
        info = np.sort(np.asarray(self.info_set, dtype=np.int64).ravel())
        if info.size and (np.unique(info).size != info.size):
            raise ValueError("information set contains duplicate indices")
        if info.size and (info[0] < 0 or info[-1] >= self.N):
            raise ValueError("information set index out of range")
        if info.size > self.N:
            raise ValueError("information set larger than block length")
        frozen = self.frozen_values
        if frozen is None:
            frozen = np.zeros(self.N - info.size, dtype=np.uint8)
        frozen = as_bits(frozen)
        if frozen.size != self.N - info.size:
            raise ValueError(
                f"frozen_values length {frozen.size} != N - K = {self.N - info.size}"
            )
        object.__setattr__(self, "info_set", info)
        object.__setattr__(self, "frozen_values", frozen)

    @property
    def N(self):
        return 1 << self.n

    @property
    def K(self):
        return int(self.info_set.size)

    @property
    def rate(self):
        return self.K / self.N

    def frozen_set(self):
        """Sorted complement of the information set."""
        mask = np.ones(self.N, dtype=bool)
        mask[self.info_set] = False
        return np.nonzero(mask)[0]

    def to_json_dict(self):
        return {
            "n": self.n,
            "K": self.K,
            "A": [int(i) for i in self.info_set],
            "frozen_values": "".join(str(int(b)) for b in self.frozen_values),
        }

    @classmethod
    def from_json_dict(cls, data):
        cfg = cls(
            n=int(data["n"]),
            info_set=np.asarray(data["A"], dtype=np.int64),
            frozen_values=np.frombuffer(
                data["frozen_values"].encode("ascii"), dtype=np.uint8
            )
            - ord("0"),
        )
        if "K" in data and int(data["K"]) != cfg.K:
            raise ValueError("inconsistent K in code config")
        return cfg

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def generator_matrix(n):
    """Dense n-th Kronecker power of the kernel, natural row order. G_0 = [1]."""
    if n < 0:
        raise ValueError("exponent n must be >= 0")
    if n > MAX_EXPLICIT_EXPONENT:
        raise ValueError(
            f"n={n} too large to materialize (limit {MAX_EXPLICIT_EXPONENT}); "
            "use encode() instead"
        )
    g = np.array([[1]], dtype=np.uint8)
    for _ in range(n):
        g = np.kron(KERNEL, g)
    return g


def encode(u):
    """In-place butterfly transform: u -> u . G_N over GF(2), O(N log N).

    Accepts a single vector (N,) or a batch (B, N); bit-identical to the
    explicit matrix product with generator_matrix.
    """
    x = as_bits(u).copy()
    n_bits = x.shape[-1]
    _exponent_of(n_bits)
    lead = x.shape[:-1]
    step = 1
    while step < n_bits:
        v = x.reshape(lead + (-1, 2, step))
        v[..., 0, :] ^= v[..., 1, :]
        step <<= 1
    return x


def encode_split(info, config):
    """Scatter info bits into the information set, frozen values elsewhere, encode.

    info may be (K,) or a batch (B, K).
    """
    info = as_bits(info)
    if info.shape[-1] != config.K:
        raise ValueError(f"info length {info.shape[-1]} != K = {config.K}")
    lead = info.shape[:-1]
    u = np.zeros(lead + (config.N,), dtype=np.uint8)
    u[..., config.info_set] = info
    u[..., config.frozen_set()] = config.frozen_values
    return encode(u)
