"""Successive-cancellation decoding of polar codes from channel LLRs.

Iterative schedule over explicit per-stage buffers (2N-1 LLR slots plus the
partial-sum bit buffers), O(N) working memory per frame, exactly N*log2(N)
check/variable updates per decode. The check update defaults to the min-sum
approximation; the exact tanh rule is available for oracle comparisons.
"""

import numpy as np

_ATANH_CLIP = float(np.nextafter(1.0, 0.0))


def _f_min_sum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def _f_exact(a, b):
    t = np.tanh(0.5 * a) * np.tanh(0.5 * b)
    return 2.0 * np.arctanh(np.clip(t, -_ATANH_CLIP, _ATANH_CLIP))


_F_RULES = {"min-sum": _f_min_sum, "exact": _f_exact}


class ScDecoder:
    """Reusable decoder for one code; instances are not thread-shared.

    f_rule: "min-sum" (default) or "exact" (tanh check update).
    op_count accumulates scalar check/variable evaluations across calls;
    a single decode performs exactly N * log2(N) of them.
    """

    def __init__(self, config, f_rule="min-sum"):
        if f_rule not in _F_RULES:
            raise ValueError(f"unknown f rule {f_rule!r}")
        self.config = config
        self.f_rule = f_rule
        self._f = _F_RULES[f_rule]
        self.op_count = 0
        self.last_decision_llrs = None  # (B, N) after each decode; diagnostic
        n = config.n
        self._frozen_mask = np.ones(config.N, dtype=bool)
        self._frozen_mask[config.info_set] = False
        self._frozen_fill = np.zeros(config.N, dtype=np.uint8)
        self._frozen_fill[config.frozen_set()] = config.frozen_values
        self._n = n

    def decode(self, llrs):
        """Decode one frame; returns (info bits, re-encoded codeword estimate)."""
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.ndim != 1:
            raise ValueError("decode expects a 1-D LLR vector")
        info, cw = self.decode_batch(llrs[None, :])
        return info[0], cw[0]

    def decode_batch(self, llrs):
        """Decode a batch of frames (B, N) with a shared schedule."""
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.ndim != 2 or llrs.shape[1] != self.config.N:
            raise ValueError(
                f"LLR batch must have shape (B, {self.config.N}), got {llrs.shape}"
            )
        if not np.isfinite(llrs).all():
            raise ValueError("LLRs must be finite")
        n = self._n
        size = self.config.N
        batch = llrs.shape[0]
        # Stage s holds the active node's LLR vector of length 2^s; the
        # bit buffers hold a finished left child awaiting its sibling.
        stage_llr = [np.empty((batch, 1 << s)) for s in range(n)]
        stage_llr.append(llrs)
        left_bits = [np.empty((batch, 1 << s), dtype=np.uint8) for s in range(n)]
        u_hat = np.zeros((batch, size), dtype=np.uint8)
        decision_llrs = np.empty((batch, size))
        codeword = None

        for i in range(size):
            if i == 0:
                top = n - 1
            else:
                t = (i & -i).bit_length() - 1
                half = 1 << t
                parent = stage_llr[t + 1]
                a, b = parent[:, :half], parent[:, half:]
                sign = 1.0 - 2.0 * left_bits[t]
                stage_llr[t][:] = b + sign * a
                self.op_count += half * batch
                top = t - 1
            for s in range(top, -1, -1):
                half = 1 << s
                parent = stage_llr[s + 1]
                stage_llr[s][:] = self._f(parent[:, :half], parent[:, half:])
                self.op_count += half * batch

            decision_llrs[:, i] = stage_llr[0][:, 0]
            if self._frozen_mask[i]:
                u_hat[:, i] = self._frozen_fill[i]
            else:
                u_hat[:, i] = stage_llr[0][:, 0] < 0.0

            # Fold finished subtrees upward; at the last leaf this yields the
            # full re-encoded codeword estimate.
            beta = u_hat[:, i : i + 1]
            s = 0
            ii = i
            while ii & 1:
                beta = np.concatenate([left_bits[s] ^ beta, beta], axis=1)
                s += 1
                ii >>= 1
            if s < n:
                left_bits[s][:] = beta
            else:
                codeword = np.ascontiguousarray(beta)

        self.last_decision_llrs = decision_llrs
        info = u_hat[:, self.config.info_set]
        return info, codeword


def sc_decode(llrs, config, f_rule="min-sum"):
    """One-shot decode; returns (info bits, codeword estimate)."""
    return ScDecoder(config, f_rule=f_rule).decode(llrs)
