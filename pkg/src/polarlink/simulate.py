"""Monte Carlo harness: BER/FER sweeps, recursion-rule comparisons, media pipelines.

Reproducibility contract: every output is a pure function of the config and
seed. Frame randomness derives from derive_seed(point_seed, frame_index), so
worker count and batching never change results; error counts are integers and
their accumulation is order-free. CSV output is byte-stable (no timestamps;
elapsed time lives only on the in-memory records).
"""

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .channels import (
    AwgnBpsk,
    Bec,
    RayleighBpsk,
    llr,
    modulate_bpsk,
    snr_db_to_sigma2,
    transmit,
)
from .construction import RecursionRule, Z0Policy, construct_code, rate_to_k
from .ldpc import LdpcCode, bp_decode_batch, generate_regular_ldpc, ldpc_encode
from .media import (
    bits_to_image,
    bits_to_pcm,
    image_to_bits,
    pack_stream,
    pcm_to_bits,
    psnr,
    read_pgm,
    read_wav,
    spectral_distortion,
    unpack_stream,
    write_pgm,
    write_wav,
)
from .polar import CodeConfig, encode_split
from .sc_decoder import ScDecoder
from .seeding import derive_seed, make_rng

CSV_SCHEMA = 1
# Fixed accumulation granularity: early stopping decides at chunk boundaries,
# in frame order, so the result is identical for any worker count.
CHUNK_FRAMES = 512
_LDPC_SEED_TAG = 999983


@dataclass
class SimRecord:
    """One Monte Carlo grid point."""

    codec: str
    channel: str
    param: float
    n_bits: int
    k: int
    frames: int
    bit_errors: int
    block_errors: int
    seed: int
    elapsed_s: float = 0.0

    @property
    def ber(self):
        return self.bit_errors / (self.frames * self.k) if self.k else 0.0

    @property
    def fer(self):
        return self.block_errors / self.frames


@dataclass
class SweepConfig:
    """Everything that defines a BER sweep; outputs are a pure function of it."""

    codec: str = "polar"
    channel: str = "awgn"
    grid: Sequence[float] = ()
    frames: int = 10000
    seed: int = 0
    n: int = 8
    rate: float = 0.5
    rule: RecursionRule = RecursionRule.TYPE1
    z0: Z0Policy = field(default_factory=Z0Policy.proposed)
    k_factor: float = 0.7
    code: Optional[CodeConfig] = None
    ldpc_code: Optional[LdpcCode] = None
    f_rule: str = "min-sum"
    bp_iters: int = 50
    workers: int = 1
    max_block_errors: Optional[int] = None

    def validate(self):
        if self.codec not in ("polar", "ldpc"):
            raise ValueError(f"unknown codec {self.codec!r}")
        if self.channel not in ("bec", "awgn", "rayleigh"):
            raise ValueError(f"unknown channel {self.channel!r}")
        if not self.grid:
            raise ValueError("parameter grid must be nonempty")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.codec == "ldpc" and self.channel == "bec":
            raise ValueError("the LDPC baseline supports BPSK channels only")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def channel_at(kind, param, k_factor=0.7):
    """Channel instance for one grid point (param is epsilon for bec, SNR dB otherwise)."""
    if kind == "bec":
        return Bec(param)
    sigma = math.sqrt(snr_db_to_sigma2(param))
    if kind == "awgn":
        return AwgnBpsk(sigma)
    if kind == "rayleigh":
        return RayleighBpsk(k_factor, sigma)
    raise ValueError(f"unknown channel {kind!r}")


@dataclass
class _PolarCtx:
    config: CodeConfig
    f_rule: str = "min-sum"

    @property
    def k(self):
        return self.config.K

    @property
    def n_bits(self):
        return self.config.N

    def encode(self, infos):
        return encode_split(infos, self.config)

    def decode(self, llrs):
        info, _ = ScDecoder(self.config, f_rule=self.f_rule).decode_batch(llrs)
        return info


@dataclass
class _LdpcCtx:
    code: LdpcCode
    iters: int = 50

    @property
    def k(self):
        return self.code.k

    @property
    def n_bits(self):
        return self.code.n

    def encode(self, infos):
        return ldpc_encode(infos, self.code)

    def decode(self, llrs):
        out = np.empty((llrs.shape[0], self.code.k), dtype=np.uint8)
        for start in range(0, llrs.shape[0], 128):
            hard, _, _ = bp_decode_batch(
                llrs[start : start + 128], self.code, max_iters=self.iters
            )
            out[start : start + 128] = hard[:, self.code.info_cols]
        return out


def _frame_llrs(ctx, channel, point_seed, start, stop):
    """Per-frame info bits and channel LLRs for frames [start, stop)."""
    count = stop - start
    infos = np.empty((count, ctx.k), dtype=np.uint8)
    rngs = []
    for f in range(start, stop):
        rng = make_rng(derive_seed(point_seed, f))
        infos[f - start] = rng.integers(0, 2, size=ctx.k, dtype=np.uint8)
        rngs.append(rng)
    x = ctx.encode(infos)
    symbols = x if isinstance(channel, Bec) else modulate_bpsk(x)
    llrs = np.empty((count, ctx.n_bits))
    for i, rng in enumerate(rngs):
        obs = transmit(symbols[i], channel, rng)
        llrs[i] = llr(obs, channel)
    return infos, llrs


def _run_chunk(ctx, channel, point_seed, start, stop):
    infos, llrs = _frame_llrs(ctx, channel, point_seed, start, stop)
    info_hat = ctx.decode(llrs)
    wrong = info_hat != infos
    return int(wrong.sum()), int(wrong.any(axis=1).sum()), stop - start


def _simulate_point(ctx, channel, frames, point_seed, workers, max_block_errors):
    spans = [
        (s, min(s + CHUNK_FRAMES, frames)) for s in range(0, frames, CHUNK_FRAMES)
    ]
    bit_errors = block_errors = frames_done = 0

    def consume(result):
        nonlocal bit_errors, block_errors, frames_done
        bit_errors += result[0]
        block_errors += result[1]
        frames_done += result[2]
        return max_block_errors is not None and block_errors >= max_block_errors

    if workers <= 1:
        for span in spans:
            if consume(_run_chunk(ctx, channel, point_seed, *span)):
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_chunk, ctx, channel, point_seed, *span)
                for span in spans
            ]
            for fut in futures:
                if consume(fut.result()):
                    for other in futures:
                        other.cancel()
                    break
    return bit_errors, block_errors, frames_done


def run_ber_sweep(cfg):
    """Simulate every grid point; returns one SimRecord per point.

    Polar codes are reconstructed per grid point (channel-specific design)
    unless an explicit CodeConfig pins the code for the whole sweep.
    """
    cfg.validate()
    if cfg.codec == "ldpc":
        code = cfg.ldpc_code
        if code is None:
            code = generate_regular_ldpc(
                1 << cfg.n, seed=derive_seed(cfg.seed, _LDPC_SEED_TAG)
            )
        base_ctx = _LdpcCtx(code, iters=cfg.bp_iters)
    records = []
    for pi, param in enumerate(cfg.grid):
        channel = channel_at(cfg.channel, param, cfg.k_factor)
        if cfg.codec == "polar":
            if cfg.code is not None:
                code = cfg.code
            else:
                code, _ = construct_code(
                    channel, cfg.n, rate_to_k(cfg.n, cfg.rate), cfg.rule, cfg.z0
                )
            ctx = _PolarCtx(code, f_rule=cfg.f_rule)
        else:
            ctx = base_ctx
        point_seed = derive_seed(cfg.seed, pi)
        t0 = time.perf_counter()
        bit_err, blk_err, frames_done = _simulate_point(
            ctx, channel, cfg.frames, point_seed, cfg.workers, cfg.max_block_errors
        )
        records.append(
            SimRecord(
                codec=cfg.codec,
                channel=cfg.channel,
                param=float(param),
                n_bits=ctx.n_bits,
                k=ctx.k,
                frames=frames_done,
                bit_errors=bit_err,
                block_errors=blk_err,
                seed=cfg.seed,
                elapsed_s=time.perf_counter() - t0,
            )
        )
    return records


COMPARISON_RULES = (RecursionRule.TYPE1, RecursionRule.TYPE2, RecursionRule.TYPE3)


def run_rule_comparison(
    n,
    rate,
    snr_grid,
    frames,
    seed,
    k_factor=0.7,
    workers=1,
    z0=None,
    channels=("awgn", "rayleigh"),
):
    """Sweep the three candidate recursions on AWGN and Rayleigh channels.

    All rules at one (channel, SNR) point share frame randomness, so rule
    differences are paired. Returns long-format rows
    (channel, rule, snr_db, ber, fer, frames, seed).
    """
    if z0 is None:
        z0 = Z0Policy.proposed()
    rows = []
    for ci, channel in enumerate(channels):
        chan_seed = derive_seed(seed, 1000 + ci)
        for rule in COMPARISON_RULES:
            cfg = SweepConfig(
                codec="polar",
                channel=channel,
                grid=snr_grid,
                frames=frames,
                seed=chan_seed,
                n=n,
                rate=rate,
                rule=rule,
                z0=z0,
                k_factor=k_factor,
                workers=workers,
            )
            for rec in run_ber_sweep(cfg):
                rows.append(
                    {
                        "channel": channel,
                        "rule": rule.value,
                        "snr_db": rec.param,
                        "ber": rec.ber,
                        "fer": rec.fer,
                        "frames": rec.frames,
                        "seed": rec.seed,
                    }
                )
    return rows


# ---------------------------------------------------------------------------
# media transmission


@dataclass
class MediaResult:
    kind: str
    codec: str
    metric: str
    param: float
    values: np.ndarray
    seed: int
    csv_path: Optional[Path] = None
    recon_path: Optional[Path] = None

    @property
    def mean(self):
        return float(np.mean(self.values))


def _media_codec(codec, channel, n, rate, rule, z0, f_rule, bp_iters, seed, ldpc_seed):
    if codec == "polar":
        if z0 is None:
            z0 = (
                Z0Policy.hybrid()
                if isinstance(channel, RayleighBpsk)
                else Z0Policy.proposed()
            )
        config, _ = construct_code(channel, n, rate_to_k(n, rate), rule, z0)
        return _PolarCtx(config, f_rule=f_rule)
    if codec == "ldpc":
        if ldpc_seed is None:
            ldpc_seed = derive_seed(seed, _LDPC_SEED_TAG)
        return _LdpcCtx(
            generate_regular_ldpc(1 << n, seed=ldpc_seed), iters=bp_iters
        )
    raise ValueError(f"unknown codec {codec!r}")


def run_media_pipeline(
    kind,
    input_path,
    output_dir=None,
    codec="polar",
    n=11,
    rate=0.5,
    channel="rayleigh",
    param=6.0,
    k_factor=0.7,
    trials=50,
    seed=0,
    rule=RecursionRule.TYPE1,
    z0=None,
    f_rule="min-sum",
    bp_iters=50,
    ldpc_seed=None,
    frame_length=None,
):
    """Transmit an image (PSNR) or speech file (spectral distortion) repeatedly.

    The source is encoded once; each trial redraws the channel, decodes,
    reconstructs, and scores. Writes per-trial metrics CSV plus the last
    trial's reconstruction when output_dir is given.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    chan = channel_at(channel, param, k_factor)
    ctx = _media_codec(
        codec, chan, n, rate, rule, z0, f_rule, bp_iters, seed, ldpc_seed
    )

    if kind == "image":
        source = read_pgm(input_path)
        payload = image_to_bits(source)
        metric_name = "psnr"
    elif kind == "speech":
        source = read_wav(input_path, frame_length or 160)
        payload = pcm_to_bits(source)
        metric_name = "sd"
    else:
        raise ValueError(f"unknown media kind {kind!r}")

    blocks, payload_len = pack_stream(payload, ctx.k)
    coded = ctx.encode(blocks)
    symbols = coded if isinstance(chan, Bec) else modulate_bpsk(coded)

    values = np.empty(trials)
    recon = None
    for trial in range(trials):
        trial_seed = derive_seed(seed, trial)
        llrs = np.empty((coded.shape[0], ctx.n_bits))
        for b in range(coded.shape[0]):
            rng = make_rng(derive_seed(trial_seed, b))
            obs = transmit(symbols[b], chan, rng)
            llrs[b] = llr(obs, chan)
        bits_hat = unpack_stream(ctx.decode(llrs), payload_len)
        if kind == "image":
            recon = bits_to_image(bits_hat, source.width, source.height)
            values[trial] = psnr(source, recon)
        else:
            recon = bits_to_pcm(
                bits_hat, sample_rate=source.sample_rate,
                frame_length=source.frame_length,
            )
            values[trial] = spectral_distortion(source, recon)

    result = MediaResult(
        kind=kind, codec=codec, metric=metric_name, param=float(param),
        values=values, seed=seed,
    )
    if output_dir is not None:
        outdir = Path(output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        stem = f"{kind}_{codec}"
        result.csv_path = outdir / f"{stem}_metrics.csv"
        write_media_csv(result, result.csv_path)
        if kind == "image":
            result.recon_path = outdir / f"{stem}_recon.pgm"
            write_pgm(recon, result.recon_path)
        else:
            result.recon_path = outdir / f"{stem}_recon.wav"
            write_wav(recon, result.recon_path)
    return result


# ---------------------------------------------------------------------------
# CSV output (byte-stable: LF endings, shortest-roundtrip floats, no times)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, comments, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema={CSV_SCHEMA}\n")
        for comment in comments:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


SWEEP_HEADER = (
    "codec", "channel", "param", "n", "k", "frames",
    "bit_errors", "block_errors", "ber", "fer", "seed",
)


def write_sweep_csv(records, path, comments=()):
    rows = [
        (
            r.codec, r.channel, r.param, r.n_bits, r.k, r.frames,
            r.bit_errors, r.block_errors, r.ber, r.fer, r.seed,
        )
        for r in records
    ]
    _write_csv(path, comments, SWEEP_HEADER, rows)


RULES_HEADER = ("channel", "rule", "snr_db", "ber", "fer", "frames", "seed")


def write_rules_csv(rows, path, comments=()):
    _write_csv(
        path,
        comments,
        RULES_HEADER,
        [[row[key] for key in RULES_HEADER] for row in rows],
    )


def write_media_csv(result, path):
    comments = [
        f"kind={result.kind} codec={result.codec} param={_fmt(result.param)} "
        f"seed={result.seed}",
        f"mean_{result.metric}={_fmt(result.mean)}",
    ]
    _write_csv(
        path,
        comments,
        ("trial", result.metric),
        [(t, v) for t, v in enumerate(result.values)],
    )


def write_zvector_csv(z, path, comments=()):
    _write_csv(path, comments, ("index", "z"), list(enumerate(np.asarray(z))))


def write_frame_sd_csv(per_frame_sd, path, comments=()):
    _write_csv(
        path, comments, ("frame", "sd"), list(enumerate(np.asarray(per_frame_sd)))
    )
