"""Image and speech handling for coded transmission experiments.

8-bit grayscale images travel as PGM (P5); speech is 8-bit unsigned PCM,
requantized from WAV input when needed. Both serialize MSB-first into bit
streams. Fidelity metrics: peak signal-to-noise ratio for images, average
log-spectral distortion over Hamming-windowed periodogram frames for speech.
"""

import math
import wave
from dataclasses import dataclass

import numpy as np

from .polar import as_bits

SPECTRAL_FLOOR = 1e-10
DEFAULT_FRAME_LENGTH = 160
DEFAULT_FFT_SIZE = 256
STREAM_HEADER_BITS = 32


@dataclass
class GrayImage:
    """8-bit grayscale image; pixels are (height, width) row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError("pixels must be a 2-D array")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("pixel values must be in [0, 255]")
        self.pixels = arr.astype(np.uint8)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]


@dataclass
class PcmSignal:
    """Uniform 8-bit PCM samples (unsigned, midpoint 128) with frame metadata."""

    samples: np.ndarray
    sample_rate: int = 8000
    frame_length: int = DEFAULT_FRAME_LENGTH

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim != 1:
            raise ValueError("samples must be 1-D")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("8-bit samples must be in [0, 255]")
        if self.frame_length <= 0:
            raise ValueError("frame_length must be positive")
        self.samples = arr.astype(np.uint8)

    @property
    def num_frames(self):
        return -(-self.samples.size // self.frame_length)

    def centered(self):
        """Samples as floats centered on the 8-bit midpoint."""
        return self.samples.astype(np.float64) - 128.0


# ---------------------------------------------------------------------------
# bit packing


def image_to_bits(img):
    """MSB-first serialization of the pixel bytes, row-major."""
    return np.unpackbits(img.pixels.reshape(-1))


def bits_to_image(bits, width, height):
    bits = as_bits(bits)
    if bits.size != 8 * width * height:
        raise ValueError(
            f"need {8 * width * height} bits for {width}x{height}, got {bits.size}"
        )
    return GrayImage(np.packbits(bits).reshape(height, width))


def pcm_to_bits(sig):
    """MSB-first serialization of the 8-bit samples."""
    return np.unpackbits(sig.samples)


def bits_to_pcm(bits, sample_rate=8000, frame_length=DEFAULT_FRAME_LENGTH):
    bits = as_bits(bits)
    if bits.size % 8:
        raise ValueError(f"bit count {bits.size} is not a whole number of samples")
    return PcmSignal(np.packbits(bits), sample_rate=sample_rate, frame_length=frame_length)


# ---------------------------------------------------------------------------
# metrics


def psnr(a, b):
    """Peak signal-to-noise ratio 10*log10(255^2 / MSE) in dB; inf when equal."""
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"image sizes differ: {a.pixels.shape} vs {b.pixels.shape}")
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def _frame_spectra(sig, fft_size):
    """Floored power spectra of Hamming-windowed, zero-padded frames."""
    flen = sig.frame_length
    if flen > fft_size:
        raise ValueError(f"frame_length {flen} exceeds FFT size {fft_size}")
    x = sig.centered()
    total = sig.num_frames * flen
    if total != x.size:
        x = np.concatenate([x, np.zeros(total - x.size)])
    frames = x.reshape(-1, flen) * np.hamming(flen)
    spec = np.fft.fft(frames, n=fft_size, axis=1)
    power = spec.real**2 + spec.imag**2
    return np.maximum(power, SPECTRAL_FLOOR)


def frame_spectral_distortion(orig, recon, fft_size=DEFAULT_FFT_SIZE):
    """Per-frame RMS difference of the log power spectra, in dB.

    The frequency integral is discretized as the mean over all FFT bins.
    """
    if orig.samples.size != recon.samples.size:
        raise ValueError("signals must have equal length")
    if orig.frame_length != recon.frame_length:
        raise ValueError("signals must share a frame length")
    s_orig = _frame_spectra(orig, fft_size)
    s_recon = _frame_spectra(recon, fft_size)
    diff = 10.0 * np.log10(s_orig) - 10.0 * np.log10(s_recon)
    return np.sqrt(np.mean(diff * diff, axis=1))


def spectral_distortion(orig, recon, fft_size=DEFAULT_FFT_SIZE):
    """Average per-frame log-spectral distortion in dB (0 for identical signals)."""
    return float(np.mean(frame_spectral_distortion(orig, recon, fft_size)))


# ---------------------------------------------------------------------------
# PGM (P5) and WAV containers


def write_pgm(img, path):
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.width} {img.height}\n255\n".encode("ascii"))
        fh.write(img.pixels.tobytes())


def _pgm_token(data, pos):
    """Next header token after pos, skipping whitespace and # comment lines."""
    while True:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise ValueError("truncated PGM header")
    return data[start:pos], pos


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    magic, pos = _pgm_token(data, 0)
    if magic != b"P5":
        raise ValueError(f"not a binary PGM (magic {magic!r})")
    fields = []
    for _ in range(3):
        tok, pos = _pgm_token(data, pos)
        fields.append(int(tok))
    width, height, maxval = fields
    if maxval != 255:
        raise ValueError(f"only maxval 255 supported, got {maxval}")
    raw = data[pos + 1 : pos + 1 + width * height]
    if len(raw) != width * height:
        raise ValueError("PGM pixel data truncated")
    return GrayImage(np.frombuffer(raw, dtype=np.uint8).reshape(height, width).copy())


def write_wav(sig, path):
    """8-bit unsigned mono PCM."""
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(1)
        fh.setframerate(sig.sample_rate)
        fh.writeframes(sig.samples.tobytes())


def read_wav(path, frame_length=DEFAULT_FRAME_LENGTH):
    """Mono PCM WAV; 16-bit input is requantized to 8 bits."""
    with wave.open(str(path), "rb") as fh:
        if fh.getnchannels() != 1:
            raise ValueError("only mono WAV input is supported")
        rate = fh.getframerate()
        width = fh.getsampwidth()
        raw = fh.readframes(fh.getnframes())
    if width == 1:
        samples = np.frombuffer(raw, dtype=np.uint8).copy()
    elif width == 2:
        s16 = np.frombuffer(raw, dtype="<i2").astype(np.int32)
        samples = ((s16 + 32768) >> 8).astype(np.uint8)
    else:
        raise ValueError(f"unsupported sample width {width} bytes")
    return PcmSignal(samples, sample_rate=rate, frame_length=frame_length)


# ---------------------------------------------------------------------------
# transmission stream framing


def pack_stream(payload_bits, block_k):
    """Frame a bit stream for block transmission.

    Prepends a 32-bit big-endian pad-length header and zero-pads so the total
    is a multiple of block_k; returns (blocks (B, block_k), payload length).
    The header rides inside the coded stream itself.
    """
    payload_bits = as_bits(payload_bits)
    if block_k <= 0:
        raise ValueError("block_k must be positive")
    total = STREAM_HEADER_BITS + payload_bits.size
    padding = (-total) % block_k
    header = np.unpackbits(
        np.frombuffer(int(padding).to_bytes(4, "big"), dtype=np.uint8)
    )
    stream = np.concatenate(
        [header, payload_bits, np.zeros(padding, dtype=np.uint8)]
    )
    return stream.reshape(-1, block_k), payload_bits.size


def unpack_stream(blocks, payload_len=None):
    """Recover the payload from decoded blocks.

    With payload_len given (the usual case: media dimensions are known to the
    receiver), the possibly corrupted header is ignored; otherwise the header's
    pad length is trusted after a range check.
    """
    stream = np.asarray(blocks).reshape(-1)
    if stream.size < STREAM_HEADER_BITS:
        raise ValueError("stream shorter than its header")
    if payload_len is None:
        padding = int.from_bytes(
            np.packbits(stream[:STREAM_HEADER_BITS]).tobytes(), "big"
        )
        if padding > stream.size - STREAM_HEADER_BITS:
            raise ValueError(f"corrupt stream header (padding {padding})")
        payload_len = stream.size - STREAM_HEADER_BITS - padding
    end = STREAM_HEADER_BITS + payload_len
    if end > stream.size:
        raise ValueError("declared payload exceeds stream length")
    return stream[STREAM_HEADER_BITS:end]
