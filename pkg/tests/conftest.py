import numpy as np
import pytest

from polarlink.media import GrayImage, PcmSignal
from polarlink.seeding import make_rng


def make_test_image(width=64, height=64, seed=101):
    """Deterministic gradient-plus-texture grayscale image."""
    yy, xx = np.mgrid[0:height, 0:width]
    base = (xx * 255 / max(width - 1, 1) + yy * 255 / max(height - 1, 1)) / 2
    texture = make_rng(seed).integers(0, 32, size=(height, width))
    return GrayImage(np.clip(base + texture, 0, 255).astype(np.uint8))


def make_test_speech(num_frames=40, frame_length=160, sample_rate=8000, seed=202):
    """Deterministic speech-like signal: two drifting tones plus noise, 8-bit PCM."""
    n = num_frames * frame_length
    t = np.arange(n) / sample_rate
    f0 = 180.0 + 60.0 * np.sin(2 * np.pi * 0.9 * t)
    envelope = 0.55 + 0.45 * np.sin(2 * np.pi * 1.7 * t + 0.4)
    wave = envelope * (
        np.sin(2 * np.pi * np.cumsum(f0) / sample_rate)
        + 0.5 * np.sin(2 * np.pi * np.cumsum(2.7 * f0) / sample_rate)
    )
    wave += 0.05 * make_rng(seed).standard_normal(n)
    samples = np.clip(np.round(128 + 90 * wave), 0, 255).astype(np.uint8)
    return PcmSignal(samples, sample_rate=sample_rate, frame_length=frame_length)


@pytest.fixture
def test_image():
    return make_test_image()


@pytest.fixture
def test_speech():
    return make_test_speech()
