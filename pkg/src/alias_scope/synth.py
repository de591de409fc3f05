"""Seeded synthetic tensors for experiments and tests."""

from __future__ import annotations

import numpy as np

from .arrays import FeatureTensor
from .spectral import Spectrum, ifft2_complex, signed_frequencies


def white_noise(shape: tuple[int, int, int], seed: int) -> FeatureTensor:
    rng = np.random.default_rng(seed)
    return FeatureTensor(rng.standard_normal(shape))


def one_over_f(shape: tuple[int, int, int], seed: int) -> FeatureTensor:
    """Natural-image-like tensor whose spectral amplitude falls as 1/|freq|."""
    c, h, w = shape
    rng = np.random.default_rng(seed)
    kh = signed_frequencies(h)[:, None]
    kw = signed_frequencies(w)[None, :]
    radius = np.hypot(kh, kw)
    min_freq = 1.0 / max(h, w)
    amplitude = 1.0 / np.maximum(radius, min_freq)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(c, h, w))
    coeffs = amplitude[None, :, :] * np.exp(1j * phase)
    field = ifft2_complex(Spectrum(coeffs)).real
    return FeatureTensor(field)


def tone(
    shape: tuple[int, int, int], freq_w: float, freq_h: float = 0.0, amplitude: float = 1.0
) -> FeatureTensor:
    """Pure cosine tone cos(2*pi*(freq_h*h + freq_w*w))."""
    c, h, w = shape
    hh = np.arange(h)[:, None]
    ww = np.arange(w)[None, :]
    field = amplitude * np.cos(2.0 * np.pi * (freq_h * hh + freq_w * ww))
    return FeatureTensor(np.broadcast_to(field, (c, h, w)).copy())
