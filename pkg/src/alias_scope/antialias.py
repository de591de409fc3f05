"""Aliasing quantification and removal.

The aliasing score is the fraction of spectral power in the high band
H(c) = {(k, l) : |k| > c or |l| > c}; the de-aliasing filter (daf) zeroes
exactly that band in the Fourier domain.  The band boundary is strict:
coefficients at |k| == c survive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .arrays import FeatureTensor
from .errors import InternalError, SpecError, UndefinedRatioError, ValidationError
from .spectral import Spectrum, fft2, ifft2_complex, power_spectrum

SCORE_MODES = ("per_channel_mean", "global")

_BINOMIAL_ROWS = {
    3: np.array([1.0, 2.0, 1.0]) / 4.0,
    5: np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0,
    7: np.array([1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0]) / 64.0,
}


@dataclass(frozen=True)
class CutoffSpec:
    """Square-band cutoff: (k, l) is high iff |k| > cutoff or |l| > cutoff."""

    cutoff: float

    def __post_init__(self):
        if not 0.0 < self.cutoff <= 0.5:
            raise ValidationError(f"cutoff must be in (0, 1/2], got {self.cutoff}")


def flc_cutoff(stride: int) -> CutoffSpec:
    """Stride-only cutoff 1/(2*stride), the baseline rule this tool refines."""
    if stride < 1:
        raise SpecError("stride must be a positive integer")
    return CutoffSpec(1.0 / (2 * stride))


def band_power(spec: Spectrum, cutoff: CutoffSpec) -> tuple[np.ndarray, np.ndarray]:
    """(high-band power, total power) per channel."""
    power = power_spectrum(spec)
    mask = spec.grid.high_band(cutoff.cutoff)
    high = power[:, mask].sum(axis=1)
    total = power.sum(axis=(1, 2))
    return high, total


def aliasing_score(
    f: FeatureTensor, cutoff: CutoffSpec, mode: str = "per_channel_mean"
) -> float:
    """Fraction of spectral power above the cutoff, in [0, 1].

    per_channel_mean averages the per-channel ratios (channels with zero
    power are excluded); global pools power over all channels first.
    """
    if mode not in SCORE_MODES:
        raise SpecError(f"mode must be one of {SCORE_MODES}, got {mode!r}")
    high, total = band_power(fft2(f), cutoff)
    if mode == "global":
        denom = float(total.sum())
        if denom == 0.0:
            raise UndefinedRatioError("aliasing score undefined for all-zero tensor")
        return float(high.sum() / denom)
    defined = total > 0.0
    if not np.any(defined):
        raise UndefinedRatioError("aliasing score undefined for all-zero tensor")
    return float((high[defined] / total[defined]).mean())


def per_channel_scores(f: FeatureTensor, cutoff: CutoffSpec) -> list[float | None]:
    """Per-channel score list; None for zero-power channels."""
    high, total = band_power(fft2(f), cutoff)
    return [
        float(h / t) if t > 0.0 else None for h, t in zip(high, total)
    ]


def daf(f: FeatureTensor, cutoff: CutoffSpec) -> FeatureTensor:
    """De-aliasing filter: zero every coefficient in the high band.

    An ideal low-pass projection; the result has aliasing_score 0 at the
    same cutoff and is idempotent.
    """
    spec = fft2(f)
    mask = spec.grid.high_band(cutoff.cutoff)
    coeffs = spec.coeffs.copy()
    coeffs[:, mask] = 0.0
    out = ifft2_complex(Spectrum(coeffs))
    scale = float(np.abs(f.data).max())
    residue = float(np.abs(out.imag).max())
    if scale > 0.0 and residue >= 1e-9 * scale:
        raise InternalError(
            f"de-aliased output has imaginary residue {residue:.3e} "
            f"(limit {1e-9 * scale:.3e})"
        )
    return FeatureTensor(out.real)


def binomial_kernel(size: int) -> np.ndarray:
    """Separable 2D binomial kernel of the given size (sums to 1)."""
    if size not in _BINOMIAL_ROWS:
        raise SpecError(f"blur size must be one of {sorted(_BINOMIAL_ROWS)}")
    row = _BINOMIAL_ROWS[size]
    return np.outer(row, row)


def binomial_blur(f: FeatureTensor, size: int) -> FeatureTensor:
    """Depthwise separable binomial blur with edge-symmetric reflect padding.

    The symmetric (edge-including) reflection preserves each channel's
    mean exactly, so the DC gain is 1.
    """
    row = _BINOMIAL_ROWS.get(size)
    if row is None:
        raise SpecError(f"blur size must be one of {sorted(_BINOMIAL_ROWS)}")
    data = f.data.astype(np.float64)
    out = ndimage.convolve1d(data, row, axis=1, mode="reflect")
    out = ndimage.convolve1d(out, row, axis=2, mode="reflect")
    return FeatureTensor(out)


def add_gaussian_noise(f: FeatureTensor, sigma: float, seed: int) -> FeatureTensor:
    """Add i.i.d. N(0, sigma^2) noise, deterministic for a given seed."""
    if sigma < 0:
        raise SpecError("sigma must be >= 0")
    if sigma == 0:
        return FeatureTensor(f.data.astype(np.float64))
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=f.data.shape)
    return FeatureTensor(f.data.astype(np.float64) + noise)
