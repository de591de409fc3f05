"""2D discrete Fourier transforms and frequency-domain helpers.

Convention: the forward transform carries the full 1/(H*W) factor and the
inverse carries none, so idft2(dft2(f)) == f and the total spatial power
equals H*W times the total spectral power.  Frequencies are reported in
signed normalized form: index i on an N-grid maps to i/N for i <= N/2 and
to i/N - 1 otherwise, so |freq| never exceeds 1/2 and the single bin at
the edge of an even grid is +1/2.

The transforms are self-contained: a radix-2 Cooley-Tukey path for
power-of-two lengths and a Bluestein chirp-z path for everything else,
both gated in the tests against the literal double-sum oracle dft2_naive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrays import FeatureTensor
from .errors import SizeError


def signed_frequencies(n: int) -> np.ndarray:
    """Signed normalized frequency for each DFT bin of an n-point grid."""
    idx = np.arange(n)
    return np.where(idx <= n // 2, idx / n, idx / n - 1.0)


@dataclass(frozen=True)
class FreqGrid:
    """Signed-frequency axes for an (H, W) spectrum."""

    height: int
    width: int

    @property
    def freq_h(self) -> np.ndarray:
        return signed_frequencies(self.height)

    @property
    def freq_w(self) -> np.ndarray:
        return signed_frequencies(self.width)

    def high_band(self, cutoff: float) -> np.ndarray:
        """Boolean (H, W) mask of bins with |k| > cutoff or |l| > cutoff."""
        hk = np.abs(self.freq_h) > cutoff
        hl = np.abs(self.freq_w) > cutoff
        return hk[:, None] | hl[None, :]


@dataclass(frozen=True)
class Spectrum:
    """Complex (C, H, W) DFT coefficients under the 1/(H*W) convention."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 3:
            raise ValueError(f"spectrum must be 3D, got shape {arr.shape}")
        object.__setattr__(self, "coeffs", arr)

    @property
    def channels(self) -> int:
        return self.coeffs.shape[0]

    @property
    def height(self) -> int:
        return self.coeffs.shape[1]

    @property
    def width(self) -> int:
        return self.coeffs.shape[2]

    @property
    def grid(self) -> FreqGrid:
        return FreqGrid(self.height, self.width)


# ---------------------------------------------------------------------------
# 1D transform engine (unnormalized; sign=-1 forward, sign=+1 inverse)


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _fft_pow2(x: np.ndarray, sign: int) -> np.ndarray:
    """Iterative radix-2 transform along the last axis (length power of 2)."""
    n = x.shape[-1]
    if n == 1:
        return x.astype(np.complex128, copy=True)
    # bit-reversal permutation
    levels = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(levels):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    out = x[..., rev].astype(np.complex128)
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(*out.shape[:-1], n // size, size)
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * tw
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        size *= 2
    return out


def _fft_bluestein(x: np.ndarray, sign: int) -> np.ndarray:
    """Chirp-z transform along the last axis for arbitrary length."""
    n = x.shape[-1]
    # exp(sign*pi*i*m^2/n); m^2 taken mod 2n keeps the phase argument small
    m = np.arange(n, dtype=np.int64)
    phase = (m * m) % (2 * n)
    chirp = np.exp(sign * 1j * np.pi * phase / n)
    padded = 1
    while padded < 2 * n - 1:
        padded *= 2
    a = np.zeros(x.shape[:-1] + (padded,), dtype=np.complex128)
    a[..., :n] = x * chirp
    b = np.zeros(padded, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    b[padded - n + 1:] = np.conj(chirp[1:][::-1])
    fa = _fft_pow2(a, -1)
    fb = _fft_pow2(b, -1)
    conv = _fft_pow2(fa * fb, +1) / padded
    return conv[..., :n] * chirp


def _fft1d(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    if _is_pow2(n):
        return _fft_pow2(x, sign)
    return _fft_bluestein(x, sign)


def _fft2_core(x: np.ndarray, sign: int) -> np.ndarray:
    """Unnormalized 2D transform over the last two axes."""
    y = _fft1d(np.asarray(x, dtype=np.complex128), sign)
    y = _fft1d(np.swapaxes(y, -1, -2), sign)
    return np.swapaxes(y, -1, -2)


# ---------------------------------------------------------------------------
# Public transforms


def dft2_naive(f: FeatureTensor) -> Spectrum:
    """Direct double-sum DFT per channel; the oracle for fft2.

    F(c, k, l) = (1/(H*W)) * sum_{h,w} f(c,h,w) * exp(-2*pi*j*(k*h/H + l*w/W))
    evaluated literally, one output bin at a time.
    """
    data = f.data
    c, h, w = data.shape
    hh = np.arange(h)[:, None]
    ww = np.arange(w)[None, :]
    out = np.empty((c, h, w), dtype=np.complex128)
    for k in range(h):
        for l in range(w):
            phase = np.exp(-2j * np.pi * (k * hh / h + l * ww / w))
            out[:, k, l] = (data * phase).sum(axis=(1, 2))
    return Spectrum(out / (h * w))


def fft2(f: FeatureTensor) -> Spectrum:
    """Fast 2D transform with the 1/(H*W) forward normalization."""
    data = f.data
    return Spectrum(_fft2_core(data, -1) / (data.shape[1] * data.shape[2]))


def ifft2(spec: Spectrum) -> FeatureTensor:
    """Inverse of fft2; returns the real part as a float tensor."""
    return FeatureTensor(ifft2_complex(spec).real)


def ifft2_complex(spec: Spectrum) -> np.ndarray:
    """Inverse transform without discarding the imaginary part."""
    return _fft2_core(spec.coeffs, +1)


def power_spectrum(spec: Spectrum) -> np.ndarray:
    """Per-(c, k, l) squared magnitude |F|^2."""
    return np.abs(spec.coeffs) ** 2


def center_shift(arr: np.ndarray) -> np.ndarray:
    """Roll a 2D frequency map so the DC bin sits at the center."""
    h, w = arr.shape[-2], arr.shape[-1]
    return np.roll(arr, (h // 2, w // 2), axis=(-2, -1))


def filter_frequency_response(kernel: np.ndarray, grid: int) -> np.ndarray:
    """Magnitude response of a 2D kernel on an N x N grid, DC at the center.

    Uses the unnormalized transform of the zero-padded kernel, so an
    all-pass 1x1 kernel [1] reports a flat response of 1.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2:
        raise SizeError(f"kernel must be 2D, got shape {kernel.shape}")
    kh, kw = kernel.shape
    if kh > grid or kw > grid:
        raise SizeError(f"kernel {kernel.shape} larger than {grid}x{grid} grid")
    padded = np.zeros((grid, grid), dtype=np.float64)
    padded[:kh, :kw] = kernel
    response = np.abs(_fft2_core(padded, -1))
    return center_shift(response)
