"""Frequency-mixing operator: split a tensor at a cutoff and recombine the
bands with sigmoid-squashed channel and spatial weights.

Weights are stored as raw logits; the sigmoid is applied here so exported
parameters stay unconstrained.  The operator is forward-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.special import expit

from .antialias import CutoffSpec, daf
from .arrays import FeatureTensor, read_npy
from .errors import ShapeError

WEIGHT_FIELDS = (
    "a_low_channel",
    "a_high_channel",
    "a_low_spatial",
    "a_high_spatial",
)

PARAM_FIELDS = (
    "fc_low_weight",
    "fc_low_bias",
    "fc_high_weight",
    "fc_high_bias",
    "conv_low_kernel",
    "conv_low_bias",
    "conv_high_kernel",
    "conv_high_bias",
)


@dataclass(frozen=True)
class FreqMixWeights:
    """Per-band channel vectors (C,) and spatial maps (H, W), as logits."""

    a_low_channel: np.ndarray
    a_high_channel: np.ndarray
    a_low_spatial: np.ndarray
    a_high_spatial: np.ndarray

    def __post_init__(self):
        for name in ("a_low_channel", "a_high_channel"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 1:
                raise ShapeError(f"{name} must be 1D (C,), got {arr.shape}")
            object.__setattr__(self, name, arr)
        for name in ("a_low_spatial", "a_high_spatial"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2:
                raise ShapeError(f"{name} must be 2D (H, W), got {arr.shape}")
            object.__setattr__(self, name, arr)

    def check_against(self, f: FeatureTensor) -> None:
        c, h, w = f.data.shape
        if self.a_low_channel.shape != (c,) or self.a_high_channel.shape != (c,):
            raise ShapeError(
                f"channel weights {self.a_low_channel.shape} do not match C={c}"
            )
        if self.a_low_spatial.shape != (h, w) or self.a_high_spatial.shape != (h, w):
            raise ShapeError(
                f"spatial weights {self.a_low_spatial.shape} do not match "
                f"({h}, {w})"
            )

    @classmethod
    def bypass(cls, channels: int, height: int, width: int) -> "FreqMixWeights":
        """Logits at +inf on both bands: the operator becomes the identity."""
        inf = np.inf
        return cls(
            np.full(channels, inf),
            np.full(channels, inf),
            np.full((height, width), inf),
            np.full((height, width), inf),
        )

    @classmethod
    def from_npy_dir(cls, directory) -> "FreqMixWeights":
        directory = Path(directory)
        return cls(*(read_npy(directory / f"{name}.npy") for name in WEIGHT_FIELDS))


@dataclass(frozen=True)
class FreqMixParams:
    """Prediction-head parameters: per-band C->C fc and k x k conv."""

    fc_low_weight: np.ndarray
    fc_low_bias: np.ndarray
    fc_high_weight: np.ndarray
    fc_high_bias: np.ndarray
    conv_low_kernel: np.ndarray
    conv_low_bias: float
    conv_high_kernel: np.ndarray
    conv_high_bias: float

    def __post_init__(self):
        for name in ("fc_low_weight", "fc_high_weight"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ShapeError(f"{name} must be square (C, C), got {arr.shape}")
            object.__setattr__(self, name, arr)
        c = self.fc_low_weight.shape[0]
        for name in ("fc_low_bias", "fc_high_bias"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (c,):
                raise ShapeError(f"{name} must be (C,)={c}, got {arr.shape}")
            object.__setattr__(self, name, arr)
        for name in ("conv_low_kernel", "conv_high_kernel"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2:
                raise ShapeError(f"{name} must be 2D (k, k), got {arr.shape}")
            object.__setattr__(self, name, arr)
        for name in ("conv_low_bias", "conv_high_bias"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).reshape(-1)
            if arr.size != 1:
                raise ShapeError(f"{name} must be a scalar, got {arr.size} values")
            object.__setattr__(self, name, float(arr[0]))

    @property
    def channels(self) -> int:
        return self.fc_low_weight.shape[0]

    @classmethod
    def from_npy_dir(cls, directory) -> "FreqMixParams":
        directory = Path(directory)
        return cls(*(read_npy(directory / f"{name}.npy") for name in PARAM_FIELDS))


def frequency_split(
    f: FeatureTensor, cutoff: CutoffSpec
) -> tuple[FeatureTensor, FeatureTensor]:
    """(low, high) band pair with low + high == f."""
    low = daf(f, cutoff)
    high = FeatureTensor(f.data.astype(np.float64) - low.data)
    return low, high


def freqmix_apply(
    f: FeatureTensor, cutoff: CutoffSpec, weights: FreqMixWeights
) -> FeatureTensor:
    """Recombine the two bands with sigmoid(channel) * sigmoid(spatial) gains."""
    weights.check_against(f)
    low, high = frequency_split(f, cutoff)
    low_gain = expit(weights.a_low_channel)[:, None, None] * expit(
        weights.a_low_spatial
    )[None, :, :]
    high_gain = expit(weights.a_high_channel)[:, None, None] * expit(
        weights.a_high_spatial
    )[None, :, :]
    return FeatureTensor(low_gain * low.data + high_gain * high.data)


def _reflect_conv2d(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    # correlation (no kernel flip) with edge-symmetric padding, matching the
    # usual conv-layer orientation
    return ndimage.correlate(plane, kernel, mode="reflect")


def freqmix_predict_weights(f: FeatureTensor, params: FreqMixParams) -> FreqMixWeights:
    """Predict logits from the tensor itself.

    Channel logits: fc(global average pool of f) per band.  Spatial logits:
    k x k conv over the channel-mean map with reflect padding, per band.
    """
    if params.channels != f.channels:
        raise ShapeError(
            f"params expect C={params.channels}, tensor has C={f.channels}"
        )
    data = f.data.astype(np.float64)
    pooled = data.mean(axis=(1, 2))
    chan_low = params.fc_low_weight @ pooled + params.fc_low_bias
    chan_high = params.fc_high_weight @ pooled + params.fc_high_bias
    mean_map = data.mean(axis=0)
    spat_low = _reflect_conv2d(mean_map, params.conv_low_kernel) + params.conv_low_bias
    spat_high = (
        _reflect_conv2d(mean_map, params.conv_high_kernel) + params.conv_high_bias
    )
    return FreqMixWeights(chan_low, chan_high, spat_low, spat_high)
