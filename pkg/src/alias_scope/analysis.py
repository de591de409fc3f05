"""Correlation machinery: per-pixel aliasing-score maps, per-pixel
cross-entropy, and binned statistics linking the two.

The per-pixel score map is a declared reconstruction: scores are computed
on sliding windows (window/stride/cutoff recorded in the map metadata),
assigned to window centers, and spread to the remaining pixels by nearest
computed center.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .antialias import CutoffSpec, aliasing_score
from .arrays import BinaryMask, FeatureTensor, LabelMask, class_mask
from .errors import ShapeError, SizeError, UndefinedRatioError, ValidationError
from .segmetrics import TAG_NAMES, classify_boundary_pixels, relevant_classes

THREADS_ENV = "ALIAS_SCOPE_THREADS"


def worker_count() -> int:
    """Available parallelism, capped by the ALIAS_SCOPE_THREADS env var."""
    n = os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap is not None:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            n = 1
    return n


@dataclass(frozen=True)
class ScoreMap:
    """Per-pixel score in [0, 1] plus the parameters that produced it."""

    values: np.ndarray  # (H, W) float
    window: int
    stride: int
    cutoff: float
    mode: str = "per_channel_mean"

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def metadata(self) -> dict:
        return {
            "window": self.window,
            "stride": self.stride,
            "cutoff": self.cutoff,
            "mode": self.mode,
        }


def _window_starts(extent: int, window: int, stride: int) -> list[int]:
    # clamp the final window inside the image so edges are covered
    starts = list(range(0, extent - window + 1, stride))
    last = extent - window
    if starts[-1] != last:
        starts.append(last)
    return starts


def patch_aliasing_map(
    f: FeatureTensor, window: int, stride: int, cutoff: CutoffSpec
) -> ScoreMap:
    """Sliding-window aliasing scores spread to every pixel.

    Each window's per-channel-mean score lands on its center pixel;
    pixels without a computed center take the nearest one.
    """
    if window < 1 or stride < 1:
        raise SizeError("window and stride must be positive")
    c, h, w = f.data.shape
    if window > min(h, w):
        raise SizeError(f"window {window} exceeds image {h}x{w}")
    ys = _window_starts(h, window, stride)
    xs = _window_starts(w, window, stride)
    positions = [(y, x) for y in ys for x in xs]

    def score_at(pos: tuple[int, int]) -> float:
        y, x = pos
        patch = FeatureTensor(f.data[:, y : y + window, x : x + window])
        try:
            return aliasing_score(patch, cutoff, mode="per_channel_mean")
        except UndefinedRatioError:
            return 0.0  # zero-power window carries no aliasing energy

    workers = worker_count()
    if workers > 1 and len(positions) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(score_at, positions))
    else:
        scores = [score_at(p) for p in positions]

    values = np.full((h, w), np.nan)
    for (y, x), s in zip(positions, scores):
        values[y + window // 2, x + window // 2] = s
    missing = np.isnan(values)
    if missing.any():
        _, (iy, ix) = ndimage.distance_transform_edt(missing, return_indices=True)
        values = values[iy, ix]
    return ScoreMap(values, window, stride, cutoff.cutoff)


def pixel_cross_entropy(probs: FeatureTensor, gt: LabelMask) -> np.ndarray:
    """Per-pixel -log p(true class); ignored pixels come back as NaN."""
    c, h, w = probs.data.shape
    if (h, w) != gt.data.shape:
        raise ShapeError(
            f"probability grid {probs.data.shape} does not match mask "
            f"{gt.data.shape}"
        )
    data = probs.data
    if np.any(data < -1e-6) or np.any(np.abs(data.sum(axis=0) - 1.0) > 1e-6):
        raise ValidationError("per-pixel probabilities do not form a simplex")
    gt.validate_classes(c)
    labels = gt.data
    valid = np.ones((h, w), dtype=bool)
    if gt.ignore_value is not None:
        valid = labels != gt.ignore_value
    out = np.full((h, w), np.nan)
    safe_labels = np.where(valid, labels, 0).astype(np.int64)
    picked = np.take_along_axis(data, safe_labels[None, :, :], axis=0)[0]
    with np.errstate(divide="ignore"):
        out[valid] = -np.log(np.maximum(picked[valid], 0.0))
    return out


@dataclass(frozen=True)
class BinnedCurve:
    """Equal-width bins over [0, 1] with per-bin counts and means."""

    edges: np.ndarray
    counts: np.ndarray
    means: np.ndarray  # NaN where empty
    type_counts: dict[str, np.ndarray] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def n_bins(self) -> int:
        return len(self.counts)

    def rows(self) -> list[dict]:
        out = []
        for i in range(self.n_bins):
            row = {
                "bin_lo": float(self.edges[i]),
                "bin_hi": float(self.edges[i + 1]),
                "count": int(self.counts[i]),
                "mean": None if np.isnan(self.means[i]) else float(self.means[i]),
            }
            for name, counts in self.type_counts.items():
                row[f"count_{name}"] = int(counts[i])
            out.append(row)
        return out


def _bin_index(scores: np.ndarray, n_bins: int) -> np.ndarray:
    idx = np.floor(scores * n_bins).astype(np.int64)
    return np.clip(idx, 0, n_bins - 1)


def bin_by_score(
    score: ScoreMap, value: np.ndarray, mask: BinaryMask, n_bins: int = 20
) -> BinnedCurve:
    """Mean of `value` per score bin, over pixels where `mask` is set."""
    if n_bins < 2:
        raise SizeError("n_bins must be >= 2")
    value = np.asarray(value, dtype=np.float64)
    if score.values.shape != value.shape or score.values.shape != mask.bits.shape:
        raise ShapeError("score, value, and mask shapes must match")
    select = mask.bits & ~np.isnan(value)
    idx = _bin_index(score.values[select], n_bins)
    vals = value[select]
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=vals, minlength=n_bins)
    means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    return BinnedCurve(edges, counts, means, meta=dict(score.metadata()))


def error_type_distribution(
    pred: LabelMask,
    gt: LabelMask,
    score: ScoreMap,
    d: int,
    n_bins: int = 20,
) -> BinnedCurve:
    """Histogram of boundary error types per score bin.

    Tags are computed per class and merged; a pixel keeps the tag of the
    lowest class id that claims it.
    """
    if pred.data.shape != gt.data.shape or pred.data.shape != score.values.shape:
        raise ShapeError("pred, gt, and score shapes must match")
    if n_bins < 2:
        raise SizeError("n_bins must be >= 2")
    merged = np.zeros(gt.data.shape, dtype=np.uint8)
    for c in relevant_classes(pred, gt):
        tags = classify_boundary_pixels(class_mask(pred, c), class_mask(gt, c), d)
        merged = np.where(merged == 0, tags, merged)
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    tagged = merged != 0
    counts = np.zeros(n_bins, dtype=np.int64)
    type_counts = {name: np.zeros(n_bins, dtype=np.int64) for name in TAG_NAMES.values()}
    if tagged.any():
        idx = _bin_index(score.values[tagged], n_bins)
        counts = np.bincount(idx, minlength=n_bins)
        for tag, name in TAG_NAMES.items():
            sel = merged[tagged] == tag
            type_counts[name] = np.bincount(idx[sel], minlength=n_bins)
    means = np.full(n_bins, np.nan)
    meta = dict(score.metadata())
    meta["band_width"] = d
    return BinnedCurve(edges, counts, means, type_counts, meta)
