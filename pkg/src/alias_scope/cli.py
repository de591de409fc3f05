"""Command-line interface.

Measuring subcommands (esr, score, metrics, analyze, orth, fold, response)
print a JSON report to stdout or --out; transforming subcommands (daf,
blur, noise, freqmix, split) write NPY files.  Reports embed the tool
version, the resolved run configuration, and sha256 digests of every
input, so identical invocations produce byte-identical output.

Exit codes: 0 success, 2 usage/input error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    ScoreMap,
    bin_by_score,
    error_type_distribution,
    patch_aliasing_map,
    pixel_cross_entropy,
    worker_count,
)
from .antialias import (
    CutoffSpec,
    add_gaussian_noise,
    aliasing_score,
    binomial_blur,
    binomial_kernel,
    daf,
    flc_cutoff,
    per_channel_scores,
)
from .arrays import (
    BinaryMask,
    FeatureTensor,
    LabelMask,
    class_mask,
    load_array,
    read_npy,
    save_array,
    write_npy,
)
from .errors import InputError, InternalError
from .freqmix import (
    FreqMixParams,
    FreqMixWeights,
    freqmix_apply,
    freqmix_predict_weights,
)
from .freqmix import frequency_split
from .sampling import (
    DownsampleSpec,
    FilterBank,
    esr,
    esr_anisotropic,
    filter_bank_orthogonality,
    nyquist,
    predicted_alias_frequency,
)
from .spectral import filter_frequency_response
from .segmetrics import (
    boundary_band,
    default_band_width,
    error_metrics,
    miou,
    multiclass_boundary,
    multiclass_errors,
    relevant_classes,
)

TOOL_NAME = "alias-scope"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters, embedded in every report."""

    cutoff_source: str
    cutoff: float | None
    score_mode: str
    band_width: int | None
    window: int
    stride: int
    bins: int
    out_format: str
    seed: int
    threads: int


# ---------------------------------------------------------------------------
# config file (sections of key = value pairs)


def _load_config_file(path) -> dict[str, str]:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    flat = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            flat[f"{section}.{key}"] = value.strip().strip('"').strip("'")
    return flat


def _cfg(args, key: str, cast, fallback, attr: str | None = None):
    """Explicit flag > config file > fallback."""
    attr = attr if attr is not None else key.split(".", 1)[1]
    value = getattr(args, attr, None)
    if value is not None:
        return value
    cfg = getattr(args, "_config", {})
    if key in cfg:
        try:
            return cast(cfg[key])
        except ValueError as exc:
            raise InputError(f"config {key}={cfg[key]!r}: {exc}") from exc
    return fallback


# ---------------------------------------------------------------------------
# cutoff resolution


def _downsample_spec_from_args(args) -> DownsampleSpec:
    kernel_h = args.kernel_h if args.kernel_h is not None else args.kernel
    kernel_w = args.kernel_w if args.kernel_w is not None else args.kernel
    if kernel_h is None or kernel_w is None:
        raise InputError("missing --kernel (or --kernel-h/--kernel-w)")
    if args.cin is None or args.cout is None:
        raise InputError("missing --cin/--cout")
    sizes = (args.in_h, args.in_w, args.out_h, args.out_w)
    if any(v is not None for v in sizes):
        if any(v is None for v in sizes):
            raise InputError("explicit sizes need all of --in-h/--in-w/--out-h/--out-w")
        spec = DownsampleSpec(
            kernel_h, kernel_w, args.cin, args.cout,
            args.in_h, args.in_w, args.out_h, args.out_w,
        )
        if args.stride is not None and (
            spec.stride_h != args.stride or spec.stride_w != args.stride
        ):
            raise InputError(
                f"--stride {args.stride} inconsistent with sizes "
                f"(stride {spec.stride_h}x{spec.stride_w})"
            )
        return spec
    if args.stride is None:
        raise InputError("missing --stride (or explicit sizes)")
    return DownsampleSpec.from_stride(
        (kernel_h, kernel_w), args.cin, args.cout, args.stride
    )


def _resolve_cutoff(args, default: float | None = None) -> tuple[str, float]:
    """Pick exactly one cutoff source: --cutoff, ESR flags, or --flc-stride."""
    cfg = getattr(args, "_config", {})
    explicit = args.cutoff
    if explicit is None and "cutoff.value" in cfg:
        explicit = float(cfg["cutoff.value"])
    esr_given = any(
        getattr(args, name, None) is not None
        for name in ("kernel", "kernel_h", "kernel_w", "cin", "cout")
    )
    flc = getattr(args, "flc_stride", None)
    if flc is None and "cutoff.flc_stride" in cfg and explicit is None and not esr_given:
        flc = int(cfg["cutoff.flc_stride"])
    sources = [explicit is not None, esr_given, flc is not None]
    if sum(sources) > 1:
        raise InputError(
            "specify exactly one cutoff source: --cutoff, ESR flags, or --flc-stride"
        )
    if explicit is not None:
        return "explicit", float(explicit)
    if esr_given:
        return "esr", nyquist(_downsample_spec_from_args(args))
    if flc is not None:
        return "flc", flc_cutoff(flc).cutoff
    if default is not None:
        return "default", default
    raise InputError(
        "a cutoff is required: give --cutoff, ESR flags, or --flc-stride"
    )


# ---------------------------------------------------------------------------
# report plumbing


def _sha256(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    return obj


def _run_config(args, cutoff_source: str = "none", cutoff: float | None = None) -> RunConfig:
    return RunConfig(
        cutoff_source=cutoff_source,
        cutoff=cutoff,
        score_mode=_cfg(args, "score.mode", str, "per_channel_mean"),
        band_width=_cfg(args, "metrics.band_width", int, None),
        window=_cfg(args, "analysis.window", int, 32),
        stride=_cfg(args, "analysis.stride", int, 8, attr="stride_px"),
        bins=_cfg(args, "analysis.bins", int, 20),
        out_format=_cfg(args, "output.format", str, "json", attr="format"),
        seed=_cfg(args, "output.seed", int, 0),
        threads=worker_count(),
    )


def _report(args, config: RunConfig, inputs: dict, result: dict) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "config": asdict(config),
        "inputs": {
            name: {"path": str(path), "sha256": _sha256(path)}
            for name, path in inputs.items()
        },
        "result": result,
    }


def _emit_json(args, report: dict) -> None:
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_curves_csv(args, curves: dict[str, list[dict]]) -> None:
    fields = ["curve"]
    for rows in curves.values():
        for row in rows:
            for key in row:
                if key not in fields:
                    fields.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for name, rows in curves.items():
        for row in rows:
            writer.writerow({"curve": name, **{k: _csv_cell(v) for k, v in row.items()}})
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv_cell(value):
    if value is None:
        return ""
    return value


def _require_json(config: RunConfig) -> None:
    if config.out_format != "json":
        raise InputError("csv output is only available for binned curves (analyze)")


def _load_feature(path) -> FeatureTensor:
    obj = load_array(path)
    if not isinstance(obj, FeatureTensor):
        raise InputError(f"{path}: expected a float feature tensor")
    return obj


def _load_mask(path, ignore_value) -> LabelMask:
    obj = load_array(path, ignore_value=ignore_value)
    if not isinstance(obj, LabelMask):
        raise InputError(f"{path}: expected an integer label mask")
    return obj


def _band_width_for(args, shape: tuple[int, int]) -> int:
    d = _cfg(args, "metrics.band_width", int, None)
    if d is None:
        return default_band_width(*shape)
    return d


# ---------------------------------------------------------------------------
# subcommands


def cmd_esr(args) -> None:
    spec = _downsample_spec_from_args(args)
    config = _run_config(args, "esr", nyquist(spec))
    _require_json(config)
    rate = esr(spec)
    rate_h, rate_w = esr_anisotropic(spec)
    result = {
        "esr": rate,
        "esr_h": rate_h,
        "esr_w": rate_w,
        "nyquist": nyquist(spec),
        "stride_h": spec.stride_h,
        "stride_w": spec.stride_w,
        "kernel_smaller_than_stride": spec.kernel_smaller_than_stride,
    }
    _emit_json(args, _report(args, config, {}, result))


def cmd_score(args) -> None:
    source, cutoff = _resolve_cutoff(args)
    config = _run_config(args, source, cutoff)
    _require_json(config)
    f = _load_feature(args.input)
    spec = CutoffSpec(cutoff)
    result = {
        "aliasing_score": aliasing_score(f, spec, mode=config.score_mode),
        "mode": config.score_mode,
        "per_channel_mean": aliasing_score(f, spec, mode="per_channel_mean"),
        "global": aliasing_score(f, spec, mode="global"),
        "per_channel": per_channel_scores(f, spec),
        "cutoff": cutoff,
        "cutoff_source": source,
    }
    _emit_json(args, _report(args, config, {"input": args.input}, result))


def _require_out(args) -> str:
    if not args.out:
        raise InputError("this command writes an array: --out is required")
    return args.out


def cmd_daf(args) -> None:
    _, cutoff = _resolve_cutoff(args)
    f = _load_feature(args.input)
    save_array(daf(f, CutoffSpec(cutoff)), _require_out(args))


def cmd_split(args) -> None:
    _, cutoff = _resolve_cutoff(args)
    f = _load_feature(args.input)
    low, high = frequency_split(f, CutoffSpec(cutoff))
    save_array(low, args.out_low)
    save_array(high, args.out_high)


def cmd_blur(args) -> None:
    f = _load_feature(args.input)
    save_array(binomial_blur(f, args.size), _require_out(args))


def cmd_noise(args) -> None:
    config = _run_config(args)
    f = _load_feature(args.input)
    save_array(add_gaussian_noise(f, args.sigma, config.seed), _require_out(args))


def cmd_freqmix(args) -> None:
    _, cutoff = _resolve_cutoff(args, default=0.25)
    f = _load_feature(args.input)
    if (args.weights_dir is None) == (args.params_dir is None):
        raise InputError("give exactly one of --weights-dir or --params-dir")
    if args.weights_dir is not None:
        weights = FreqMixWeights.from_npy_dir(args.weights_dir)
    else:
        params = FreqMixParams.from_npy_dir(args.params_dir)
        weights = freqmix_predict_weights(f, params)
    save_array(freqmix_apply(f, CutoffSpec(cutoff), weights), _require_out(args))


def cmd_metrics(args) -> None:
    config = _run_config(args)
    _require_json(config)
    ignore = args.ignore_value
    pred = _load_mask(args.pred, ignore)
    gt = _load_mask(args.gt, ignore)
    if pred.data.shape != gt.data.shape:
        raise InputError("pred and gt shapes differ")
    classes = relevant_classes(pred, gt)
    n_classes = args.classes if args.classes is not None else (max(classes) + 1 if classes else 0)
    if n_classes == 0:
        _emit_json(
            args,
            _report(
                args,
                config,
                {"pred": args.pred, "gt": args.gt},
                {"per_class": {}, "note": "no class defined anywhere"},
            ),
        )
        return
    d = _band_width_for(args, gt.data.shape)
    errors = multiclass_errors(pred, gt, d)
    boundary = multiclass_boundary(pred, gt, d)
    per_class = {}
    for c in errors.per_class:
        gt_c = class_mask(gt, c)
        baseline = error_metrics(gt_c, gt_c, d)
        rates = errors.per_class[c]
        per_class[c] = {
            "ferr": rates.ferr,
            "merr": rates.merr,
            "derr": rates.derr,
            "derr_perfect_baseline": baseline.derr,
            "biou": boundary.per_class_iou[c],
            "bacc": boundary.per_class_acc[c],
        }
    result = {
        "miou": miou(pred, gt, n_classes, gt_classes_only=not args.all_classes),
        "band_width": d,
        "n_classes": n_classes,
        "per_class": per_class,
        "mean": {
            "ferr": errors.ferr,
            "merr": errors.merr,
            "derr": errors.derr,
            "biou": boundary.biou,
            "bacc": boundary.bacc,
        },
    }
    _emit_json(args, _report(args, config, {"pred": args.pred, "gt": args.gt}, result))


def _gt_boundary_union(gt: LabelMask, d: int) -> BinaryMask:
    union = np.zeros(gt.data.shape, dtype=bool)
    for c in gt.present_classes():
        union |= boundary_band(class_mask(gt, c), d).band.bits
    return BinaryMask(union)


def cmd_analyze(args) -> None:
    inputs = {}
    if (args.features is None) == (args.score is None):
        raise InputError("give exactly one of --features or --score")
    curves: dict[str, list[dict]] = {}
    result: dict = {}
    if args.features is not None:
        source, cutoff = _resolve_cutoff(args)
        config = _run_config(args, source, cutoff)
        f = _load_feature(args.features)
        inputs["features"] = args.features
        score_map = patch_aliasing_map(
            f, config.window, config.stride, CutoffSpec(cutoff)
        )
    else:
        config = _run_config(args)
        raw = read_npy(args.score)
        if raw.ndim != 2:
            raise InputError(f"{args.score}: score map must be 2D")
        if raw.size and (raw.min() < 0.0 or raw.max() > 1.0):
            raise InputError(f"{args.score}: score values must lie in [0, 1]")
        inputs["score"] = args.score
        score_map = ScoreMap(
            raw.astype(np.float64), window=0, stride=0, cutoff=0.0, mode="external"
        )
    result["score_map"] = score_map.metadata()
    result["score_map"]["mean"] = float(score_map.values.mean())

    gt = None
    if args.gt is not None:
        gt = _load_mask(args.gt, args.ignore_value)
        inputs["gt"] = args.gt
        if gt.data.shape != score_map.values.shape:
            raise InputError("gt shape does not match the score map")
    d = _band_width_for(args, score_map.values.shape)
    result["band_width"] = d

    if args.probs is not None:
        if gt is None:
            raise InputError("--probs needs --gt")
        probs = _load_feature(args.probs)
        inputs["probs"] = args.probs
        ce = pixel_cross_entropy(probs, gt)
        mask = _gt_boundary_union(gt, d)
        curve = bin_by_score(score_map, ce, mask, config.bins)
        curves["boundary_cross_entropy"] = curve.rows()

    if args.pred is not None:
        if gt is None:
            raise InputError("--pred needs --gt")
        pred = _load_mask(args.pred, args.ignore_value)
        inputs["pred"] = args.pred
        if pred.data.shape != gt.data.shape:
            raise InputError("pred and gt shapes differ")
        dist = error_type_distribution(pred, gt, score_map, d, config.bins)
        curves["error_type_distribution"] = dist.rows()

    if config.out_format == "csv":
        if not curves:
            raise InputError("csv output needs at least one curve (--probs/--pred)")
        _emit_curves_csv(args, curves)
        return
    result["curves"] = curves
    _emit_json(args, _report(args, config, inputs, result))


def cmd_response(args) -> None:
    config = _run_config(args)
    _require_json(config)
    inputs = {}
    if (args.builtin is None) == (args.kernel_file is None):
        raise InputError("give exactly one of --builtin or --kernel-file")
    if args.builtin is not None:
        if not args.builtin.startswith("binomial"):
            raise InputError(f"unknown builtin kernel {args.builtin!r}")
        try:
            size = int(args.builtin.removeprefix("binomial"))
        except ValueError as exc:
            raise InputError(f"unknown builtin kernel {args.builtin!r}") from exc
        kernel = binomial_kernel(size)
    else:
        kernel = read_npy(args.kernel_file).astype(np.float64)
        inputs["kernel"] = args.kernel_file
    response = filter_frequency_response(kernel, args.grid)
    if args.map_out:
        write_npy(args.map_out, response)
    center = args.grid // 2
    result = {
        "grid": args.grid,
        "dc": float(response[center, center]),
        "min": float(response.min()),
        "max": float(response.max()),
        "map_out": str(args.map_out) if args.map_out else None,
    }
    _emit_json(args, _report(args, config, inputs, result))


def cmd_orth(args) -> None:
    config = _run_config(args)
    _require_json(config)
    bank = FilterBank.from_npy(args.bank)
    matrix, mean_off = filter_bank_orthogonality(bank)
    result = {
        "count": bank.count,
        "mean_abs_cosine_similarity": mean_off,
        "matrix": matrix,
    }
    _emit_json(args, _report(args, config, {"bank": args.bank}, result))


def cmd_fold(args) -> None:
    config = _run_config(args)
    _require_json(config)
    folded = predicted_alias_frequency(args.freq, args.stride)
    result = {
        "input_frequency": args.freq,
        "stride": args.stride,
        "folded_frequency": folded,
    }
    _emit_json(args, _report(args, config, {}, result))


# ---------------------------------------------------------------------------
# parser


def _add_cutoff_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("cutoff (exactly one source)")
    group.add_argument("--cutoff", type=float, help="explicit normalized cutoff")
    group.add_argument("--flc-stride", type=int, help="stride-only cutoff 1/(2s)")
    _add_esr_flags(parser)


def _add_esr_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("downsampler description")
    group.add_argument("--kernel", type=int, help="square kernel size")
    group.add_argument("--kernel-h", type=int)
    group.add_argument("--kernel-w", type=int)
    group.add_argument("--cin", type=int, help="input channels")
    group.add_argument("--cout", type=int, help="output channels")
    group.add_argument("--stride", type=int, help="spatial stride")
    group.add_argument("--in-h", type=int)
    group.add_argument("--in-w", type=int)
    group.add_argument("--out-h", type=int)
    group.add_argument("--out-w", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report/array here instead of stdout")
    common.add_argument("--format", dest="format", choices=["json", "csv"])
    common.add_argument("--config", help="key=value section config file")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Aliasing analysis for downsampling operators and "
        "segmentation outputs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("esr", parents=[common], help="equivalent sampling rate")
    _add_esr_flags(p)
    p.set_defaults(func=cmd_esr)

    p = sub.add_parser("score", parents=[common], help="aliasing score of a tensor")
    p.add_argument("input")
    p.add_argument("--mode", choices=["per_channel_mean", "global"])
    _add_cutoff_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("daf", parents=[common], help="ideal de-aliasing filter")
    p.add_argument("input")
    _add_cutoff_flags(p)
    p.set_defaults(func=cmd_daf)

    p = sub.add_parser("split", parents=[common], help="low/high band split")
    p.add_argument("input")
    p.add_argument("--out-low", required=True)
    p.add_argument("--out-high", required=True)
    _add_cutoff_flags(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("blur", parents=[common], help="binomial blur baseline")
    p.add_argument("input")
    p.add_argument("--size", type=int, choices=[3, 5, 7], default=3)
    p.set_defaults(func=cmd_blur)

    p = sub.add_parser("noise", parents=[common], help="seeded Gaussian noise")
    p.add_argument("input")
    p.add_argument("--sigma", type=float, required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("freqmix", parents=[common], help="frequency mixing forward pass")
    p.add_argument("input")
    p.add_argument("--weights-dir", help="directory of weight-logit NPY files")
    p.add_argument("--params-dir", help="directory of prediction-head NPY files")
    _add_cutoff_flags(p)
    p.set_defaults(func=cmd_freqmix)

    p = sub.add_parser("metrics", parents=[common], help="segmentation metrics")
    p.add_argument("pred")
    p.add_argument("gt")
    p.add_argument("--classes", type=int)
    p.add_argument("--band-width", dest="band_width", type=int)
    p.add_argument("--ignore-value", type=int, default=255)
    p.add_argument("--all-classes", action="store_true",
                   help="average IoU over all classes, not just those in gt")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("analyze", parents=[common], help="score/error correlation")
    p.add_argument("--features", help="feature tensor NPY for the score map")
    p.add_argument("--score", help="precomputed 2D score map NPY")
    p.add_argument("--probs", help="per-class probability tensor NPY")
    p.add_argument("--pred", help="predicted label mask NPY")
    p.add_argument("--gt", help="ground-truth label mask NPY")
    p.add_argument("--window", type=int)
    p.add_argument("--stride-px", dest="stride_px", type=int,
                   help="window stride in pixels")
    p.add_argument("--bins", type=int)
    p.add_argument("--band-width", dest="band_width", type=int)
    p.add_argument("--ignore-value", type=int, default=255)
    _add_cutoff_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("response", parents=[common], help="filter frequency response")
    p.add_argument("--builtin", help="binomial3 | binomial5 | binomial7")
    p.add_argument("--kernel-file", help="2D kernel NPY")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--map-out", help="write the centered magnitude map NPY here")
    p.set_defaults(func=cmd_response)

    p = sub.add_parser("orth", parents=[common], help="filter bank orthogonality")
    p.add_argument("bank")
    p.set_defaults(func=cmd_orth)

    p = sub.add_parser("fold", parents=[common], help="predicted alias frequency")
    p.add_argument("--freq", type=float, required=True)
    p.add_argument("--stride", type=int, required=True)
    p.set_defaults(func=cmd_fold)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config = _load_config_file(args.config) if args.config else {}
        args.func(args)
    except InternalError as exc:
        print(f"{TOOL_NAME}: internal error: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError) as exc:
        print(f"{TOOL_NAME}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
