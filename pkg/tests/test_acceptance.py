"""Acceptance gate: one test per release criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion; a failed assertion in a test means that criterion is red.
"""

import json
import math
import time

import numpy as np
import pytest

from alias_scope.antialias import (
    CutoffSpec,
    add_gaussian_noise,
    aliasing_score,
    band_power,
    binomial_blur,
    daf,
)
from alias_scope.arrays import (
    BinaryMask,
    FeatureTensor,
    LabelMask,
    read_npy,
    write_npy,
)
from alias_scope.cli import main
from alias_scope.freqmix import FreqMixWeights, freqmix_apply, frequency_split
from alias_scope.sampling import (
    DownsampleSpec,
    FilterBank,
    depth_to_space,
    esr,
    filter_bank_orthogonality,
    nyquist,
    predicted_alias_frequency,
    space_to_depth,
    subsample,
)
from alias_scope.spectral import (
    Spectrum,
    dft2_naive,
    fft2,
    ifft2,
    ifft2_complex,
    power_spectrum,
    signed_frequencies,
)
from alias_scope.synth import one_over_f, tone, white_noise

import oracles

QUARTER = CutoffSpec(0.25)


def _pass(n, name):
    print(f"[acceptance] criterion {n:02d} ({name}): PASS")


def rel_err(a, b):
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    return np.abs(a - b).max() / scale


def test_criterion_01_fft_oracle_equivalence():
    rng = np.random.default_rng(101)
    sizes = {(8, 8), (16, 16), (32, 32), (7, 5), (31, 29)}
    while len(sizes) < 50:
        sizes.add((int(rng.integers(4, 33)), int(rng.integers(4, 33))))
    start = time.perf_counter()
    worst = 0.0
    for h, w in sorted(sizes):
        f = FeatureTensor(rng.standard_normal((1, h, w)))
        worst = max(worst, rel_err(fft2(f).coeffs, dft2_naive(f).coeffs))
        back = ifft2(fft2(f))
        worst = max(worst, rel_err(back.data, f.data))
    elapsed = time.perf_counter() - start
    assert worst < 1e-9, f"max relative error {worst:.3e}"
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    _pass(1, "fft oracle equivalence")


def test_criterion_02_parseval_and_conjugate_symmetry():
    rng = np.random.default_rng(102)
    for _ in range(100):
        h = int(rng.integers(2, 24))
        w = int(rng.integers(2, 24))
        f = FeatureTensor(rng.standard_normal((1, h, w)))
        coeffs = fft2(f).coeffs
        spatial = (f.data**2).sum()
        spectral = h * w * power_spectrum(Spectrum(coeffs)).sum()
        assert abs(spatial - spectral) / spatial < 1e-9
        flipped = np.conj(coeffs[0][(-np.arange(h)) % h][:, (-np.arange(w)) % w])
        assert rel_err(coeffs[0], flipped) < 1e-9
    _pass(2, "parseval and conjugate symmetry")


def test_criterion_03_esr_pinned_values():
    resnet = DownsampleSpec.from_stride(3, 64, 128, 2)
    assert abs(esr(resnet) - math.sqrt(2) / 2) < 1e-12
    assert abs(nyquist(resnet) - math.sqrt(2) / 4) < 1e-12
    identity = DownsampleSpec.from_stride(2, 3, 12, 2)
    assert abs(esr(identity) - 1.0) < 1e-12
    pointwise = DownsampleSpec.from_stride(1, 64, 64, 2)
    assert abs(esr(pointwise) - 0.5) < 1e-12
    _pass(3, "esr pinned values")


def test_criterion_04_alias_fold_law():
    start = time.perf_counter()
    for stride in (2, 4):
        for num in range(1, 8):
            k = num / 16
            f = tone((1, stride, 64), freq_w=k)
            sub = subsample(f, stride)
            width = 64 // stride
            power = (np.abs(fft2(sub).coeffs[0]) ** 2).sum(axis=0)
            measured_bin = int(np.argmax(power))
            freq = abs(signed_frequencies(width)[measured_bin])
            predicted = predicted_alias_frequency(k, stride)
            measured_index = round(freq * width)
            predicted_index = round(predicted * width)
            assert measured_index == predicted_index, (
                f"k={k} stride={stride}: bin {measured_index} != "
                f"{predicted_index}"
            )
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    _pass(4, "alias fold law")


def test_criterion_05_daf_exactness():
    rng = np.random.default_rng(105)
    cutoffs = [CutoffSpec(0.125), CutoffSpec(0.25), CutoffSpec(math.sqrt(2) / 4)]
    for i in range(100):
        h = int(rng.integers(4, 20))
        w = int(rng.integers(4, 20))
        f = FeatureTensor(rng.standard_normal((1, h, w)))
        cut = cutoffs[i % 3]
        out = daf(f, cut)
        assert aliasing_score(out, cut) < 1e-12
        again = daf(out, cut)
        assert np.abs(again.data - out.data).max() < 1e-9
        # direct imaginary-residue measurement of the masked inverse
        spec = fft2(f)
        coeffs = spec.coeffs.copy()
        coeffs[:, spec.grid.high_band(cut.cutoff)] = 0.0
        complex_out = ifft2_complex(Spectrum(coeffs))
        assert np.abs(complex_out.imag).max() < 1e-9 * np.abs(f.data).max()
    _pass(5, "daf exactness")


def test_criterion_06_lossless_identity_downsampling():
    rng = np.random.default_rng(106)
    for _ in range(100):
        c = int(rng.integers(1, 4))
        block = int(rng.integers(1, 4))
        h = block * int(rng.integers(1, 6))
        w = block * int(rng.integers(1, 6))
        f = FeatureTensor(rng.standard_normal((c, h, w)))
        back = depth_to_space(space_to_depth(f, block), block)
        assert back.data.tobytes() == f.data.tobytes()
    _pass(6, "lossless identity-kernel downsampling")


def test_criterion_07_blur_trend():
    for seed in range(20):
        f = white_noise((1, 32, 32), seed)
        base = aliasing_score(f, QUARTER)
        after3 = aliasing_score(binomial_blur(f, 3), QUARTER)
        assert after3 < base, f"seed {seed}: 3x3 blur did not reduce the score"
        high3, _ = band_power(fft2(binomial_blur(f, 3)), QUARTER)
        high7, _ = band_power(fft2(binomial_blur(f, 7)), QUARTER)
        assert high7.sum() < high3.sum(), (
            f"seed {seed}: 7x7 blur did not remove more band power"
        )
    _pass(7, "blur trend")


def test_criterion_08_noise_trend():
    for seed in range(20):
        f = one_over_f((1, 32, 32), seed)
        sigma = 0.05 * float(f.data.max() - f.data.min())
        noisy = add_gaussian_noise(f, sigma, seed=7000 + seed)
        assert aliasing_score(noisy, QUARTER) > aliasing_score(f, QUARTER), (
            f"seed {seed}: noise did not raise the score"
        )
    _pass(8, "noise trend")


def test_criterion_09_metric_oracle_equivalence():
    from alias_scope.segmetrics import (
        boundary_iou,
        classify_boundary_pixels,
        error_metrics,
        miou,
    )

    rng = np.random.default_rng(109)
    n_pairs = 10_000
    for i in range(n_pairs):
        h = int(rng.integers(1, 7))
        w = int(rng.integers(1, 7))
        pred = rng.random((h, w)) < rng.uniform(0.2, 0.8)
        gt = rng.random((h, w)) < rng.uniform(0.2, 0.8)
        d = 1 if i % 2 == 0 else 2
        rates = error_metrics(BinaryMask(pred), BinaryMask(gt), d)
        expected = oracles.boundary_error_rates(pred, gt, d)
        assert (rates.ferr, rates.merr, rates.derr) == expected
        assert boundary_iou(
            BinaryMask(pred), BinaryMask(gt), d
        ) == oracles.boundary_iou_value(pred, gt, d)
        tags = classify_boundary_pixels(BinaryMask(pred), BinaryMask(gt), d)
        fr, mg, dp = oracles.tag_counts(pred, gt, d)
        assert int((tags == 1).sum()) == fr
        assert int((tags == 2).sum()) == mg
        assert int((tags == 3).sum()) == dp
        assert miou(
            LabelMask(pred.astype(np.uint8), ignore_value=None),
            LabelMask(gt.astype(np.uint8), ignore_value=None),
            2,
        ) == oracles.binary_miou(pred, gt)
    _pass(9, "metric oracle equivalence")


def test_criterion_10_freqmix_identity_and_reduction():
    rng = np.random.default_rng(110)
    f = FeatureTensor(rng.standard_normal((2, 8, 8)))
    bypass = FreqMixWeights.bypass(2, 8, 8)
    assert np.abs(freqmix_apply(f, QUARTER, bypass).data - f.data).max() < 1e-9
    low_only = FreqMixWeights(
        np.full(2, np.inf),
        np.full(2, -np.inf),
        np.full((8, 8), np.inf),
        np.full((8, 8), -np.inf),
    )
    assert (
        np.abs(freqmix_apply(f, QUARTER, low_only).data - daf(f, QUARTER).data).max()
        < 1e-9
    )

    def sigmoid(x):
        return 1.0 / (1.0 + math.exp(-x))

    for _ in range(50):
        c = int(rng.integers(1, 4))
        h = int(rng.integers(2, 10))
        w = int(rng.integers(2, 10))
        g = FeatureTensor(rng.standard_normal((c, h, w)))
        weights = FreqMixWeights(
            rng.standard_normal(c),
            rng.standard_normal(c),
            rng.standard_normal((h, w)),
            rng.standard_normal((h, w)),
        )
        out = freqmix_apply(g, QUARTER, weights)
        low, high = frequency_split(g, QUARTER)
        ref = np.zeros((c, h, w))
        for ci in range(c):
            for y in range(h):
                for x in range(w):
                    ref[ci, y, x] = (
                        sigmoid(weights.a_low_channel[ci])
                        * sigmoid(weights.a_low_spatial[y, x])
                        * low.data[ci, y, x]
                        + sigmoid(weights.a_high_channel[ci])
                        * sigmoid(weights.a_high_spatial[y, x])
                        * high.data[ci, y, x]
                    )
        assert np.abs(out.data - ref).max() < 1e-9
    _pass(10, "freqmix identity and reduction")


def test_criterion_11_orthogonality_pinned_case():
    bank = FilterBank(np.eye(4))  # the four one-hot 2x2 identity kernels
    matrix, mean_off = filter_bank_orthogonality(bank)
    off_diagonal = matrix[~np.eye(4, dtype=bool)]
    assert np.all(off_diagonal == 0.0)
    assert mean_off == 0.0
    _pass(11, "orthogonality pinned case")


def test_criterion_12_cli_determinism(tmp_path, capsys):
    feat = tmp_path / "feat.npy"
    write_npy(feat, white_noise((2, 16, 16), seed=12).data)
    gt = np.zeros((8, 8), dtype=np.uint8)
    gt[2:6, 2:6] = 1
    pred = np.roll(gt, 1, axis=1)
    gt_path, pred_path = tmp_path / "gt.npy", tmp_path / "pred.npy"
    write_npy(gt_path, gt)
    write_npy(pred_path, pred)
    probs_path = tmp_path / "probs.npy"
    write_npy(probs_path, np.full((2, 8, 8), 0.5))
    feat8 = tmp_path / "feat8.npy"
    write_npy(feat8, white_noise((1, 8, 8), seed=13).data)
    bank_path = tmp_path / "bank.npy"
    write_npy(bank_path, np.eye(4).reshape(4, 2, 2))
    wdir = tmp_path / "weights"
    wdir.mkdir()
    write_npy(wdir / "a_low_channel.npy", np.full(2, 1.5))
    write_npy(wdir / "a_high_channel.npy", np.full(2, -0.5))
    write_npy(wdir / "a_low_spatial.npy", np.full((16, 16), 0.25))
    write_npy(wdir / "a_high_spatial.npy", np.full((16, 16), 0.75))

    invocations = {
        "esr": (
            ["esr", "--kernel", "3", "--cin", "64", "--cout", "128", "--stride", "2"],
            [],
        ),
        "score": (["score", str(feat), "--cutoff", "0.25"], []),
        "daf": (
            ["daf", str(feat), "--cutoff", "0.25", "--out", "{tmp}/daf.npy"],
            ["daf.npy"],
        ),
        "split": (
            [
                "split", str(feat), "--cutoff", "0.25",
                "--out-low", "{tmp}/low.npy", "--out-high", "{tmp}/high.npy",
            ],
            ["low.npy", "high.npy"],
        ),
        "blur": (
            ["blur", str(feat), "--size", "3", "--out", "{tmp}/blur.npy"],
            ["blur.npy"],
        ),
        "noise": (
            [
                "noise", str(feat), "--sigma", "0.5", "--seed", "3",
                "--out", "{tmp}/noise.npy",
            ],
            ["noise.npy"],
        ),
        "freqmix": (
            [
                "freqmix", str(feat), "--weights-dir", str(wdir),
                "--cutoff", "0.25", "--out", "{tmp}/mix.npy",
            ],
            ["mix.npy"],
        ),
        "metrics": (["metrics", str(pred_path), str(gt_path), "--band-width", "1"], []),
        "analyze": (
            [
                "analyze", "--features", str(feat8), "--probs", str(probs_path),
                "--pred", str(pred_path), "--gt", str(gt_path),
                "--cutoff", "0.25", "--window", "4", "--stride-px", "2",
                "--bins", "4", "--band-width", "1",
            ],
            [],
        ),
        "response": (
            [
                "response", "--builtin", "binomial3", "--grid", "64",
                "--map-out", "{tmp}/resp.npy",
            ],
            ["resp.npy"],
        ),
        "orth": (["orth", str(bank_path)], []),
        "fold": (["fold", "--freq", "0.4", "--stride", "2"], []),
    }

    for name, (template, output_names) in invocations.items():
        run_dir = tmp_path / name
        run_dir.mkdir()
        argv = [a.replace("{tmp}", str(run_dir)) for a in template]
        captured = []
        for _ in range(2):  # identical invocation, overwriting any outputs
            code = main(argv)
            out = capsys.readouterr().out
            assert code == 0, f"{name} exited {code}"
            files = {
                out_name: (run_dir / out_name).read_bytes()
                for out_name in output_names
            }
            captured.append((out.encode(), files))
        assert captured[0] == captured[1], f"{name} output not byte-identical"

    # NPY round trips are bit-exact for every supported dtype
    rng = np.random.default_rng(112)
    for dtype in (np.float32, np.float64, np.uint8, np.int32, np.uint16):
        if np.issubdtype(dtype, np.floating):
            arr = rng.standard_normal((3, 4)).astype(dtype)
        else:
            arr = rng.integers(0, 200, size=(3, 4)).astype(dtype)
        p1 = tmp_path / f"rt_{np.dtype(dtype).name}_1.npy"
        p2 = tmp_path / f"rt_{np.dtype(dtype).name}_2.npy"
        write_npy(p1, arr)
        back = read_npy(p1)
        write_npy(p2, back)
        assert back.tobytes() == arr.tobytes()
        assert p1.read_bytes() == p2.read_bytes()
    _pass(12, "cli determinism")
