"""Shared fixtures: synthetic WAV corpora and feature-space toy datasets."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import pytest

from tecc_screen.cepstral import FeatureMatrix
from tecc_screen.signal_io import save_wav_pcm16


def bandpass_noise(rng, fs=16000, dur_s=1.0, band=(300.0, 1200.0), bursts=3):
    """Burst-modulated noise confined to a frequency band (brick-wall FFT)."""
    n = int(fs * dur_s)
    spectrum = np.fft.rfft(rng.standard_normal(n))
    freqs = np.fft.rfftfreq(n, 1.0 / fs)
    spectrum[(freqs < band[0]) | (freqs > band[1])] = 0.0
    sig = np.fft.irfft(spectrum, n)
    envelope = np.zeros(n)
    blen = int(0.15 * fs)
    win = np.hanning(blen)
    for _ in range(bursts):
        start = int(rng.integers(0, n - blen))
        envelope[start : start + blen] += win
    sig = sig * (0.2 + envelope)
    return 0.7 * sig / np.max(np.abs(sig))


def write_synthetic_corpus(
    root: Path,
    num_per_class: int,
    seed: int = 0,
    fs: int = 16000,
    dur_s: float = 1.0,
    band_a=(300.0, 1200.0),
    band_b=(1500.0, 4000.0),
) -> Path:
    """Write WAVs plus a manifest; class A is positive. Returns manifest path."""
    rng = np.random.default_rng(seed)
    root.mkdir(parents=True, exist_ok=True)
    audio_dir = root / "audio"
    audio_dir.mkdir(exist_ok=True)
    rows = []
    for i in range(num_per_class):
        for label, band in (("p", band_a), ("n", band_b)):
            rid = f"{label}{i:03d}"
            sig = bandpass_noise(rng, fs=fs, dur_s=dur_s, band=band)
            save_wav_pcm16(audio_dir / f"{rid}.wav", sig, fs)
            rows.append([rid, f"audio/{rid}.wav", label, "m" if i % 2 else "f", "other"])
    manifest = root / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "path", "label", "gender", "nationality"])
        writer.writerows(rows)
    return manifest


def toy_feature_dataset(num_per_class=20, frames=30, dim=8, shift=2.0, seed=0):
    """Separable feature-space dataset: dict of FeatureMatrix plus labels."""
    rng = np.random.default_rng(seed)
    features, labels = {}, {}
    for i in range(num_per_class):
        for label, offset in (("pos", shift), ("neg", -shift)):
            rid = f"{label}{i:03d}"
            data = rng.normal(size=(frames, dim))
            data[:, 0] += offset
            features[rid] = FeatureMatrix(data=data, recording_id=rid)
            labels[rid] = 1 if label == "pos" else 0
    return features, labels


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """12 + 12 half-second recordings with a manifest, for CLI tests."""
    root = tmp_path_factory.mktemp("corpus")
    manifest = write_synthetic_corpus(root, num_per_class=12, seed=7, dur_s=0.5)
    return manifest
