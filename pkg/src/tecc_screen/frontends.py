"""TECC and MFCC feature extractors, plus feature file I/O.

TECC: Gabor subband signals -> Teager energy -> frame averaging -> log ->
DCT -> CMN -> deltas. MFCC: Hamming-windowed power spectrum -> triangular
Mel filterbank -> log -> DCT -> CMN -> deltas. Both share the frame grid,
so their frame counts always agree on the same input.
"""

from __future__ import annotations

import csv
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cepstral import (
    FeatureMatrix,
    FrameGrid,
    cmn,
    dct_ii,
    deltas,
    frame_average,
    log_compress,
    teo,
)
from .errors import DataError
from .filterbank import FilterbankSpec, design_filterbank, filter_band, hz_to_mel, mel_to_hz
from .signal_io import AudioBuffer, load_audio

FEA_MAGIC = b"FEA1"

TECC_DEFAULTS = dict(num_filters=40, num_ceps=40)
MFCC_DEFAULTS = dict(num_filters=26, num_ceps=13)


@dataclass(frozen=True)
class FrontendConfig:
    kind: str
    num_filters: int
    num_ceps: int
    fmin_hz: float = 10.0
    fmax_hz: float = 8000.0
    window_ms: float = 25.0
    hop_ms: float = 10.0
    add_deltas: bool = True
    apply_cmn: bool = True
    bandwidth_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("tecc", "mfcc"):
            raise ValueError(f"unknown frontend kind {self.kind!r}")
        if self.num_ceps > self.num_filters:
            raise ValueError(
                f"num_ceps ({self.num_ceps}) cannot exceed num_filters ({self.num_filters})"
            )

    @classmethod
    def tecc(cls, **overrides) -> "FrontendConfig":
        return cls(kind="tecc", **{**TECC_DEFAULTS, **overrides})

    @classmethod
    def mfcc(cls, **overrides) -> "FrontendConfig":
        return cls(kind="mfcc", **{**MFCC_DEFAULTS, **overrides})

    @classmethod
    def default(cls, kind: str, **overrides) -> "FrontendConfig":
        if kind == "tecc":
            return cls.tecc(**overrides)
        if kind == "mfcc":
            return cls.mfcc(**overrides)
        raise ValueError(f"unknown frontend kind {kind!r}")

    @property
    def output_dim(self) -> int:
        return self.num_ceps * 3 if self.add_deltas else self.num_ceps


@dataclass(frozen=True)
class TeagerSpectralDensity:
    """Log frame-averaged Teager energies, one row per filter."""

    values: np.ndarray  # (num_filters, num_frames)
    center_freqs_hz: np.ndarray
    hop_s: float

    @property
    def frame_times_s(self) -> np.ndarray:
        return np.arange(self.values.shape[1]) * self.hop_s


@lru_cache(maxsize=8)
def _cached_filterbank(num_filters, fmin_hz, fmax_hz, bandwidth_scale, sample_rate_hz):
    spec = FilterbankSpec(
        num_filters=num_filters,
        fmin_hz=fmin_hz,
        fmax_hz=fmax_hz,
        bandwidth_scale=bandwidth_scale,
    )
    return design_filterbank(spec, sample_rate_hz)


def _frame_grid(buffer: AudioBuffer, cfg: FrontendConfig) -> FrameGrid:
    grid = FrameGrid.for_signal(
        buffer.samples.size, buffer.sample_rate_hz, cfg.window_ms, cfg.hop_ms
    )
    if grid.num_frames == 0:
        raise DataError(
            f"recording {buffer.source_id!r} is shorter than one "
            f"{cfg.window_ms} ms window"
        )
    return grid


def _log_teager_frames(buffer: AudioBuffer, cfg: FrontendConfig):
    """Shared TECC intermediate: (num_filters x num_frames) log energies."""
    fs = buffer.sample_rate_hz
    fb = _cached_filterbank(cfg.num_filters, cfg.fmin_hz, cfg.fmax_hz, cfg.bandwidth_scale, fs)
    grid = _frame_grid(buffer, cfg)
    rows = []
    for i, kernel in enumerate(fb.filters):
        band = filter_band(buffer.samples, kernel)
        profile = teo(band, band_index=i)
        rows.append(log_compress(frame_average(profile, grid, fs)))
    return np.stack(rows), fb.center_freqs_hz, grid


def _finalize(static: np.ndarray, buffer: AudioBuffer, cfg: FrontendConfig) -> FeatureMatrix:
    m = FeatureMatrix(
        data=static,
        recording_id=buffer.source_id,
        frontend=cfg.kind,
        layout=(("static", cfg.num_ceps),),
    )
    if cfg.apply_cmn:
        m = cmn(m)
    if not cfg.add_deltas:
        return m
    d = deltas(m)
    dd = deltas(d)
    return FeatureMatrix(
        data=np.hstack([m.data, d.data, dd.data]),
        recording_id=buffer.source_id,
        frontend=cfg.kind,
        layout=(
            ("static", cfg.num_ceps),
            ("delta", cfg.num_ceps),
            ("delta2", cfg.num_ceps),
        ),
    )


def extract_tecc(buffer: AudioBuffer, cfg: FrontendConfig | None = None) -> FeatureMatrix:
    """Teager energy cepstral coefficients, frames x (3 * num_ceps) by default."""
    cfg = cfg or FrontendConfig.tecc()
    if cfg.kind != "tecc":
        raise ValueError(f"extract_tecc called with a {cfg.kind!r} config")
    log_energies, _, _ = _log_teager_frames(buffer, cfg)
    static = dct_ii(log_energies.T, keep=cfg.num_ceps)
    return _finalize(static, buffer, cfg)


def teager_spectral_density(
    buffer: AudioBuffer, cfg: FrontendConfig | None = None
) -> TeagerSpectralDensity:
    """The TECC intermediate before the DCT, for spectral inspection plots."""
    cfg = cfg or FrontendConfig.tecc()
    if cfg.kind != "tecc":
        raise ValueError(f"teager_spectral_density called with a {cfg.kind!r} config")
    log_energies, centers, grid = _log_teager_frames(buffer, cfg)
    hop_s = grid.hop_samples(buffer.sample_rate_hz) / buffer.sample_rate_hz
    return TeagerSpectralDensity(values=log_energies, center_freqs_hz=centers, hop_s=hop_s)


@lru_cache(maxsize=8)
def _mel_triangle_bank(num_filters, nfft, sample_rate_hz, fmin_hz, fmax_hz):
    """Triangular Mel filterbank over FFT bins (HTK-style bin mapping)."""
    mels = np.linspace(hz_to_mel(fmin_hz), hz_to_mel(fmax_hz), num_filters + 2)
    bins = np.floor((nfft + 1) * mel_to_hz(mels) / sample_rate_hz).astype(int)
    bank = np.zeros((num_filters, nfft // 2 + 1))
    for j in range(num_filters):
        lo, mid, hi = bins[j], bins[j + 1], bins[j + 2]
        for b in range(lo, mid):
            bank[j, b] = (b - lo) / max(mid - lo, 1)
        for b in range(mid, hi):
            bank[j, b] = (hi - b) / max(hi - mid, 1)
    return bank


def extract_mfcc(buffer: AudioBuffer, cfg: FrontendConfig | None = None) -> FeatureMatrix:
    """Mel-frequency cepstral coefficients, frames x 39 by default (c0 kept)."""
    cfg = cfg or FrontendConfig.mfcc()
    if cfg.kind != "mfcc":
        raise ValueError(f"extract_mfcc called with a {cfg.kind!r} config")
    fs = buffer.sample_rate_hz
    grid = _frame_grid(buffer, cfg)
    window = grid.window_samples(fs)
    hop = grid.hop_samples(fs)
    frames = np.lib.stride_tricks.sliding_window_view(buffer.samples, window)[::hop]
    frames = frames[: grid.num_frames] * np.hamming(window)
    nfft = 1
    while nfft < window:
        nfft *= 2
    power = np.abs(np.fft.rfft(frames, n=nfft, axis=1)) ** 2
    bank = _mel_triangle_bank(cfg.num_filters, nfft, fs, cfg.fmin_hz, cfg.fmax_hz)
    log_energies = log_compress(power @ bank.T)
    static = dct_ii(log_energies, keep=cfg.num_ceps)
    return _finalize(static, buffer, cfg)


def extract(buffer: AudioBuffer, cfg: FrontendConfig) -> FeatureMatrix:
    return extract_tecc(buffer, cfg) if cfg.kind == "tecc" else extract_mfcc(buffer, cfg)


def _extract_task(task):
    recording_id, path, cfg = task
    buffer = load_audio(path)
    return extract(replace_source(buffer, recording_id), cfg)


def replace_source(buffer: AudioBuffer, recording_id: str) -> AudioBuffer:
    if buffer.source_id == recording_id:
        return buffer
    return AudioBuffer(
        samples=buffer.samples, sample_rate_hz=buffer.sample_rate_hz, source_id=recording_id
    )


def extract_batch(tasks, cfg: FrontendConfig, jobs: int = 1) -> list[FeatureMatrix]:
    """Extract features for (recording_id, audio_path) pairs.

    Results come back in input order regardless of worker completion order.
    """
    items = [(rid, str(path), cfg) for rid, path in tasks]
    if jobs <= 1 or len(items) <= 1:
        return [_extract_task(t) for t in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_extract_task, items, chunksize=max(1, len(items) // (4 * jobs))))


def save_features(m: FeatureMatrix, path) -> None:
    """Write the FEA1 binary format: magic, u32 rows, u32 cols, u8 name
    length + UTF-8 frontend name, float32 row-major data, little-endian."""
    name = m.frontend.encode("utf-8")
    if len(name) > 255:
        raise DataError(f"frontend name too long for FEA1: {m.frontend!r}")
    with open(path, "wb") as fh:
        fh.write(FEA_MAGIC)
        fh.write(struct.pack("<IIB", m.num_frames, m.num_coeffs, len(name)))
        fh.write(name)
        fh.write(m.data.astype("<f4").tobytes(order="C"))


def load_features(path, recording_id: str | None = None) -> FeatureMatrix:
    path = str(path)
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read feature file {path}: {exc}") from exc
    if blob[:4] != FEA_MAGIC or len(blob) < 13:
        raise DataError(f"{path}: not a FEA1 feature file")
    rows, cols, name_len = struct.unpack_from("<IIB", blob, 4)
    name = blob[13 : 13 + name_len].decode("utf-8")
    data_bytes = blob[13 + name_len :]
    expected = rows * cols * 4
    if len(data_bytes) < expected:
        raise DataError(f"{path}: truncated FEA1 payload")
    data = np.frombuffer(data_bytes[:expected], dtype="<f4").reshape(rows, cols)
    if recording_id is None:
        from pathlib import Path

        recording_id = Path(path).stem
    return FeatureMatrix(
        data=data.astype(np.float64), recording_id=recording_id, frontend=name
    )


def save_features_csv(m: FeatureMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(m.coefficient_names())
        for row in m.data:
            writer.writerow([f"{v:.9g}" for v in row])


def save_spectral_density_csv(density: TeagerSpectralDensity, path) -> None:
    """First column is frame start time (s); one column per filter."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s"] + [f"{f:.3f}" for f in density.center_freqs_hz])
        for t, col in zip(density.frame_times_s, density.values.T):
            writer.writerow([f"{t:.3f}"] + [f"{v:.9g}" for v in col])
