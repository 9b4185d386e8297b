"""Shared numeric kernels for both front-ends.

Teager energy, frame-wise averaging, log compression, orthonormal DCT-II,
cepstral mean normalization, and regression delta features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

# TEO output can dip below zero on broadband frames; flooring (rather than
# taking magnitudes) keeps silence mapped to a stable constant.
ENERGY_FLOOR = 1e-10


@dataclass(frozen=True)
class TeagerEnergyProfile:
    """Instantaneous energy estimate of one subband signal."""

    values: np.ndarray
    band_index: int = 0


@dataclass(frozen=True)
class FrameGrid:
    """Frame-blocking geometry. num_frames is bound to one signal length."""

    window_ms: float = 25.0
    hop_ms: float = 10.0
    num_frames: int = 0

    def __post_init__(self):
        if self.window_ms <= 0 or self.hop_ms <= 0:
            raise ValueError("window and hop must be positive")
        if self.num_frames < 0:
            raise ValueError("num_frames must be non-negative")

    @staticmethod
    def samples_for(ms: float, sample_rate_hz: int) -> int:
        # round half up so the conversion is deterministic across platforms
        return int(ms * sample_rate_hz / 1000.0 + 0.5)

    def window_samples(self, sample_rate_hz: int) -> int:
        return self.samples_for(self.window_ms, sample_rate_hz)

    def hop_samples(self, sample_rate_hz: int) -> int:
        return self.samples_for(self.hop_ms, sample_rate_hz)

    @classmethod
    def for_signal(
        cls,
        num_samples: int,
        sample_rate_hz: int,
        window_ms: float = 25.0,
        hop_ms: float = 10.0,
    ) -> "FrameGrid":
        window = cls.samples_for(window_ms, sample_rate_hz)
        hop = cls.samples_for(hop_ms, sample_rate_hz)
        if num_samples >= window:
            num_frames = (num_samples - window) // hop + 1
        else:
            num_frames = 0
        return cls(window_ms=window_ms, hop_ms=hop_ms, num_frames=num_frames)


@dataclass(frozen=True)
class FeatureMatrix:
    """Frames-by-coefficients matrix with provenance metadata.

    layout records the (name, width) coefficient blocks, e.g.
    (("static", 40), ("delta", 40), ("delta2", 40)).
    """

    data: np.ndarray
    recording_id: str = ""
    frontend: str = ""
    layout: tuple[tuple[str, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise DataError(f"feature matrix must be 2-D, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DataError(f"feature matrix for {self.recording_id!r} has non-finite entries")
        layout = tuple((str(n), int(w)) for n, w in self.layout)
        if not layout:
            layout = (("static", data.shape[1]),)
        if sum(w for _, w in layout) != data.shape[1]:
            raise DataError(
                f"layout widths {layout} do not sum to {data.shape[1]} columns"
            )
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "layout", layout)

    @property
    def num_frames(self) -> int:
        return self.data.shape[0]

    @property
    def num_coeffs(self) -> int:
        return self.data.shape[1]

    def coefficient_names(self) -> list[str]:
        names = []
        for block, width in self.layout:
            names.extend(f"{block}_{i}" for i in range(width))
        return names


def teo(x, band_index: int = 0) -> TeagerEnergyProfile:
    """Discrete Teager energy: x[n]^2 - x[n-1]*x[n+1] on interior samples.

    Boundary values replicate the nearest interior value, so the output has
    the same length as the input.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 3:
        raise DataError(f"Teager energy needs at least 3 samples, got {x.size}")
    out = np.empty_like(x)
    out[1:-1] = x[1:-1] ** 2 - x[:-2] * x[2:]
    out[0] = out[1]
    out[-1] = out[-2]
    return TeagerEnergyProfile(values=out, band_index=band_index)


def frame_average(
    profile: TeagerEnergyProfile, grid: FrameGrid, sample_rate_hz: int
) -> np.ndarray:
    """Mean of the energy profile over each frame of the grid."""
    values = profile.values
    window = grid.window_samples(sample_rate_hz)
    hop = grid.hop_samples(sample_rate_hz)
    if values.size < window:
        raise DataError(
            f"signal too short: {values.size} samples yield zero {grid.window_ms} ms frames"
        )
    num_frames = (values.size - window) // hop + 1
    frames = np.lib.stride_tricks.sliding_window_view(values, window)[::hop][:num_frames]
    return frames.mean(axis=1)


def log_compress(energies) -> np.ndarray:
    """Natural log with a 1e-10 floor absorbing non-positive energies."""
    return np.log(np.maximum(np.asarray(energies, dtype=np.float64), ENERGY_FLOOR))


def dct_ii(v, keep: int | None = None) -> np.ndarray:
    """Orthonormal DCT-II along the last axis, truncated to `keep` coefficients.

    c_k = s_k * sum_n v_n * cos(pi * k * (2n + 1) / (2N)),
    s_0 = sqrt(1/N), s_k = sqrt(2/N) otherwise.
    """
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[-1]
    if n < 1:
        raise ValueError("DCT input must be non-empty")
    if keep is None:
        keep = n
    if not 1 <= keep <= n:
        raise ValueError(f"keep must be in [1, {n}], got {keep}")
    basis = dct_basis(n)[:keep]
    return v @ basis.T


def idct_ii(c, n: int | None = None) -> np.ndarray:
    """Inverse of dct_ii; zero-pads truncated coefficients back to length n."""
    c = np.asarray(c, dtype=np.float64)
    k = c.shape[-1]
    if n is None:
        n = k
    if k > n:
        raise ValueError(f"more coefficients ({k}) than output length ({n})")
    basis = dct_basis(n)[:k]
    return c @ basis


def dct_basis(n: int) -> np.ndarray:
    """Rows are the orthonormal DCT-II basis vectors of length n."""
    k = np.arange(n)[:, None]
    grid = np.pi * k * (2 * np.arange(n)[None, :] + 1) / (2 * n)
    basis = np.cos(grid)
    basis[0] *= np.sqrt(1.0 / n)
    basis[1:] *= np.sqrt(2.0 / n)
    return basis


def cmn(m: FeatureMatrix) -> FeatureMatrix:
    """Subtract each coefficient's temporal mean (cepstral mean normalization)."""
    if m.num_frames < 1:
        raise DataError("cannot normalize an empty feature matrix")
    data = m.data - m.data.mean(axis=0, keepdims=True)
    return FeatureMatrix(
        data=data, recording_id=m.recording_id, frontend=m.frontend, layout=m.layout
    )


def deltas(m: FeatureMatrix, k: int = 2) -> FeatureMatrix:
    """Regression delta features with replicate padding at the edges.

    delta_t = sum_{j=1..k} j * (c_{t+j} - c_{t-j}) / (2 * sum_{j=1..k} j^2)
    """
    if k < 1:
        raise ValueError(f"delta window must be >= 1, got {k}")
    if m.num_frames < 1:
        raise DataError("cannot take deltas of an empty feature matrix")
    t = m.num_frames
    padded = np.pad(m.data, ((k, k), (0, 0)), mode="edge")
    num = np.zeros_like(m.data)
    for j in range(1, k + 1):
        num += j * (padded[k + j : k + j + t] - padded[k - j : k - j + t])
    data = num / (2.0 * sum(j * j for j in range(1, k + 1)))
    return FeatureMatrix(
        data=data, recording_id=m.recording_id, frontend=m.frontend, layout=m.layout
    )
