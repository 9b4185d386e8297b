"""Mel-spaced Gabor filterbank: design and application.

Each filter is a Gaussian-windowed cosine (real Gabor kernel). Center
frequencies are placed at equal Mel spacing between fmin and fmax,
inclusive, which gives narrow filters at low frequencies and wide ones
at high frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DataError
from .signal_io import AudioBuffer

# Kernels are truncated at +/- 3 sigma; hard cap keeps the lowest filters
# from becoming impractically long at high sample rates.
KERNEL_SUPPORT_SIGMAS = 3.0
MAX_KERNEL_TAPS = 16384


def hz_to_mel(f):
    """HTK-style Mel map: 2595 * log10(1 + f/700). Accepts scalars or arrays."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be non-negative")
    out = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(m):
    """Exact inverse of hz_to_mel: 700 * (10**(m/2595) - 1)."""
    m = np.asarray(m, dtype=np.float64)
    if np.any(m < 0):
        raise ValueError("mel value must be non-negative")
    out = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FilterbankSpec:
    num_filters: int = 40
    fmin_hz: float = 10.0
    fmax_hz: float = 8000.0
    bandwidth_scale: float = 1.0

    def __post_init__(self):
        if self.num_filters < 1:
            raise ValueError(f"need at least 1 filter, got {self.num_filters}")
        if not 0 < self.fmin_hz < self.fmax_hz:
            raise ValueError(f"need 0 < fmin < fmax, got {self.fmin_hz}, {self.fmax_hz}")
        if self.bandwidth_scale <= 0:
            raise ValueError("bandwidth_scale must be positive")


@dataclass(frozen=True)
class GaborFilterbank:
    filters: tuple[np.ndarray, ...]
    center_freqs_hz: np.ndarray
    sigmas_samples: np.ndarray
    sample_rate_hz: int

    @property
    def num_filters(self) -> int:
        return len(self.filters)


@dataclass(frozen=True)
class SubbandSignals:
    bands: np.ndarray  # (num_filters, num_samples)
    center_freqs_hz: np.ndarray

    @property
    def num_bands(self) -> int:
        return self.bands.shape[0]


def _gabor_kernel(center_hz: float, sigma_samples: float, sample_rate_hz: int) -> np.ndarray:
    half = int(np.ceil(KERNEL_SUPPORT_SIGMAS * sigma_samples))
    half = min(half, (MAX_KERNEL_TAPS - 1) // 2)
    n = np.arange(-half, half + 1, dtype=np.float64)
    kernel = np.exp(-(n**2) / (2.0 * sigma_samples**2)) * np.cos(
        2.0 * np.pi * center_hz * n / sample_rate_hz
    )
    # Normalize so the magnitude response at the center frequency is 1.
    response = np.abs(np.sum(kernel * np.exp(-2j * np.pi * center_hz * n / sample_rate_hz)))
    return kernel / response


def design_filterbank(spec: FilterbankSpec, sample_rate_hz: int) -> GaborFilterbank:
    """Build the Gabor filterbank for a given sample rate.

    The frequency-domain sigma of filter i is bandwidth_scale times the Hz
    distance to its nearest neighboring center (the Hz image of the uniform
    Mel gap at that position); the time-domain sigma is fs / (2*pi*sigma_f).
    """
    if spec.fmax_hz > sample_rate_hz / 2:
        raise DataError(
            f"fmax {spec.fmax_hz} Hz above Nyquist for fs = {sample_rate_hz} Hz"
        )
    mels = np.linspace(hz_to_mel(spec.fmin_hz), hz_to_mel(spec.fmax_hz), spec.num_filters)
    centers = mel_to_hz(mels)

    if spec.num_filters == 1:
        gaps = np.array([centers[0]])  # lone filter: bandwidth ~ its own center
    else:
        diffs = np.diff(centers)
        lower = np.concatenate(([np.inf], diffs))
        upper = np.concatenate((diffs, [np.inf]))
        gaps = np.minimum(lower, upper)
    sigma_freq = spec.bandwidth_scale * gaps
    sigma_samples = sample_rate_hz / (2.0 * np.pi * sigma_freq)

    kernels = tuple(
        _gabor_kernel(fc, sig, sample_rate_hz) for fc, sig in zip(centers, sigma_samples)
    )
    return GaborFilterbank(
        filters=kernels,
        center_freqs_hz=centers,
        sigmas_samples=sigma_samples,
        sample_rate_hz=int(sample_rate_hz),
    )


def apply_filterbank(buffer: AudioBuffer, fb: GaborFilterbank) -> SubbandSignals:
    """Filter the signal through every band (zero-padded, center-aligned)."""
    if fb.sample_rate_hz != buffer.sample_rate_hz:
        raise DataError(
            f"filterbank designed for {fb.sample_rate_hz} Hz but signal is "
            f"{buffer.sample_rate_hz} Hz"
        )
    bands = np.stack([filter_band(buffer.samples, k) for k in fb.filters])
    return SubbandSignals(bands=bands, center_freqs_hz=fb.center_freqs_hz)


def filter_band(samples: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same-length convolution with one kernel, output aligned to its center.

    Kernels are odd-length and symmetric, so "same" alignment is zero-phase.
    """
    return fftconvolve(samples, kernel, mode="same")


def save_filterbank_csv(fb: GaborFilterbank, path) -> None:
    """Export the bank description as index,center_hz,sigma_samples,kernel_len."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,center_hz,sigma_samples,kernel_len\n")
        for i, kernel in enumerate(fb.filters):
            fh.write(
                f"{i},{fb.center_freqs_hz[i]:.6f},{fb.sigmas_samples[i]:.6f},{kernel.size}\n"
            )
