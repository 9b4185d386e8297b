"""Mel maps and Gabor filterbank design/application."""

import numpy as np
import pytest

from tecc_screen.errors import DataError
from tecc_screen.filterbank import (
    FilterbankSpec,
    apply_filterbank,
    design_filterbank,
    hz_to_mel,
    mel_to_hz,
    save_filterbank_csv,
)
from tecc_screen.signal_io import AudioBuffer


class TestMelMaps:
    def test_zero(self):
        assert hz_to_mel(0.0) == 0.0
        assert mel_to_hz(0.0) == 0.0

    def test_known_values(self):
        # frozen from independent evaluation of 2595*log10(1 + f/700)
        assert hz_to_mel(700.0) == pytest.approx(781.17283874803120, abs=1e-3)
        assert hz_to_mel(1000.0) == pytest.approx(999.98553713962437, abs=1e-2)
        assert mel_to_hz(999.99) == pytest.approx(1000.0067319581516, abs=0.1)

    def test_inverse_identity(self):
        assert mel_to_hz(hz_to_mel(4321.0)) == pytest.approx(4321.0, abs=1e-6)

    def test_inverse_identity_over_range(self):
        f = np.linspace(0.0, 20000.0, 2001)
        back = mel_to_hz(hz_to_mel(f))
        np.testing.assert_allclose(back, f, rtol=1e-6, atol=1e-9)

    def test_strictly_increasing(self):
        f = np.linspace(0.0, 20000.0, 5000)
        assert np.all(np.diff(hz_to_mel(f)) > 0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            hz_to_mel(-1.0)
        with pytest.raises(ValueError):
            mel_to_hz(-0.5)


class TestDesignFilterbank:
    def test_two_filters_hit_endpoints(self):
        fb = design_filterbank(FilterbankSpec(num_filters=2), 44100)
        np.testing.assert_allclose(fb.center_freqs_hz, [10.0, 8000.0], rtol=1e-9)

    def test_default_bank_equal_mel_spacing(self):
        fb = design_filterbank(FilterbankSpec(num_filters=40), 44100)
        assert fb.num_filters == 40
        assert np.all(np.diff(fb.center_freqs_hz) > 0)
        mels = hz_to_mel(fb.center_freqs_hz)
        gaps = np.diff(mels)
        np.testing.assert_allclose(gaps, gaps[0], atol=1e-6)

    def test_three_filter_midpoint(self):
        fmin = 100.0
        fmax = mel_to_hz(hz_to_mel(100.0) + 200.0)
        fb = design_filterbank(FilterbankSpec(num_filters=3, fmin_hz=fmin, fmax_hz=fmax), 16000)
        assert hz_to_mel(fb.center_freqs_hz[1]) == pytest.approx(hz_to_mel(100.0) + 100.0, abs=1e-9)

    def test_kernels_odd_and_symmetric(self):
        fb = design_filterbank(FilterbankSpec(num_filters=40), 16000)
        for kernel in fb.filters:
            assert kernel.size % 2 == 1
            np.testing.assert_array_equal(kernel, kernel[::-1])

    def test_unit_response_at_center(self):
        fb = design_filterbank(FilterbankSpec(num_filters=40), 16000)
        for kernel, fc in zip(fb.filters, fb.center_freqs_hz):
            n = np.arange(kernel.size) - kernel.size // 2
            response = abs(np.sum(kernel * np.exp(-2j * np.pi * fc * n / 16000)))
            assert response == pytest.approx(1.0, abs=1e-3)

    def test_monotone_bandwidth(self):
        """-3 dB widths never shrink as the center frequency rises.

        Measured on each filter's analytic (single-sideband) counterpart:
        near DC the real cosine kernel merges with its negative-frequency
        image, which distorts a raw width measurement without reflecting
        the designed passband.
        """
        fs = 16000
        fb = design_filterbank(FilterbankSpec(num_filters=40), fs)
        nfft = 1 << 17
        resolution = fs / nfft
        widths = []
        for fc, sigma in zip(fb.center_freqs_hz, fb.sigmas_samples):
            half = int(np.ceil(3 * sigma))
            n = np.arange(-half, half + 1)
            kernel = np.exp(-(n**2) / (2 * sigma**2)) * np.exp(2j * np.pi * fc * n / fs)
            mag = np.abs(np.fft.fft(kernel, nfft))
            widths.append(np.count_nonzero(mag >= mag.max() / np.sqrt(2)) * resolution)
        widths = np.array(widths)
        assert np.all(np.diff(widths) >= -1.5 * resolution)

    def test_fmax_above_nyquist_rejected(self):
        with pytest.raises(DataError, match="Nyquist"):
            design_filterbank(FilterbankSpec(num_filters=4, fmax_hz=9000.0), 16000)

    def test_bad_spec_rejected(self):
        with pytest.raises(ValueError):
            FilterbankSpec(num_filters=0)
        with pytest.raises(ValueError):
            FilterbankSpec(num_filters=4, fmin_hz=100.0, fmax_hz=50.0)

    def test_csv_export(self, tmp_path):
        fb = design_filterbank(FilterbankSpec(num_filters=4), 16000)
        p = tmp_path / "fb.csv"
        save_filterbank_csv(fb, p)
        lines = p.read_text().splitlines()
        assert lines[0] == "index,center_hz,sigma_samples,kernel_len"
        assert len(lines) == 5
        assert lines[1].startswith("0,10.000000,")


class TestApplyFilterbank:
    def test_zero_signal(self):
        fb = design_filterbank(FilterbankSpec(num_filters=8), 16000)
        buf = AudioBuffer(samples=np.zeros(4000), sample_rate_hz=16000)
        out = apply_filterbank(buf, fb)
        assert out.bands.shape == (8, 4000)
        np.testing.assert_allclose(out.bands, 0.0, atol=1e-12)

    def test_tone_lands_in_matching_band(self):
        """Per-band RMS argmax oracle for a tone at a mid-bank center."""
        fs = 16000
        fb = design_filterbank(FilterbankSpec(num_filters=12), fs)
        j = 6
        t = np.arange(fs) / fs
        tone = 0.5 * np.sin(2 * np.pi * fb.center_freqs_hz[j] * t)
        buf = AudioBuffer(samples=tone, sample_rate_hz=fs)
        out = apply_filterbank(buf, fb)
        rms = np.sqrt((out.bands**2).mean(axis=1))
        assert int(np.argmax(rms)) == j

    def test_impulse_recovers_kernel(self):
        """Convolution identity: symmetric kernels reproduce themselves."""
        fs = 16000
        fb = design_filterbank(FilterbankSpec(num_filters=6, fmin_hz=200.0), fs)
        n = 2001
        x = np.zeros(n)
        x[n // 2] = 1.0
        buf = AudioBuffer(samples=x, sample_rate_hz=fs)
        out = apply_filterbank(buf, fb)
        for i, kernel in enumerate(fb.filters):
            assert kernel.size < n
            half = kernel.size // 2
            segment = out.bands[i, n // 2 - half : n // 2 + half + 1]
            np.testing.assert_allclose(segment, kernel, atol=1e-12)
            outside = np.concatenate(
                [out.bands[i, : n // 2 - half], out.bands[i, n // 2 + half + 1 :]]
            )
            np.testing.assert_allclose(outside, 0.0, atol=1e-12)

    def test_linearity(self):
        fs = 16000
        rng = np.random.default_rng(2)
        fb = design_filterbank(FilterbankSpec(num_filters=5), fs)
        x = rng.uniform(-0.4, 0.4, 3000)
        y = rng.uniform(-0.4, 0.4, 3000)
        a, b = 0.3, -0.7
        mixed = apply_filterbank(
            AudioBuffer(samples=a * x + b * y, sample_rate_hz=fs), fb
        ).bands
        separate = a * apply_filterbank(AudioBuffer(samples=x, sample_rate_hz=fs), fb).bands
        separate += b * apply_filterbank(AudioBuffer(samples=y, sample_rate_hz=fs), fb).bands
        scale = np.abs(separate).max()
        np.testing.assert_allclose(mixed, separate, atol=1e-9 * scale)

    def test_sample_rate_mismatch(self):
        fb = design_filterbank(FilterbankSpec(num_filters=4), 16000)
        buf = AudioBuffer(samples=np.zeros(1000), sample_rate_hz=22050)
        with pytest.raises(DataError, match="designed for"):
            apply_filterbank(buf, fb)
