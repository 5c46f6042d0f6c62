"""Constant-Q cochlear filter bank: kernel construction, time-domain
analysis, and gain-compensated synthesis.

Each channel is a Hann-windowed cosine wavelet at the channel centre
frequency, mean-subtracted (exact DC rejection) and unit-energy
normalized. Analysis slides the wavelet sample by sample over the input
(zero-padded at the tail), so the subband matrix has one column per
input sample. Synthesis is a per-channel scalar gain applied to the
subband rows and summed; the gains are calibrated so that a pure tone at
any channel centre survives analysis + synthesis at unit amplitude.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .audio_io import AudioSignal, CodecConfig
from .errors import ConfigError, GeometryError

# Default 20-channel bank covering 200-8000 Hz: (centre_hz, bandwidth_hz)
# per channel. Channels 1-19 follow a constant-Q quarter-octave layout
# (Q ~ 2.87); channel 20 intentionally breaks the pattern and is kept
# verbatim, not "corrected".
DEFAULT_CHANNELS_HZ: tuple[tuple[float, float], ...] = (
    (200.2, 69.3),
    (238.3, 83.0),
    (283.2, 98.6),
    (336.4, 117.2),
    (400.4, 139.6),
    (476.1, 166.0),
    (565.9, 197.3),
    (672.3, 234.4),
    (800.8, 278.3),
    (952.1, 331.1),
    (1131.3, 394.5),
    (1345.2, 468.8),
    (1600.6, 557.6),
    (1903.3, 663.1),
    (2263.7, 788.1),
    (2690.9, 937.5),
    (3200.2, 1114.3),
    (3805.7, 1325.2),
    (4525.9, 1576.2),
    (8000.5, 6949.2),
)

MAX_KERNEL_SAMPLES = 4096
CYCLES_PER_Q = 4.0  # effective wavelet support, in units of Q cycles


@dataclass(frozen=True)
class CochlearFilter:
    """One bank channel: wavelet kernel plus calibration constants.

    ``synthesis_gain`` scales this channel in the synthesis sum;
    ``centre_response`` is the channel's amplitude response to a unit
    cosine at its own centre frequency (used by the decoder to map
    decoded subband amplitudes back to input amplitudes).
    """

    index: int
    centre_hz: float
    bandwidth_hz: float
    kernel: np.ndarray
    synthesis_gain: float
    centre_response: float

    def __post_init__(self):
        kernel = np.ascontiguousarray(self.kernel, dtype=np.float64)
        kernel.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)

    @property
    def kernel_len(self) -> int:
        return self.kernel.size

    @property
    def q_factor(self) -> float:
        return self.centre_hz / self.bandwidth_hz


@dataclass(frozen=True)
class CochlearFilterBank:
    filters: tuple[CochlearFilter, ...]
    sample_rate_hz: int

    @property
    def num_channels(self) -> int:
        return len(self.filters)

    @property
    def centre_hz(self) -> np.ndarray:
        return np.array([f.centre_hz for f in self.filters])

    @property
    def bandwidth_hz(self) -> np.ndarray:
        return np.array([f.bandwidth_hz for f in self.filters])

    @property
    def synthesis_gains(self) -> np.ndarray:
        return np.array([f.synthesis_gain for f in self.filters])


@dataclass(frozen=True)
class SubbandSignals:
    """K x M matrix of per-channel waveforms, one column per input sample."""

    data: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError("subband data must be 2-D (channels x samples)")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def num_channels(self) -> int:
        return self.data.shape[0]

    @property
    def num_samples(self) -> int:
        return self.data.shape[1]


def _channel_layout(config: CodecConfig) -> list[tuple[float, float]]:
    """Centre/bandwidth pairs for the configured band split."""
    if (
        config.num_channels == len(DEFAULT_CHANNELS_HZ)
        and config.freq_lo_hz == 200.0
        and config.freq_hi_hz == 8000.0
    ):
        return list(DEFAULT_CHANNELS_HZ)
    if config.num_channels == 1:
        centre = float(np.sqrt(config.freq_lo_hz * config.freq_hi_hz))
        return [(centre, config.freq_hi_hz - config.freq_lo_hz)]
    centres = np.geomspace(config.freq_lo_hz, config.freq_hi_hz, config.num_channels)
    ratio = centres[1] / centres[0]
    bandwidths = centres * (ratio - 1.0 / ratio)
    return list(zip(centres.tolist(), bandwidths.tolist()))


def _make_kernel(centre_hz: float, bandwidth_hz: float, fs: int) -> np.ndarray:
    """Hann-windowed cosine, zero-mean, unit L2 norm."""
    q = centre_hz / bandwidth_hz
    n_cycles = CYCLES_PER_Q * q
    length = int(round(n_cycles * fs / centre_hz))
    length = max(8, min(length, MAX_KERNEL_SAMPLES))
    n = np.arange(length)
    kernel = np.hanning(length) * np.cos(2.0 * np.pi * centre_hz * n / fs)
    kernel -= kernel.mean()
    kernel /= np.linalg.norm(kernel)
    return kernel


def _centre_responses(kernels, centres_hz, fs) -> np.ndarray:
    """Complex response of every kernel at every centre frequency.

    response[j, k] is channel j's response to a unit cosine at centre k:
    the analysis output is Re{exp(i w m) * response[j, k]}.
    """
    num = len(kernels)
    resp = np.empty((num, num), dtype=np.complex128)
    for j, kernel in enumerate(kernels):
        n = np.arange(kernel.size)
        for k, f in enumerate(centres_hz):
            resp[j, k] = np.dot(kernel, np.exp(2j * np.pi * f * n / fs))
    return resp


def build_filterbank(config: CodecConfig) -> CochlearFilterBank:
    """Build kernels for the configured band split and calibrate gains.

    Synthesis gains solve a least-squares system so that the gain-weighted
    sum of all channel responses to a centre-frequency tone has unit
    amplitude at every centre.
    """
    config.validate()
    if config.freq_hi_hz > config.sample_rate_hz / 2:
        raise ConfigError("freq_hi_hz above Nyquist")
    layout = _channel_layout(config)
    fs = config.sample_rate_hz
    kernels = [_make_kernel(fc, bw, fs) for fc, bw in layout]
    centres = np.array([fc for fc, _ in layout])

    resp = _centre_responses(kernels, centres, fs)
    # Unit target amplitude and zero target quadrature at every centre.
    a_mat = np.vstack([resp.real.T, resp.imag.T])
    b_vec = np.concatenate([np.ones(len(kernels)), np.zeros(len(kernels))])
    gains, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)

    filters = tuple(
        CochlearFilter(
            index=k + 1,
            centre_hz=layout[k][0],
            bandwidth_hz=layout[k][1],
            kernel=kernels[k],
            synthesis_gain=float(gains[k]),
            centre_response=float(abs(resp[k, k])),
        )
        for k in range(len(kernels))
    )
    return CochlearFilterBank(filters=filters, sample_rate_hz=fs)


def analyze(bank: CochlearFilterBank, signal: AudioSignal) -> SubbandSignals:
    """Slide every kernel over the signal (correlation, zero-padded tail).

    Row k, column m is the dot product of kernel k with the samples
    starting at m, so an impulse at sample 0 reproduces the kernels.
    """
    if signal.sample_rate_hz != bank.sample_rate_hz:
        raise GeometryError(
            f"sample rate mismatch: signal {signal.sample_rate_hz} Hz, "
            f"bank {bank.sample_rate_hz} Hz"
        )
    x = signal.samples
    m = x.size
    out = np.zeros((bank.num_channels, m))
    for k, filt in enumerate(bank.filters):
        kernel = filt.kernel
        full = fftconvolve(x, kernel[::-1], mode="full")
        out[k] = full[kernel.size - 1 : kernel.size - 1 + m]
    return SubbandSignals(data=out, sample_rate_hz=bank.sample_rate_hz)


def synthesize(bank: CochlearFilterBank, subbands: SubbandSignals) -> AudioSignal:
    """Gain-weighted sum of the subband rows."""
    if subbands.num_channels != bank.num_channels:
        raise GeometryError(
            f"channel mismatch: subbands {subbands.num_channels}, "
            f"bank {bank.num_channels}"
        )
    samples = bank.synthesis_gains @ subbands.data
    return AudioSignal(samples=samples, sample_rate_hz=bank.sample_rate_hz)


def filter_table_csv(bank: CochlearFilterBank) -> str:
    """CSV of (index, centre_hz, bandwidth_hz, kernel_len, synthesis_gain)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "centre_hz", "bandwidth_hz", "kernel_len", "synthesis_gain"])
    for f in bank.filters:
        writer.writerow(
            [f.index, f.centre_hz, f.bandwidth_hz, f.kernel_len, repr(f.synthesis_gain)]
        )
    return buf.getvalue()
