"""Frame subband waveforms into log-energy spectrograms (hair-cell stage)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .audio_io import CodecConfig
from .filterbank import SubbandSignals


@dataclass(frozen=True)
class Spectrogram:
    """K x N matrix of frame energies in dB plus frame timing."""

    energies_db: np.ndarray
    window_ms: float
    stride_ms: float
    frame_centers_us: np.ndarray
    energy_floor_db: float
    sample_rate_hz: int

    def __post_init__(self):
        energies = np.ascontiguousarray(self.energies_db, dtype=np.float64)
        centers = np.ascontiguousarray(self.frame_centers_us, dtype=np.int64)
        if energies.ndim != 2:
            raise ValueError("energies_db must be 2-D (channels x frames)")
        if centers.shape != (energies.shape[1],):
            raise ValueError("frame_centers_us must have one entry per frame")
        energies.setflags(write=False)
        centers.setflags(write=False)
        object.__setattr__(self, "energies_db", energies)
        object.__setattr__(self, "frame_centers_us", centers)

    @property
    def num_channels(self) -> int:
        return self.energies_db.shape[0]

    @property
    def num_frames(self) -> int:
        return self.energies_db.shape[1]


def frame_count(num_samples: int, window_samples: int, stride_samples: int) -> int:
    """Number of full frames; a too-short signal yields one padded frame."""
    if num_samples < window_samples:
        return 1
    return (num_samples - window_samples) // stride_samples + 1


def frame_energy(subbands: SubbandSignals, config: CodecConfig) -> Spectrogram:
    """Per-channel framed energy: 10*log10(sum of squares), floored.

    Frames start at sample 0 and advance by the stride; only full frames
    are emitted. If the signal is shorter than one window, a single
    zero-padded frame is produced and a warning is issued.
    """
    config.validate()
    window = config.window_samples
    stride = config.stride_samples
    data = subbands.data
    num_samples = data.shape[1]

    if num_samples < window:
        warnings.warn(
            "signal shorter than one analysis window; emitting a single "
            "zero-padded frame",
            stacklevel=2,
        )
        padded = np.zeros((data.shape[0], window))
        padded[:, :num_samples] = data
        energy = np.sum(padded * padded, axis=1, keepdims=True)
    else:
        windows = sliding_window_view(data, window, axis=1)[:, ::stride, :]
        energy = np.sum(windows * windows, axis=2)

    with np.errstate(divide="ignore"):
        energies_db = 10.0 * np.log10(energy)
    energies_db = np.maximum(energies_db, config.energy_floor_db)

    n = energies_db.shape[1]
    centers_us = np.round(
        (np.arange(n) * stride + window / 2.0) * 1_000_000.0 / config.sample_rate_hz
    ).astype(np.int64)
    return Spectrogram(
        energies_db=energies_db,
        window_ms=config.window_ms,
        stride_ms=config.stride_ms,
        frame_centers_us=centers_us,
        energy_floor_db=config.energy_floor_db,
        sample_rate_hz=config.sample_rate_hz,
    )
