"""Spike encoding: population threshold code (onset/offset/peak neurons),
a latency code for comparison, and masker application.

Threshold code: each channel's energy curve is the piecewise-linear
interpolation through its frame centers. Neuron n of a channel watches
level theta_n; it fires an onset spike at the (interpolated, microsecond)
time the curve rises above theta_n and an offset spike when the curve
returns to or below it. A per-channel peak-marker neuron fires at every
local maximum above theta_1. Neuron ids pack per channel as
[onset 0..L-1, offset L..2L-1, peak 2L].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import CodecConfig, SpikePattern, sort_events
from .errors import GeometryError
from .masking import MaskMap
from .spectral import Spectrogram


@dataclass(frozen=True)
class ThresholdSet:
    """Uniformly spaced threshold levels shared by every channel."""

    levels_db: np.ndarray

    def __post_init__(self):
        levels = np.ascontiguousarray(self.levels_db, dtype=np.float64)
        if levels.ndim != 1 or levels.size < 1:
            raise ValueError("levels_db must be a non-empty vector")
        if levels.size > 1 and not np.all(np.diff(levels) > 0):
            raise ValueError("threshold levels must be strictly increasing")
        levels.setflags(write=False)
        object.__setattr__(self, "levels_db", levels)

    @classmethod
    def from_config(cls, config: CodecConfig) -> "ThresholdSet":
        config.validate()
        return cls(
            levels_db=np.linspace(
                config.threshold_lo_db,
                config.threshold_hi_db,
                config.levels_per_channel,
            )
        )

    @property
    def num_levels(self) -> int:
        return self.levels_db.size

    @property
    def spacing_db(self) -> float:
        if self.num_levels < 2:
            return 0.0
        return float(self.levels_db[1] - self.levels_db[0])

    @property
    def neurons_per_channel(self) -> int:
        return 2 * self.num_levels + 1

    def onset_id(self, channel: int, level: int) -> int:
        return channel * self.neurons_per_channel + level

    def offset_id(self, channel: int, level: int) -> int:
        return channel * self.neurons_per_channel + self.num_levels + level

    def peak_id(self, channel: int) -> int:
        return channel * self.neurons_per_channel + 2 * self.num_levels


def _channel_crossings(values, centers_us, levels):
    """Interpolated crossing times for one channel's energy curve.

    Returns (level_idx, times_us, rising) arrays. A crossing of level
    theta is the edge of the boolean state "curve > theta": rising edges
    are onsets, falling edges offsets, so onset/offset counts per level
    never differ by more than one.
    """
    above = values[None, :] > levels[:, None]  # (L, N)
    if values.size < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0, dtype=bool)
    rising = ~above[:, :-1] & above[:, 1:]
    falling = above[:, :-1] & ~above[:, 1:]

    level_idx, seg_idx = np.nonzero(rising | falling)
    if level_idx.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0, dtype=bool)
    a = values[seg_idx]
    b = values[seg_idx + 1]
    theta = levels[level_idx]
    t0 = centers_us[seg_idx].astype(np.float64)
    t1 = centers_us[seg_idx + 1].astype(np.float64)
    times = t0 + (theta - a) / (b - a) * (t1 - t0)
    return level_idx, np.round(times).astype(np.int64), rising[level_idx, seg_idx]


def _channel_peaks(values, centers_us, theta_min):
    """Frame centers of local-maximum runs strictly above theta_min.

    A run of equal values is a local maximum when both neighbors (missing
    neighbors count as -inf) are lower; the run's first frame fires.
    """
    n = values.size
    if n == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.flatnonzero(np.r_[True, values[1:] != values[:-1]])
    run_values = values[starts]
    left = np.r_[-np.inf, run_values[:-1]]
    right = np.r_[run_values[1:], -np.inf]
    is_peak = (run_values > left) & (run_values > right) & (run_values > theta_min)
    return centers_us[starts[is_peak]]


def threshold_encode(
    spec: Spectrogram, thr: ThresholdSet, config: CodecConfig
) -> SpikePattern:
    """Encode a spectrogram with the onset/offset/peak population code."""
    config.validate()
    if spec.num_channels != config.num_channels:
        raise GeometryError(
            f"channel mismatch: spectrogram {spec.num_channels}, "
            f"config {config.num_channels}"
        )
    if thr.num_levels != config.levels_per_channel:
        raise GeometryError(
            f"threshold count mismatch: set has {thr.num_levels}, "
            f"config expects {config.levels_per_channel}"
        )
    levels = thr.levels_db
    centers = spec.frame_centers_us
    duration_us = _spectrogram_duration_us(spec)

    neuron_chunks = []
    time_chunks = []
    for ch in range(spec.num_channels):
        values = spec.energies_db[ch]
        level_idx, times, rising = _channel_crossings(values, centers, levels)
        if level_idx.size:
            base = ch * thr.neurons_per_channel
            ids = base + np.where(rising, level_idx, thr.num_levels + level_idx)
            neuron_chunks.append(ids)
            time_chunks.append(times)
        peak_times = _channel_peaks(values, centers, levels[0])
        if peak_times.size:
            neuron_chunks.append(
                np.full(peak_times.size, thr.peak_id(ch), dtype=np.int64)
            )
            time_chunks.append(peak_times)

    if neuron_chunks:
        events = sort_events(
            np.concatenate(neuron_chunks), np.concatenate(time_chunks)
        )
    else:
        events = np.empty((0, 2), dtype=np.int64)
    return SpikePattern(
        num_neurons=spec.num_channels * thr.neurons_per_channel,
        duration_us=duration_us,
        events=events,
        num_channels=spec.num_channels,
        thresholds_per_channel=thr.neurons_per_channel,
        sample_rate_hz=config.sample_rate_hz,
        layout="onset-offset",
    )


def latency_spike_time_us(e: float, n: int, window_ms: float) -> int:
    """Latency code formula: spike for window n at (n - e) * T."""
    return int(round((n - e) * window_ms * 1000.0))


def latency_encode(spec: Spectrogram, window_ms: float) -> SpikePattern:
    """Single-neuron-per-channel latency code, one spike per frame window.

    Frame energies are min-max normalized over the whole utterance to
    e in [0, 1]; window n (1-based) of a channel spikes at (n - e) * T.
    """
    s = spec.energies_db
    k, n_frames = s.shape
    smin, smax = float(s.min()), float(s.max())
    if smax > smin:
        e = (s - smin) / (smax - smin)
    else:
        e = np.zeros_like(s)
    n_index = np.arange(1, n_frames + 1)[None, :]
    times = np.round((n_index - e) * window_ms * 1000.0).astype(np.int64)
    neurons = np.repeat(np.arange(k, dtype=np.int64)[:, None], n_frames, axis=1)
    events = sort_events(neurons.ravel(), times.ravel())
    return SpikePattern(
        num_neurons=k,
        duration_us=int(np.ceil(n_frames * window_ms * 1000.0)),
        events=events,
        num_channels=k,
        thresholds_per_channel=1,
        sample_rate_hz=spec.sample_rate_hz,
        layout="latency",
    )


def spike_bins(pattern: SpikePattern, spec: Spectrogram) -> np.ndarray:
    """(channel, frame) bin of every event; frames by nearest frame center."""
    if pattern.num_channels != spec.num_channels:
        raise GeometryError(
            f"channel mismatch: pattern {pattern.num_channels}, "
            f"spectrogram {spec.num_channels}"
        )
    channels = pattern.neuron_ids // pattern.thresholds_per_channel
    stride_us = spec.stride_ms * 1000.0
    rel = (pattern.times_us - spec.frame_centers_us[0]) / stride_us
    frames = np.clip(np.round(rel).astype(np.int64), 0, spec.num_frames - 1)
    return np.column_stack((channels, frames))


def apply_mask(
    pattern: SpikePattern, mask: MaskMap, spec: Spectrogram
) -> SpikePattern:
    """Drop every spike whose (channel, frame) bin is masked off."""
    if mask.shape != (spec.num_channels, spec.num_frames):
        raise GeometryError(
            f"mask shape {mask.shape} does not match spectrogram "
            f"{(spec.num_channels, spec.num_frames)}"
        )
    if pattern.num_events == 0:
        return pattern
    bins = spike_bins(pattern, spec)
    kept = mask.keep[bins[:, 0], bins[:, 1]].astype(bool)
    return pattern.with_events(pattern.events[kept])


def random_mask(pattern: SpikePattern, drop_rate: float, seed: int) -> SpikePattern:
    """Drop each spike independently with probability drop_rate."""
    if not (0.0 <= drop_rate <= 1.0):
        raise ValueError("drop_rate must be within [0, 1]")
    if pattern.num_events == 0:
        return pattern
    rng = np.random.default_rng(seed)
    dropped = rng.random(pattern.num_events) < drop_rate
    return pattern.with_events(pattern.events[~dropped])


def _spectrogram_duration_us(spec: Spectrogram) -> int:
    window_us = spec.window_ms * 1000.0
    n = spec.num_frames
    if n == 0:
        return 0
    return int(max(spec.frame_centers_us[-1] + window_us / 2.0, 0))
