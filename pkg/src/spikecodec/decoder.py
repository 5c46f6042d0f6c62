"""Reconstruction: spike pattern -> piecewise-linear envelopes -> subband
waveforms (envelope times centre-frequency carrier) -> synthesis sum.

Only the onset/offset spikes carry level information: each one places a
knot (time, theta_n) on its channel's envelope. Between knots the dB
envelope is linearly interpolated; outside the first/last knot it fades
to the energy floor over one frame stride to avoid clicks. Peak-marker
spikes are ignored. The rendered carrier for channel k is a single
cosine at the channel centre frequency whose phase is referenced to the
pattern start, so it stays continuous across knots by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .audio_io import AudioSignal, CodecConfig, SpikePattern
from .encoder import ThresholdSet
from .errors import GeometryError
from .filterbank import CochlearFilterBank, SubbandSignals, synthesize

DEFAULT_EDGE_FADE_US = 15_000.0


@dataclass(frozen=True)
class EnvelopeSet:
    """Per-channel dB envelopes as sorted knot lists.

    ``amp_scale`` converts a frame-energy dB value to a waveform
    amplitude (it folds in the frame length); the per-channel filter
    response is compensated separately at render time.
    """

    knot_times_us: tuple
    knot_values_db: tuple
    num_channels: int
    duration_us: int
    floor_db: float
    edge_fade_us: float
    amp_scale: float = 1.0

    def sample_db(self, channel: int, times_us: np.ndarray) -> np.ndarray:
        """Envelope of one channel evaluated at the given times."""
        kt = self.knot_times_us[channel]
        kv = self.knot_values_db[channel]
        t = np.asarray(times_us, dtype=np.float64)
        if kt.size == 0:
            return np.full(t.shape, self.floor_db)
        out = np.interp(t, kt, kv)
        fade = max(self.edge_fade_us, 1.0)
        left = t < kt[0]
        if np.any(left):
            ramp = kv[0] + (kv[0] - self.floor_db) * (t[left] - kt[0]) / fade
            out[left] = np.maximum(ramp, self.floor_db)
        right = t > kt[-1]
        if np.any(right):
            ramp = kv[-1] - (kv[-1] - self.floor_db) * (t[right] - kt[-1]) / fade
            out[right] = np.maximum(ramp, self.floor_db)
        return out

    def sample_amplitude(self, channel: int, times_us: np.ndarray) -> np.ndarray:
        """Linear-amplitude view: 10^(dB/20) scaled, exact zero at the floor."""
        db = self.sample_db(channel, times_us)
        amp = np.power(10.0, db / 20.0) * self.amp_scale
        amp[db <= self.floor_db + 1e-9] = 0.0
        return amp


def decode_envelopes(
    pattern: SpikePattern,
    thr: ThresholdSet,
    *,
    floor_db: float = -100.0,
    edge_fade_us: float = DEFAULT_EDGE_FADE_US,
) -> EnvelopeSet:
    """Turn onset/offset spikes into per-channel envelope knot lists."""
    if pattern.layout != "onset-offset":
        raise GeometryError(f"cannot decode envelopes from layout {pattern.layout!r}")
    if pattern.thresholds_per_channel != thr.neurons_per_channel:
        raise GeometryError(
            f"geometry mismatch: pattern has {pattern.thresholds_per_channel} "
            f"neurons per channel, threshold set implies {thr.neurons_per_channel}"
        )
    per = thr.neurons_per_channel
    num_levels = thr.num_levels
    ids = pattern.neuron_ids
    times = pattern.times_us
    channels = ids // per
    slots = ids % per

    knot_times = []
    knot_values = []
    for ch in range(pattern.num_channels):
        sel = channels == ch
        slot = slots[sel]
        t = times[sel]
        is_level = slot < 2 * num_levels  # peak markers carry no level
        slot = slot[is_level]
        t = t[is_level]
        level = np.where(slot < num_levels, slot, slot - num_levels)
        value = thr.levels_db[level]
        # events arrive sorted by (time, neuron id); for knots sharing a
        # time stamp keep the last one so interpolation sees unique times
        uniq_t, last_index = np.unique(t[::-1], return_index=True)
        uniq_v = value[::-1][last_index]
        knot_times.append(uniq_t.astype(np.float64))
        knot_values.append(uniq_v)

    return EnvelopeSet(
        knot_times_us=tuple(knot_times),
        knot_values_db=tuple(knot_values),
        num_channels=pattern.num_channels,
        duration_us=pattern.duration_us,
        floor_db=floor_db,
        edge_fade_us=edge_fade_us,
    )


def render_subbands(
    env: EnvelopeSet, bank: CochlearFilterBank, sample_rate_hz: int
) -> SubbandSignals:
    """Amplitude-modulated centre-frequency cosines, one row per channel.

    Each channel's decoded amplitude is divided by the channel's own
    centre response and synthesis gain so that the following synthesis
    sum restores input-referred amplitude.
    """
    if env.num_channels != bank.num_channels:
        raise GeometryError(
            f"channel mismatch: envelopes {env.num_channels}, "
            f"bank {bank.num_channels}"
        )
    num_samples = int(round(env.duration_us * sample_rate_hz / 1_000_000.0))
    t_us = np.arange(num_samples) * (1_000_000.0 / sample_rate_hz)
    n = np.arange(num_samples)
    out = np.zeros((bank.num_channels, num_samples))
    for ch, filt in enumerate(bank.filters):
        amp = env.sample_amplitude(ch, t_us)
        if not np.any(amp):
            continue
        comp = filt.synthesis_gain * filt.centre_response
        if abs(comp) > 1e-12:
            amp = amp / comp
        carrier = np.cos(2.0 * np.pi * filt.centre_hz * n / sample_rate_hz)
        out[ch] = amp * carrier
    return SubbandSignals(data=out, sample_rate_hz=sample_rate_hz)


def decode_audio(
    pattern: SpikePattern,
    thr: ThresholdSet,
    bank: CochlearFilterBank,
    config: CodecConfig,
) -> AudioSignal:
    """Full reconstruction: envelopes, subband rendering, synthesis sum."""
    config.validate()
    if bank.num_channels != pattern.num_channels:
        raise GeometryError(
            f"channel mismatch: pattern {pattern.num_channels}, "
            f"bank {bank.num_channels}"
        )
    env = decode_envelopes(
        pattern,
        thr,
        floor_db=config.energy_floor_db,
        edge_fade_us=config.stride_ms * 1000.0,
    )
    # frame energy of a steady tone of amplitude a is a^2 * l / 2, so the
    # dB-to-amplitude mapping carries a sqrt(2 / l) factor
    env = replace(env, amp_scale=math.sqrt(2.0 / config.window_samples))
    subbands = render_subbands(env, bank, config.sample_rate_hz)
    return synthesize(bank, subbands)
