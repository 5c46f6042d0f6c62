"""PCM WAV and spike-event file I/O, plus the codec configuration.

The spike file ("SPKE") is a little-endian binary format with a fixed
24-byte header followed by fixed-width 8-byte event records:

    magic                   4 bytes  b"SPKE"
    version                 u16      currently 1
    num_neurons             u16
    num_channels            u16
    thresholds_per_channel  u16      neurons per channel (1 for latency codes)
    sample_rate_hz          u32
    duration_us             u32
    event_count             u32
    events                  event_count * (neuron_id u16, reserved u16 = 0,
                                            time_us u32)

Events are stored sorted by (time_us, neuron_id) with no duplicate
(neuron_id, time_us) pairs; readers reject files violating this rather
than reordering them.
"""

from __future__ import annotations

import json
import struct
import wave
from dataclasses import dataclass, asdict, fields, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, SpikeFileError, WavError

SPIKE_MAGIC = b"SPKE"
SPIKE_VERSION = 1

_HEADER = struct.Struct("<4sHHHHIII")
_EVENT_DTYPE = np.dtype([("neuron", "<u2"), ("reserved", "<u2"), ("time", "<u4")])

HEADER_SIZE = _HEADER.size          # 24
EVENT_SIZE = _EVENT_DTYPE.itemsize  # 8


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AudioSignal:
    """Mono audio as float amplitudes in [-1, 1] plus its sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError("sample_rate_hz must be positive")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    @property
    def duration_us(self) -> int:
        return int(round(self.samples.size * 1_000_000 / self.sample_rate_hz))


@dataclass(frozen=True)
class CodecConfig:
    """Every tunable of the encode/decode pipeline, with defaults.

    The threshold range default was frozen from the 5th/95th percentile of
    above-floor frame energies over the bundled calibration corpus; override
    it per dataset when encoding other material.
    """

    sample_rate_hz: int = 20000
    window_ms: float = 30.0
    stride_ms: float = 15.0
    freq_lo_hz: float = 200.0
    freq_hi_hz: float = 8000.0
    num_channels: int = 20
    thresholds_per_channel: int = 31
    threshold_lo_db: float = 2.0
    threshold_hi_db: float = 38.0
    temporal_decay_c: float = 0.9
    spreading_slope_low_db: float = 27.0
    spreading_slope_high_db: float = 13.0
    spreading_offset_db: float = 14.0
    energy_floor_db: float = -100.0
    rng_seed: int = 0

    def validate(self) -> "CodecConfig":
        if self.sample_rate_hz <= 0:
            raise ConfigError("sample_rate_hz must be positive")
        if self.window_ms <= 0 or self.stride_ms <= 0:
            raise ConfigError("window_ms and stride_ms must be positive")
        if self.window_samples < 1 or self.stride_samples < 1:
            raise ConfigError("window/stride shorter than one sample")
        if not (0 < self.freq_lo_hz < self.freq_hi_hz):
            raise ConfigError("need 0 < freq_lo_hz < freq_hi_hz")
        if self.freq_hi_hz > self.sample_rate_hz / 2:
            raise ConfigError(
                f"freq_hi_hz {self.freq_hi_hz} above Nyquist "
                f"{self.sample_rate_hz / 2}"
            )
        if self.num_channels < 1:
            raise ConfigError("num_channels must be >= 1")
        if self.thresholds_per_channel < 3 or self.thresholds_per_channel % 2 == 0:
            # per-channel layout is L onset + L offset + 1 peak neuron
            raise ConfigError("thresholds_per_channel must be odd and >= 3")
        if not self.threshold_lo_db < self.threshold_hi_db:
            raise ConfigError("threshold_lo_db must be below threshold_hi_db")
        if not (0 < self.temporal_decay_c <= 1):
            raise ConfigError("temporal_decay_c must be in (0, 1]")
        return self

    @property
    def window_samples(self) -> int:
        return int(round(self.window_ms * self.sample_rate_hz / 1000.0))

    @property
    def stride_samples(self) -> int:
        return int(round(self.stride_ms * self.sample_rate_hz / 1000.0))

    @property
    def levels_per_channel(self) -> int:
        return (self.thresholds_per_channel - 1) // 2

    @property
    def num_neurons(self) -> int:
        return self.num_channels * self.thresholds_per_channel

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict) -> "CodecConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values).validate()

    @classmethod
    def from_file(cls, path) -> "CodecConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                values = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"no such config file: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {path}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError(f"config must be a JSON object: {path}")
        return cls.from_dict(values)

    def with_overrides(self, **kwargs) -> "CodecConfig":
        return replace(self, **kwargs).validate()


@dataclass(frozen=True)
class SpikePattern:
    """An ordered set of (neuron_id, time_us) events with neuron geometry.

    ``layout`` is "onset-offset" for threshold codes (per channel: L onset,
    L offset, one peak-marker neuron) or "latency" (one neuron per channel).
    """

    num_neurons: int
    duration_us: int
    events: np.ndarray  # shape (n, 2) int64, columns (neuron_id, time_us)
    num_channels: int
    thresholds_per_channel: int
    sample_rate_hz: int
    layout: str = "onset-offset"

    def __post_init__(self):
        ev = np.ascontiguousarray(self.events, dtype=np.int64)
        if ev.size == 0:
            ev = ev.reshape(0, 2)
        if ev.ndim != 2 or ev.shape[1] != 2:
            raise ValueError("events must have shape (n, 2)")
        if self.num_neurons != self.num_channels * self.thresholds_per_channel:
            raise ValueError(
                "num_neurons must equal num_channels * thresholds_per_channel"
            )
        if self.duration_us < 0:
            raise ValueError("duration_us must be non-negative")
        if ev.shape[0]:
            if ev[:, 0].min() < 0 or ev[:, 0].max() >= self.num_neurons:
                raise ValueError("neuron_id out of range")
            if ev[:, 1].min() < 0 or ev[:, 1].max() > self.duration_us:
                raise ValueError("event time outside [0, duration_us]")
            dt = np.diff(ev[:, 1])
            dn = np.diff(ev[:, 0])
            if np.any(dt < 0) or np.any((dt == 0) & (dn <= 0)):
                raise ValueError(
                    "events must be strictly sorted by (time_us, neuron_id)"
                )
        ev.setflags(write=False)
        object.__setattr__(self, "events", ev)

    @property
    def num_events(self) -> int:
        return self.events.shape[0]

    @property
    def neuron_ids(self) -> np.ndarray:
        return self.events[:, 0]

    @property
    def times_us(self) -> np.ndarray:
        return self.events[:, 1]

    def with_events(self, events: np.ndarray) -> "SpikePattern":
        return replace(self, events=events)


def sort_events(neuron_ids, times_us) -> np.ndarray:
    """Build a (n, 2) event array sorted by (time, neuron), duplicates dropped."""
    neuron_ids = np.asarray(neuron_ids, dtype=np.int64)
    times_us = np.asarray(times_us, dtype=np.int64)
    if neuron_ids.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    order = np.lexsort((neuron_ids, times_us))
    ev = np.column_stack((neuron_ids[order], times_us[order]))
    keep = np.ones(ev.shape[0], dtype=bool)
    keep[1:] = np.any(np.diff(ev, axis=0) != 0, axis=1)
    return ev[keep]


# ---------------------------------------------------------------------------
# WAV I/O
# ---------------------------------------------------------------------------

def read_wav(path) -> AudioSignal:
    """Read a PCM WAV file; stereo is downmixed by averaging.

    Samples are normalized by the integer full scale (e.g. 32768 for
    16-bit), so the maximum positive code maps just below +1. No
    resampling is performed.
    """
    path = Path(path)
    if not path.exists():
        raise WavError(f"no such file: {path}")
    try:
        with wave.open(str(path), "rb") as wav:
            if wav.getcomptype() != "NONE":
                raise WavError(f"non-PCM encoding ({wav.getcomptype()}): {path}")
            nch = wav.getnchannels()
            width = wav.getsampwidth()
            rate = wav.getframerate()
            nframes = wav.getnframes()
            raw = wav.readframes(nframes)
    except (wave.Error, EOFError) as exc:
        raise WavError(f"malformed WAV: {path}: {exc}") from None
    if nframes == 0:
        raise WavError(f"zero-length audio: {path}")
    if len(raw) < nframes * nch * width:
        raise WavError(f"malformed WAV: {path}: truncated sample data")
    if nch not in (1, 2):
        raise WavError(f"unsupported channel count {nch}: {path}")

    if width == 1:
        data = np.frombuffer(raw, dtype=np.uint8).astype(np.float64)
        data = (data - 128.0) / 128.0
    elif width == 2:
        data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3)
        vals = (
            b[:, 0].astype(np.int32)
            | (b[:, 1].astype(np.int32) << 8)
            | (b[:, 2].astype(np.int32) << 16)
        )
        vals = np.where(vals >= 1 << 23, vals - (1 << 24), vals)
        data = vals.astype(np.float64) / float(1 << 23)
    elif width == 4:
        data = np.frombuffer(raw, dtype="<i4").astype(np.float64) / float(1 << 31)
    else:
        raise WavError(f"unsupported sample width {width}: {path}")

    if nch == 2:
        data = data.reshape(-1, 2).mean(axis=1)
    return AudioSignal(samples=data, sample_rate_hz=rate)


def write_wav(path, signal: AudioSignal) -> int:
    """Write 16-bit PCM mono. Returns the count of samples clipped to +-1."""
    samples = signal.samples
    clipped = int(np.count_nonzero(np.abs(samples) > 1.0))
    quantized = np.round(np.clip(samples, -1.0, 1.0) * 32767.0).astype("<i2")
    try:
        with wave.open(str(path), "wb") as wav:
            wav.setnchannels(1)
            wav.setsampwidth(2)
            wav.setframerate(signal.sample_rate_hz)
            wav.writeframes(quantized.tobytes())
    except OSError as exc:
        raise WavError(f"cannot write WAV: {path}: {exc}") from None
    return clipped


# ---------------------------------------------------------------------------
# spike file I/O
# ---------------------------------------------------------------------------

def write_spikes(path, pattern: SpikePattern) -> None:
    """Serialize a pattern to the SPKE binary format (lossless, deterministic)."""
    if pattern.num_neurons > 0xFFFF:
        raise SpikeFileError("num_neurons exceeds u16 range")
    if pattern.duration_us > 0xFFFFFFFF:
        raise SpikeFileError("duration_us exceeds u32 range")
    header = _HEADER.pack(
        SPIKE_MAGIC,
        SPIKE_VERSION,
        pattern.num_neurons,
        pattern.num_channels,
        pattern.thresholds_per_channel,
        pattern.sample_rate_hz,
        pattern.duration_us,
        pattern.num_events,
    )
    records = np.zeros(pattern.num_events, dtype=_EVENT_DTYPE)
    records["neuron"] = pattern.events[:, 0]
    records["time"] = pattern.events[:, 1]
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(records.tobytes())


def read_spikes(path) -> SpikePattern:
    """Parse and validate an SPKE file; any violation raises SpikeFileError."""
    path = Path(path)
    if not path.exists():
        raise SpikeFileError(f"no such file: {path}")
    blob = path.read_bytes()
    if len(blob) < HEADER_SIZE:
        raise SpikeFileError(f"not a spike file (truncated header): {path}")
    magic, version, num_neurons, num_channels, tpc, rate, duration, count = (
        _HEADER.unpack_from(blob)
    )
    if magic != SPIKE_MAGIC:
        raise SpikeFileError(f"not a spike file (bad magic): {path}")
    if version != SPIKE_VERSION:
        raise SpikeFileError(f"unsupported spike file version {version}: {path}")
    if num_neurons != num_channels * tpc or num_neurons == 0:
        raise SpikeFileError(f"inconsistent neuron geometry in header: {path}")
    expected = HEADER_SIZE + count * EVENT_SIZE
    if len(blob) != expected:
        raise SpikeFileError(
            f"event payload size mismatch (expected {expected} bytes, "
            f"got {len(blob)}): {path}"
        )
    records = np.frombuffer(blob, dtype=_EVENT_DTYPE, offset=HEADER_SIZE, count=count)
    if np.any(records["reserved"] != 0):
        raise SpikeFileError(f"nonzero reserved field in event record: {path}")
    events = np.column_stack(
        (records["neuron"].astype(np.int64), records["time"].astype(np.int64))
    )
    layout = "latency" if tpc == 1 else "onset-offset"
    try:
        return SpikePattern(
            num_neurons=num_neurons,
            duration_us=duration,
            events=events,
            num_channels=num_channels,
            thresholds_per_channel=tpc,
            sample_rate_hz=rate,
            layout=layout,
        )
    except ValueError as exc:
        raise SpikeFileError(f"invalid spike file: {path}: {exc}") from None


def dump_events_jsonl(path, pattern: SpikePattern) -> None:
    """Debug dump: one {"n": neuron_id, "t": time_us} JSON object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for neuron, time_us in pattern.events:
            fh.write('{"n":%d,"t":%d}\n' % (neuron, time_us))
