"""Psychoacoustic masking: absolute threshold, frequency spreading,
temporal decay, and the binary keep/drop masker map.

All levels are in the same dB scale as the spectrogram frame energies; no
SPL calibration is applied. The combined mask is the elementwise minimum
of the simultaneous and temporal levels, and a time-frequency bin is kept
whenever its energy is at least the combined level (boundary kept).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .filterbank import CochlearFilterBank
from .spectral import Spectrogram

DEFAULT_SPREADING_OFFSET_DB = 14.0
DEFAULT_SLOPE_LOW_DB = 27.0   # masking spreading toward lower channels
DEFAULT_SLOPE_HIGH_DB = 13.0  # masking spreading toward higher channels


@dataclass(frozen=True)
class MaskLevels:
    """K x N masking threshold surface, tagged by origin."""

    levels_db: np.ndarray
    kind: str  # "simultaneous" | "temporal" | "combined"

    def __post_init__(self):
        levels = np.ascontiguousarray(self.levels_db, dtype=np.float64)
        if levels.ndim != 2:
            raise ValueError("levels_db must be 2-D (channels x frames)")
        if not np.all(np.isfinite(levels)):
            raise ValueError("mask levels must be finite")
        levels.setflags(write=False)
        object.__setattr__(self, "levels_db", levels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.levels_db.shape


@dataclass(frozen=True)
class MaskMap:
    """Binary keep/drop matrix: keep[i, j] == 1 keeps the bin's spikes."""

    keep: np.ndarray

    def __post_init__(self):
        keep = np.ascontiguousarray(self.keep, dtype=np.uint8)
        if keep.ndim != 2:
            raise ValueError("keep must be 2-D (channels x frames)")
        keep.setflags(write=False)
        object.__setattr__(self, "keep", keep)

    @property
    def shape(self) -> tuple[int, int]:
        return self.keep.shape

    @property
    def kept_fraction(self) -> float:
        return float(self.keep.mean()) if self.keep.size else 1.0


def absolute_threshold_db(f_hz):
    """Absolute hearing threshold in dB as a function of frequency in Hz.

    3.64 (f/kHz)^-0.8 - 6.5 exp(-0.6 (f/kHz - 3.3)^2) + 1e-3 (f/kHz)^4
    """
    f = np.asarray(f_hz, dtype=np.float64)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    khz = f / 1000.0
    out = (
        3.64 * khz ** -0.8
        - 6.5 * np.exp(-0.6 * (khz - 3.3) ** 2)
        + 0.001 * khz ** 4
    )
    return float(out) if np.isscalar(f_hz) else out


def simultaneous_mask(
    spec: Spectrogram,
    bank: CochlearFilterBank,
    *,
    offset_db: float = DEFAULT_SPREADING_OFFSET_DB,
    slope_low_db: float = DEFAULT_SLOPE_LOW_DB,
    slope_high_db: float = DEFAULT_SLOPE_HIGH_DB,
) -> MaskLevels:
    """Frequency-domain mask: absolute threshold plus neighbor spreading.

    A masker of level s in channel i' raises the threshold in channel i
    (i != i') to s - offset_db - slope * |i - i'|, with the steep slope
    toward lower channels and the shallow slope toward higher channels.
    The per-channel absolute hearing threshold (at the channel centre
    frequency) is the floor of the surface.
    """
    if spec.num_channels != bank.num_channels:
        raise GeometryError(
            f"channel mismatch: spectrogram {spec.num_channels}, "
            f"bank {bank.num_channels}"
        )
    s = spec.energies_db
    k = spec.num_channels

    idx = np.arange(k)
    dist = np.abs(idx[:, None] - idx[None, :])  # (masker i', maskee i)
    slope = np.where(idx[None, :] < idx[:, None], slope_low_db, slope_high_db)
    spread = -offset_db - slope * dist
    np.fill_diagonal(spread, -np.inf)  # self term excluded

    # levels[i, j] = max over maskers i' of s[i', j] + spread[i', i]
    spread_levels = np.max(s[:, None, :] + spread[:, :, None], axis=0)
    t_abs = absolute_threshold_db(bank.centre_hz)
    levels = np.maximum(spread_levels, t_abs[:, None])
    return MaskLevels(levels_db=levels, kind="simultaneous")


def temporal_mask(spec: Spectrogram, c: float) -> MaskLevels:
    """Time-domain mask: exponential decay of the last local peak level.

    Scanning each channel left to right, a frame whose energy exceeds the
    current decayed threshold becomes the new masker (threshold equal to
    its own level, so maskers are never self-masked); every following
    frame decays the threshold by the factor c.
    """
    if not (0 < c <= 1):
        raise ValueError("decay factor c must be in (0, 1]")
    s = spec.energies_db
    levels = np.empty_like(s)
    if s.shape[1] == 0:
        return MaskLevels(levels_db=levels, kind="temporal")
    current = s[:, 0].copy()
    levels[:, 0] = current
    for j in range(1, s.shape[1]):
        decayed = c * current
        exceeded = s[:, j] > decayed
        current = np.where(exceeded, s[:, j], decayed)
        levels[:, j] = current
    return MaskLevels(levels_db=levels, kind="temporal")


def combine_masks(a: MaskLevels, b: MaskLevels) -> MaskLevels:
    """Elementwise minimum of two masking surfaces."""
    if a.shape != b.shape:
        raise GeometryError(f"mask shape mismatch: {a.shape} vs {b.shape}")
    return MaskLevels(levels_db=np.minimum(a.levels_db, b.levels_db), kind="combined")


def masker_map(spec: Spectrogram, levels: MaskLevels) -> MaskMap:
    """keep = 1 where the frame energy reaches the masking level."""
    if spec.energies_db.shape != levels.shape:
        raise GeometryError(
            f"shape mismatch: spectrogram {spec.energies_db.shape}, "
            f"levels {levels.shape}"
        )
    return MaskMap(keep=(spec.energies_db >= levels.levels_db).astype(np.uint8))


def combined_mask_map(
    spec: Spectrogram,
    bank: CochlearFilterBank,
    *,
    temporal_decay_c: float,
    offset_db: float = DEFAULT_SPREADING_OFFSET_DB,
    slope_low_db: float = DEFAULT_SLOPE_LOW_DB,
    slope_high_db: float = DEFAULT_SLOPE_HIGH_DB,
) -> tuple[MaskLevels, MaskLevels, MaskLevels, MaskMap]:
    """Convenience pipeline: simultaneous, temporal, combined, map."""
    sim = simultaneous_mask(
        spec,
        bank,
        offset_db=offset_db,
        slope_low_db=slope_low_db,
        slope_high_db=slope_high_db,
    )
    temp = temporal_mask(spec, temporal_decay_c)
    combined = combine_masks(sim, temp)
    return sim, temp, combined, masker_map(spec, combined)
