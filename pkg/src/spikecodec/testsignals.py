"""Deterministic speech-like test signals.

Licensed speech corpora cannot ship with the codec, so the bundled
fixtures are synthesized: formant-style tone stacks on the cochlear
channel centre frequencies with syllable-rate amplitude modulation, plus
a faint per-channel breath-noise bed. Every component is a cosine on a
channel centre with phase referenced to the clip start, which keeps the
clips decodable by the envelope-times-carrier reconstruction while still
exercising masking the way running speech does (silence, onsets,
decaying tails, simultaneous formants).
"""

from __future__ import annotations

import numpy as np

from .audio_io import AudioSignal
from .filterbank import DEFAULT_CHANNELS_HZ

_WORD_SEEDS = (101, 202, 303, 404, 505, 606)
_SENTENCE_SEED = 7007


def _syllable_envelope(rng, n: int, fs: int) -> np.ndarray:
    """Rise/sustain/fall envelope with syllabic wobble, n samples long."""
    attack = max(int(n * rng.uniform(0.15, 0.3)), 8)
    release = max(int(n * rng.uniform(0.25, 0.45)), 8)
    sustain = max(n - attack - release, 0)
    rise = 0.5 - 0.5 * np.cos(np.pi * np.arange(attack) / attack)
    fall = 0.5 + 0.5 * np.cos(np.pi * np.arange(release) / release)
    env = np.concatenate([rise, np.ones(sustain), fall])[:n]
    # amplitude wobble at syllabic rate keeps the level moving
    depth = rng.uniform(0.25, 0.5)
    f_mod = rng.uniform(3.0, 7.0)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    wobble = 1.0 + depth * np.sin(2.0 * np.pi * f_mod * np.arange(n) / fs + phase)
    return env * wobble


def _word_parts(rng, fs: int, start: int):
    """Formant components of one word as (channel, start, envelope) parts.

    Returns (parts, end_sample) where end_sample points past the word.
    """
    parts = []
    cursor = start
    for _ in range(int(rng.integers(2, 4))):
        length = int(fs * rng.uniform(0.16, 0.30))
        gap = int(fs * rng.uniform(0.04, 0.10))
        env = _syllable_envelope(rng, length, fs)
        formants = rng.choice(np.arange(2, 17), size=3, replace=False)
        amps = (
            rng.uniform(0.20, 0.34),
            rng.uniform(0.07, 0.16),
            rng.uniform(0.035, 0.09),
        )
        for channel, amp in zip(formants, amps):
            parts.append((int(channel), cursor, amp * env))
        cursor += length + gap
    return parts, cursor


def _smooth_walk(rng, n: int, smooth: int) -> np.ndarray:
    """Low-pass random walk in [0, 1] for slow level wander."""
    steps = rng.standard_normal(n // smooth + 2)
    coarse = np.cumsum(steps)
    coarse -= coarse.min()
    if coarse.max() > 0:
        coarse /= coarse.max()
    return np.interp(np.arange(n), np.arange(coarse.size) * smooth, coarse)


def _render(total: int, fs: int, parts, noise_lo_db: float, noise_hi_db: float,
            rng) -> np.ndarray:
    """Render components plus breath noise; carriers phase-locked to t=0."""
    centres = [fc for fc, _ in DEFAULT_CHANNELS_HZ]
    t = np.arange(total)
    out = np.zeros(total)
    for channel, start, env in parts:
        fc = centres[channel]
        idx = t[start : start + env.size]
        out[start : start + env.size] += env * np.cos(2.0 * np.pi * fc * idx / fs)
    smooth = int(fs * 0.05)
    for channel, fc in enumerate(centres[:-1]):  # skip the wideband top channel
        walk = _smooth_walk(rng, total, smooth)
        level_db = noise_lo_db + (noise_hi_db - noise_lo_db) * walk
        amp = 10.0 ** (level_db / 20.0)
        out += amp * np.cos(2.0 * np.pi * fc * t / fs)
    peak = np.max(np.abs(out))
    if peak > 0.95:
        out *= 0.95 / peak
    return out


def word_clip(seed: int, sample_rate_hz: int = 20000) -> AudioSignal:
    """One isolated word: a few modulated syllables between silences."""
    rng = np.random.default_rng(seed)
    fs = sample_rate_hz
    lead = int(fs * rng.uniform(0.18, 0.28))
    parts, cursor = _word_parts(rng, fs, lead)
    total = cursor + int(fs * rng.uniform(0.18, 0.28))
    samples = _render(total, fs, parts, -54.0, -40.0, rng)
    return AudioSignal(samples=samples, sample_rate_hz=fs)


def sentence_clip(
    seed: int, sample_rate_hz: int = 20000, num_words: int = 7
) -> AudioSignal:
    """Continuous-speech stand-in: words flowing with short gaps.

    All components live on one timeline so every carrier stays phase
    coherent with the clip start; the noise bed sits lower than in the
    isolated-word clips, as fits a longer recording dominated by speech.
    """
    rng = np.random.default_rng(seed)
    fs = sample_rate_hz
    cursor = int(fs * rng.uniform(0.1, 0.2))
    parts = []
    for i in range(num_words):
        word_parts, cursor = _word_parts(rng, fs, cursor)
        parts.extend(word_parts)
        if i != num_words - 1:
            cursor += int(fs * rng.uniform(0.03, 0.10))
    total = cursor + int(fs * rng.uniform(0.1, 0.2))
    samples = _render(total, fs, parts, -62.0, -48.0, rng)
    return AudioSignal(samples=samples, sample_rate_hz=fs)


def default_corpus(sample_rate_hz: int = 20000) -> dict:
    """Bundled fixture set: six isolated words plus one sentence."""
    corpus = {
        f"word{i}_{seed}": word_clip(seed, sample_rate_hz)
        for i, seed in enumerate(_WORD_SEEDS)
    }
    corpus["sentence_7007"] = sentence_clip(_SENTENCE_SEED, sample_rate_hz)
    return corpus


def pure_tone(
    freq_hz: float,
    duration_s: float,
    sample_rate_hz: int,
    amplitude: float = 0.5,
) -> AudioSignal:
    n = np.arange(int(round(duration_s * sample_rate_hz)))
    return AudioSignal(
        samples=amplitude * np.cos(2.0 * np.pi * freq_hz * n / sample_rate_hz),
        sample_rate_hz=sample_rate_hz,
    )
