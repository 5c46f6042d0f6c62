"""Diagnostic leaky integrate-and-fire probe.

Computes the free (non-resetting) membrane potential of a single readout
neuron driven by a spike pattern through fixed weights, using a peak-
normalized double-exponential synaptic kernel. Useful for comparing how
masked and unmasked encodings of the same utterance drive a neuron.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .audio_io import SpikePattern

_EVENT_CHUNK = 1024


@dataclass(frozen=True)
class LifParams:
    """Membrane/synapse time constants and per-input-neuron weights."""

    weights: np.ndarray
    tau_m_ms: float = 20.0
    tau_s_ms: float = 5.0
    threshold: float = 1.0

    def __post_init__(self):
        if not (self.tau_m_ms > self.tau_s_ms > 0):
            raise ValueError("need tau_m_ms > tau_s_ms > 0")
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if weights.ndim != 1:
            raise ValueError("weights must be a vector")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def kernel_peak_time_ms(self) -> float:
        tm, ts = self.tau_m_ms, self.tau_s_ms
        return tm * ts / (tm - ts) * math.log(tm / ts)

    @property
    def kernel_norm(self) -> float:
        t = self.kernel_peak_time_ms
        return 1.0 / (math.exp(-t / self.tau_m_ms) - math.exp(-t / self.tau_s_ms))


def free_potential(
    pattern: SpikePattern, params: LifParams, dt_ms: float
) -> tuple[np.ndarray, np.ndarray]:
    """Free membrane potential trace (times_ms, potential).

    V(t) = sum over spikes of w[neuron] * K(t - t_spike) with
    K(t) = V0 * (exp(-t / tau_m) - exp(-t / tau_s)) for t >= 0, else 0,
    and V0 chosen so the kernel peak is exactly 1. No reset is applied.
    """
    if dt_ms <= 0:
        raise ValueError("dt_ms must be positive")
    if params.weights.size != pattern.num_neurons:
        raise ValueError(
            f"weights length {params.weights.size} does not match "
            f"{pattern.num_neurons} neurons"
        )
    tail_ms = 5.0 * params.tau_m_ms
    t_end = pattern.duration_us / 1000.0 + tail_ms
    times = np.arange(0.0, t_end + dt_ms, dt_ms)
    v = np.zeros_like(times)
    if pattern.num_events == 0:
        return times, v

    v0 = params.kernel_norm
    spike_ms = pattern.times_us / 1000.0
    spike_w = params.weights[pattern.neuron_ids]
    for start in range(0, spike_ms.size, _EVENT_CHUNK):
        t_ev = spike_ms[start : start + _EVENT_CHUNK, None]
        w_ev = spike_w[start : start + _EVENT_CHUNK, None]
        # clamped negative offsets give exp(0) - exp(0) = 0, i.e. causality
        dt = np.maximum(times[None, :] - t_ev, 0.0)
        kern = np.exp(-dt / params.tau_m_ms) - np.exp(-dt / params.tau_s_ms)
        v += v0 * np.sum(w_ev * kern, axis=0)
    return times, v


def trace_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation of two traces; constant traces map to 0."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("traces must have equal length")
    sa, sb = a.std(), b.std()
    if sa == 0.0 or sb == 0.0:
        warnings.warn("constant trace; similarity defined as 0", stacklevel=2)
        return 0.0
    return float(np.corrcoef(a, b)[0, 1])
