"""Objective quality and efficiency measures: RMSE, SDR, spike reduction,
and an external PESQ tool hook.

RMSE and SDR align the two signals first: the degraded signal is shifted
by the cross-correlation lag (searched within +-50 ms) and the shorter
signal is zero-padded, because the decoder can introduce small group
delays.
"""

from __future__ import annotations

import math
import re
import subprocess
from dataclasses import dataclass

import numpy as np
from scipy.signal import correlate

from .audio_io import AudioSignal, SpikePattern
from .errors import GeometryError

MAX_ALIGN_LAG_S = 0.05


def _aligned_pair(x: AudioSignal, y: AudioSignal, max_lag_s: float):
    if x.sample_rate_hz != y.sample_rate_hz:
        raise GeometryError(
            f"sample rate mismatch: {x.sample_rate_hz} vs {y.sample_rate_hz}"
        )
    a = np.asarray(x.samples, dtype=np.float64)
    b = np.asarray(y.samples, dtype=np.float64)
    if a.size == 0 and b.size == 0:
        raise ValueError("both signals are empty")
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    max_lag = int(round(max_lag_s * x.sample_rate_hz))
    if max_lag > 0 and np.any(a) and np.any(b):
        corr = correlate(a, b, mode="full")
        lags = np.arange(-(n - 1), n)
        window = np.abs(lags) <= max_lag
        lag = int(lags[window][np.argmax(corr[window])])
    else:
        lag = 0
    # positive lag: b is early relative to a; delay b to line them up
    if lag > 0:
        b = np.pad(b, (lag, 0))[:n]
    elif lag < 0:
        b = np.pad(b[-lag:], (0, -lag))
    return a, b


def rmse(x: AudioSignal, x_hat: AudioSignal, *, max_lag_s: float = MAX_ALIGN_LAG_S) -> float:
    """Root mean square sample error after lag alignment."""
    a, b = _aligned_pair(x, x_hat, max_lag_s)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def sdr_db(x: AudioSignal, x_hat: AudioSignal, *, max_lag_s: float = MAX_ALIGN_LAG_S) -> float:
    """Signal-to-distortion ratio 10*log10(sum x^2 / sum (x - x_hat)^2).

    Returns math.inf when the residual is exactly zero.
    """
    a, b = _aligned_pair(x, x_hat, max_lag_s)
    signal_energy = float(np.sum(a * a))
    if signal_energy == 0.0:
        raise ValueError("zero-energy reference signal")
    residual = float(np.sum((a - b) ** 2))
    if residual == 0.0:
        return math.inf
    return 10.0 * math.log10(signal_energy / residual)


def spike_reduction(raw: SpikePattern, masked: SpikePattern) -> float:
    """Percentage of raw spikes removed by masking."""
    if raw.num_events == 0:
        raise ValueError("raw pattern has no spikes")
    return 100.0 * (1.0 - masked.num_events / raw.num_events)


@dataclass(frozen=True)
class PesqResult:
    status: str  # "ok" | "unavailable"
    score: float | None = None
    detail: str = ""

    @property
    def available(self) -> bool:
        return self.status == "ok"


def pesq_external(ref_path, deg_path, tool_path) -> PesqResult:
    """Run an external PESQ binary on (reference, degraded) WAV paths.

    The tool is invoked as ``tool ref deg`` and its stdout is scanned for
    the last numeric token, which is passed through as the score. A
    missing or crashing tool yields status "unavailable", never an
    exception.
    """
    if not tool_path:
        return PesqResult(status="unavailable", detail="no tool configured")
    try:
        proc = subprocess.run(
            [str(tool_path), str(ref_path), str(deg_path)],
            capture_output=True,
            text=True,
            timeout=120,
        )
    except (FileNotFoundError, PermissionError, subprocess.TimeoutExpired, OSError) as exc:
        return PesqResult(status="unavailable", detail=str(exc))
    if proc.returncode != 0:
        return PesqResult(
            status="unavailable",
            detail=f"tool exited {proc.returncode}: {proc.stderr.strip()}",
        )
    numbers = re.findall(r"-?\d+(?:\.\d+)?", proc.stdout)
    if not numbers:
        return PesqResult(status="unavailable", detail="no score in tool output")
    return PesqResult(status="ok", score=float(numbers[-1]))


def quality_report(
    reference: AudioSignal,
    degraded: AudioSignal,
    *,
    raw_pattern: SpikePattern | None = None,
    masked_pattern: SpikePattern | None = None,
    pesq: PesqResult | None = None,
) -> dict:
    """JSON-ready bundle of the quality measures."""
    sdr = sdr_db(reference, degraded)
    report = {
        "rmse": rmse(reference, degraded),
        "sdr_db": sdr if math.isfinite(sdr) else None,
        "reduction_pct": None,
        "pesq": None,
    }
    if raw_pattern is not None and masked_pattern is not None:
        report["reduction_pct"] = spike_reduction(raw_pattern, masked_pattern)
    if pesq is not None and pesq.available:
        report["pesq"] = pesq.score
    return report
