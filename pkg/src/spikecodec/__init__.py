"""Neuromorphic audio spike codec: cochlear filter bank analysis,
psychoacoustic masking, population threshold spike coding, and
reconstruction with objective quality metrics."""

from .audio_io import (
    AudioSignal,
    CodecConfig,
    SpikePattern,
    dump_events_jsonl,
    read_spikes,
    read_wav,
    write_spikes,
    write_wav,
)
from .decoder import EnvelopeSet, decode_audio, decode_envelopes, render_subbands
from .encoder import (
    ThresholdSet,
    apply_mask,
    latency_encode,
    latency_spike_time_us,
    random_mask,
    threshold_encode,
)
from .errors import (
    ConfigError,
    GeometryError,
    SpikeCodecError,
    SpikeFileError,
    WavError,
)
from .filterbank import (
    CochlearFilter,
    CochlearFilterBank,
    SubbandSignals,
    analyze,
    build_filterbank,
    synthesize,
)
from .lif_probe import LifParams, free_potential, trace_similarity
from .masking import (
    MaskLevels,
    MaskMap,
    absolute_threshold_db,
    combine_masks,
    combined_mask_map,
    masker_map,
    simultaneous_mask,
    temporal_mask,
)
from .metrics import PesqResult, pesq_external, rmse, sdr_db, spike_reduction
from .spectral import Spectrogram, frame_energy

__version__ = "0.1.0"

__all__ = [
    "AudioSignal",
    "CodecConfig",
    "SpikePattern",
    "ThresholdSet",
    "CochlearFilter",
    "CochlearFilterBank",
    "SubbandSignals",
    "Spectrogram",
    "MaskLevels",
    "MaskMap",
    "EnvelopeSet",
    "LifParams",
    "PesqResult",
    "SpikeCodecError",
    "WavError",
    "SpikeFileError",
    "ConfigError",
    "GeometryError",
    "read_wav",
    "write_wav",
    "read_spikes",
    "write_spikes",
    "dump_events_jsonl",
    "build_filterbank",
    "analyze",
    "synthesize",
    "frame_energy",
    "absolute_threshold_db",
    "simultaneous_mask",
    "temporal_mask",
    "combine_masks",
    "masker_map",
    "combined_mask_map",
    "threshold_encode",
    "latency_encode",
    "latency_spike_time_us",
    "apply_mask",
    "random_mask",
    "decode_envelopes",
    "render_subbands",
    "decode_audio",
    "rmse",
    "sdr_db",
    "spike_reduction",
    "pesq_external",
    "free_potential",
    "trace_similarity",
    "__version__",
]
