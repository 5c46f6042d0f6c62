"""Exception types shared across the codec."""


class SpikeCodecError(Exception):
    """Base class for all codec errors."""


class WavError(SpikeCodecError):
    """WAV file missing, malformed, or not plain PCM."""


class SpikeFileError(SpikeCodecError):
    """Spike event file is corrupt or violates format invariants."""


class ConfigError(SpikeCodecError):
    """Codec configuration is inconsistent."""


class GeometryError(SpikeCodecError):
    """Pattern, map, or bank dimensions do not line up."""
