from .filters import E1_BAND, E2_BAND, BandpassFilter, BandpassSpec, band_energy, band_filter, butterworth_bandpass, rms
from .lpc import LpcModel, formants, levinson_durbin, lpc
from .mel import MelFilterbank, hz_to_mel, mel_filterbank, mel_to_hz
from .mfcc import MfccConfig, deltas, mfcc_frames, mfcc_with_deltas
from .pitch import PitchConfig, PitchFrame, PitchTrack, nccf, track_pitch
from .spectrum import Spectrum, frame_signal, hamming_window, magnitude_fft

__all__ = [
    "E1_BAND",
    "E2_BAND",
    "BandpassFilter",
    "BandpassSpec",
    "band_energy",
    "band_filter",
    "butterworth_bandpass",
    "rms",
    "LpcModel",
    "formants",
    "levinson_durbin",
    "lpc",
    "MelFilterbank",
    "hz_to_mel",
    "mel_filterbank",
    "mel_to_hz",
    "MfccConfig",
    "deltas",
    "mfcc_frames",
    "mfcc_with_deltas",
    "PitchConfig",
    "PitchFrame",
    "PitchTrack",
    "nccf",
    "track_pitch",
    "Spectrum",
    "frame_signal",
    "hamming_window",
    "magnitude_fft",
]
