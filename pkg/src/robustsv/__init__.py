"""Noise- and reverberation-robust speaker verification.

Clean speech is artificially corrupted (room reverb, additive noise at a
controlled A-weighted SNR, telephone channel), a spectral autoencoder is
trained to map corrupted log-magnitude spectra back to clean, and an
i-vector/PLDA backend measures verification error with and without the
enhancement and multi-condition training.
"""

__version__ = "0.1.0"
