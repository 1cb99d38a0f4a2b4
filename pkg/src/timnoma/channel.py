"""Rayleigh block fading, per-user channel matrices and complex AWGN.

Each user's channel over one coherence block of T slots is a single complex
scalar h with unit variance, so the T x T channel matrix is sqrt(gamma)*h
times the identity. Noise variance is the total per complex sample
(sigma^2/2 per real dimension).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .topology import Topology, path_loss

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class NoiseModel:
    """Complex AWGN with total variance E|z|^2 = variance per sample."""

    variance: float

    def __post_init__(self) -> None:
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValidationError("noise variance must be a positive finite number")


def draw_fading(rng: np.random.Generator, user_count: int, blocks: int | None = None) -> np.ndarray:
    """Draw i.i.d. unit-variance circularly-symmetric complex coefficients.

    Returns shape (user_count,) for a single coherence block, or
    (user_count, blocks) for a run of consecutive blocks. Deterministic
    given the generator state: real parts are drawn first, then imaginary.
    """
    if user_count < 1:
        raise ValidationError("user_count must be at least 1")
    shape = (user_count,) if blocks is None else (user_count, int(blocks))
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * _SQRT_HALF


def channel_matrix(topology: Topology, fading: np.ndarray, user: int) -> np.ndarray:
    """T x T channel matrix sqrt(gamma_k) * h_k * I for one coherence block."""
    gain = math.sqrt(path_loss(topology, user))
    return gain * fading[user] * np.eye(topology.group_count)


def add_noise(rng: np.random.Generator, signal: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """Add i.i.d. complex Gaussian noise of the model's variance per entry."""
    signal = np.asarray(signal)
    scale = math.sqrt(noise.variance / 2.0)
    re = rng.standard_normal(signal.shape)
    im = rng.standard_normal(signal.shape)
    return signal + scale * (re + 1j * im)


def effective_gain(topology: Topology, fading: np.ndarray, user: int, noise: NoiseModel) -> float:
    """Instantaneous channel gain normalized by noise power: gamma|h|^2 / sigma^2."""
    return path_loss(topology, user) * float(np.abs(fading[user]) ** 2) / noise.variance
