"""Block-fading Rayleigh MIMO channel with additive white Gaussian noise.

Randomness comes from :class:`numpy.random.Generator` objects. A simulation
derives separate streams for data bits, channel gains and noise from one
root seed (see :func:`make_streams`), so switching the noise off or changing
the receiver never perturbs the channel sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ChannelBlock",
    "NoiseSpec",
    "Streams",
    "make_streams",
    "complex_normal",
    "draw_channel",
    "draw_channels",
    "apply",
]


@dataclass(frozen=True)
class ChannelBlock:
    """Channel matrix ``h`` (n_tx x n_rx) held constant over code word ``block_index``."""

    h: np.ndarray
    block_index: int = 0


@dataclass(frozen=True)
class NoiseSpec:
    """White complex Gaussian noise with variance ``sigma2`` per real dimension."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")


class Streams(NamedTuple):
    bits: np.random.Generator
    channel: np.random.Generator
    noise: np.random.Generator


def make_streams(seed: int, *key: int) -> Streams:
    """Independent generators for one (seed, key...) combination.

    ``key`` is typically ``(point_index, shard_index)``; equal keys always
    reproduce the same streams.
    """
    root = np.random.SeedSequence(seed, spawn_key=tuple(key))
    return Streams(*(np.random.default_rng(s) for s in root.spawn(3)))


def complex_normal(rng: np.random.Generator, shape, var_per_dim: float = 0.5) -> np.ndarray:
    """Circular complex Gaussian samples with the given per-dimension variance."""
    z = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    z *= np.sqrt(var_per_dim)
    return z.view(complex)[..., 0]


def draw_channels(n_tx: int, n_rx: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent Rayleigh channel matrices, shape (count, n_tx, n_rx)."""
    if n_tx < 1 or n_rx < 1:
        raise ValueError("antenna counts must be at least 1")
    return complex_normal(rng, (count, n_tx, n_rx), 0.5)


def draw_channel(n_tx: int, n_rx: int, rng: np.random.Generator, block_index: int = 0) -> ChannelBlock:
    """One Rayleigh block with unit mean power per link."""
    return ChannelBlock(draw_channels(n_tx, n_rx, 1, rng)[0], block_index)


def apply(x, h, noise: NoiseSpec | None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Pass transmitted code words through the channel: ``R = x h + W``.

    Parameters
    ----------
    x : array_like, shape (..., l, n_tx)
    h : ChannelBlock or array_like, shape (..., n_tx, n_rx)
    noise : NoiseSpec or None
        ``None`` disables the noise.
    rng : Generator
        Noise stream; required when ``noise`` is given.
    """
    if isinstance(h, ChannelBlock):
        h = h.h
    x = np.asarray(x, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if x.ndim < 2 or h.ndim < 2 or x.shape[-1] != h.shape[-2]:
        raise ValueError(f"cannot apply channel of shape {h.shape} to signal of shape {x.shape}")
    r = x @ h
    if noise is not None:
        if rng is None:
            raise ValueError("a noise stream is required when noise is enabled")
        r += complex_normal(rng, r.shape, noise.sigma2)
    return r
