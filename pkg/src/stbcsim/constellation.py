"""Gray-mapped constellations, hard demapping and bitwise LLR demodulation.

Bit vectors are stored most significant bit first, so for 16-QAM the label
``(b3, b2, b1, b0)`` is laid out as ``labels[i] == [b3, b2, b1, b0]`` and the
LLR vectors returned by :func:`llr_exact` and :func:`llr_approx` follow the
same order. A positive LLR always favours bit 1.

All functions broadcast over leading axes of ``r``; the bit axis is last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError

__all__ = [
    "Constellation",
    "LlrWord",
    "CONSTELLATIONS",
    "make_constellation",
    "map_bits",
    "demap_hard",
    "llr_exact",
    "llr_approx",
    "weight_llr",
]

CONSTELLATIONS = ("bpsk", "qpsk", "psk8", "qam16")

_ALIASES = {"8psk": "psk8", "16qam": "qam16"}


@dataclass(frozen=True, eq=False)
class Constellation:
    """Normalized point set with Gray bit labels.

    Attributes
    ----------
    name : str
        One of ``bpsk``, ``qpsk``, ``psk8``, ``qam16``.
    k : int
        Bits per symbol.
    points : ndarray of complex, shape (2**k,)
        Constellation points with unit average energy.
    labels : ndarray of uint8, shape (2**k, k)
        Bit label of each point, MSB first.
    d_const : float
        Distance between adjacent points along one real dimension.
    """

    name: str
    k: int
    points: np.ndarray
    labels: np.ndarray
    d_const: float

    def __post_init__(self):
        weights = 1 << np.arange(self.k - 1, -1, -1)
        index = self.labels.astype(np.int64) @ weights
        by_label = np.empty(len(self.points), dtype=complex)
        by_label[index] = self.points
        object.__setattr__(self, "_by_label", by_label)
        object.__setattr__(self, "_weights", weights)

    @property
    def size(self) -> int:
        return len(self.points)

    def __repr__(self):
        return f"Constellation({self.name!r}, k={self.k})"


@dataclass(frozen=True)
class LlrWord:
    """Bit LLRs already multiplied by the channel energy of their code word.

    ``lambdas`` has the bit axis last; ``weight`` broadcasts against the
    leading axes.
    """

    lambdas: np.ndarray
    weight: np.ndarray | float


def _int_to_bits(values, k):
    values = np.asarray(values)
    shifts = np.arange(k - 1, -1, -1)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def _pam4_axis():
    # Gray order along one axis for the (sign, inner) bit pair: -3, -1, +1, +3
    coords = np.array([-3.0, -1.0, 1.0, 3.0])
    bits = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)
    return coords, bits


def make_constellation(name: str) -> Constellation:
    """Build one of the supported Gray-mapped constellations.

    Raises
    ------
    ConfigError
        If ``name`` is not a supported constellation.
    """
    key = _ALIASES.get(name, name)
    if key == "bpsk":
        points = np.array([-1.0 + 0j, 1.0 + 0j])
        labels = np.array([[0], [1]], dtype=np.uint8)
        return Constellation("bpsk", 1, points, labels, 2.0)
    if key == "qpsk":
        axis = np.array([-1.0, 1.0])
        re, im = np.meshgrid(axis, axis, indexing="ij")
        points = (re + 1j * im).ravel() / np.sqrt(2)
        labels = np.stack([(re > 0).ravel(), (im > 0).ravel()], axis=1)
        return Constellation("qpsk", 2, points, labels.astype(np.uint8), np.sqrt(2))
    if key == "psk8":
        n = np.arange(8)
        points = np.exp(1j * np.pi * n / 4)
        labels = _int_to_bits(n ^ (n >> 1), 3)
        # adjacent-point chord length; there is no per-axis spacing for PSK
        return Constellation("psk8", 3, points, labels, 2 * np.sin(np.pi / 8))
    if key == "qam16":
        coords, bits = _pam4_axis()
        scale = 1 / np.sqrt(10)
        ire, iim = np.meshgrid(np.arange(4), np.arange(4), indexing="ij")
        ire, iim = ire.ravel(), iim.ravel()
        points = (coords[ire] + 1j * coords[iim]) * scale
        labels = np.concatenate([bits[ire], bits[iim]], axis=1)
        return Constellation("qam16", 4, points, labels, 2 * scale)
    raise ConfigError(f"unsupported constellation {name!r}")


def map_bits(bits, c: Constellation) -> np.ndarray:
    """Map bit vectors (last axis of length ``c.k``) to constellation points."""
    bits = np.asarray(bits)
    if bits.ndim == 0 or bits.shape[-1] != c.k:
        raise ValueError(f"expected bit vectors of length {c.k}, got shape {bits.shape}")
    index = bits.astype(np.int64) @ c._weights
    return c._by_label[index]


def _sq_dist(r, c):
    r = np.asarray(r, dtype=complex)
    return np.abs(r[..., None] - c.points) ** 2


def demap_hard(r, c: Constellation) -> np.ndarray:
    """Labels of the nearest constellation points; ties go to the lowest index."""
    return c.labels[np.argmin(_sq_dist(r, c), axis=-1)]


def _check_sigma2(sigma2):
    sigma2 = np.asarray(sigma2, dtype=float)
    if np.any(~(sigma2 > 0)):
        raise ValueError("sigma2 must be positive")
    return sigma2


def llr_exact(r, sigma2, c: Constellation) -> np.ndarray:
    """Exact bitwise LLR, summing the Gaussian likelihood over every point.

    ``sigma2`` is the noise variance per real dimension and broadcasts
    against ``r``.
    """
    sigma2 = _check_sigma2(sigma2)
    metric = -_sq_dist(r, c) / (2 * sigma2[..., None])
    out = []
    for q in range(c.k):
        ones = c.labels[:, q] == 1
        out.append(logsumexp(metric[..., ones], axis=-1)
                   - logsumexp(metric[..., ~ones], axis=-1))
    return np.stack(out, axis=-1)


def _max_log(r, sigma2, c):
    d2 = _sq_dist(r, c)
    out = []
    for q in range(c.k):
        ones = c.labels[:, q] == 1
        out.append(d2[..., ~ones].min(axis=-1) - d2[..., ones].min(axis=-1))
    return np.stack(out, axis=-1) / (2 * sigma2[..., None])


def llr_approx(r, sigma2, c: Constellation) -> np.ndarray:
    """Low-complexity bitwise LLRs.

    BPSK and QPSK use the exact linear expressions ``2x/sigma2`` and
    ``sqrt(2)x/sigma2``. 16-QAM uses the per-axis midpoint rule: the LLR is
    ``d_const/sigma2`` times the signed distance from the received coordinate
    to the boundary between the opposing bit decisions. 8-PSK has no closed
    form and falls back to max-log.
    """
    sigma2 = _check_sigma2(sigma2)
    r = np.asarray(r, dtype=complex)
    x, y = r.real, r.imag
    if c.name == "bpsk":
        return (2 * x / sigma2)[..., None]
    if c.name == "qpsk":
        g = np.sqrt(2) / sigma2
        return np.stack([g * x, g * y], axis=-1)
    if c.name == "qam16":
        a = 1 / np.sqrt(10)
        g = 2 * a / sigma2
        return np.stack([
            g * x,
            -g * (np.abs(x) - 2 * a),
            g * y,
            -g * (np.abs(y) - 2 * a),
        ], axis=-1)
    return _max_log(r, sigma2, c)


def weight_llr(lambdas, energy) -> LlrWord:
    """Scale unit-variance LLRs by the channel energy of their code word.

    ``energy`` broadcasts against the leading axes of ``lambdas``.
    """
    energy = np.asarray(energy, dtype=float)
    if np.any(energy < 0):
        raise ValueError("channel energy must be non-negative")
    lambdas = np.asarray(lambdas, dtype=float)
    return LlrWord(lambdas * energy[..., None], energy)
