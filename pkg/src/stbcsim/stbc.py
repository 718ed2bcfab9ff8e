"""Orthogonal space-time block designs for one to four transmit antennas.

A design is an ``l x n_tx`` table whose cells name a signed, possibly
conjugated information symbol (or are empty). Received samples follow
``R = G H + W`` with ``G`` the evaluated table, ``H`` the ``n_tx x n_rx``
channel and ``W`` white noise.

The combiners are the closed-form minimum variance unbiased estimators for
each design. Every estimate is normalised by the channel energy
``sum |H_ij|**2``, which is also the weight the bit LLRs must carry into the
convolutional decoder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateChannelError

__all__ = [
    "Cell",
    "OrthogonalDesign",
    "CombinerOutput",
    "DESIGNS",
    "design",
    "encode",
    "channel_energy",
    "combine",
    "combined_snr",
    "max_rate_bound",
    "energy_loss_bound_db",
    "energy_fraction",
    "received_energy_per_slot",
    "orthogonality_defect",
]


class Cell(NamedTuple):
    symbol: int  # 1-based symbol index
    conj: bool
    sign: int


def _c(spec: str) -> Cell | None:
    """Parse a cell like ``"-2*"`` (minus conjugate of S2) or ``"0"``."""
    if spec == "0":
        return None
    sign = -1 if spec.startswith("-") else 1
    body = spec.lstrip("+-")
    conj = body.endswith("*")
    return Cell(int(body.rstrip("*")), conj, sign)


@dataclass(frozen=True)
class OrthogonalDesign:
    id: str
    n_tx: int
    n_syms: int
    entries: tuple

    @property
    def l(self) -> int:
        return len(self.entries)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.n_syms, self.l)

    def __str__(self):
        def fmt(cell):
            if cell is None:
                return "0"
            return f"{'-' if cell.sign < 0 else ''}S{cell.symbol}{'*' if cell.conj else ''}"

        rows = ["  ".join(f"{fmt(c):>5}" for c in row) for row in self.entries]
        return f"{self.id} ({self.l}x{self.n_tx}, rate {self.rate})\n" + "\n".join(rows)


def _table(rows):
    return tuple(tuple(_c(s) for s in row.split()) for row in rows)


DESIGNS = {
    "siso": OrthogonalDesign("siso", 1, 1, _table(["1"])),
    "alamouti": OrthogonalDesign("alamouti", 2, 2, _table([
        "1 2",
        "-2* 1*",
    ])),
    "g3": OrthogonalDesign("g3", 3, 3, _table([
        "1 2 3",
        "-2* 1* 0",
        "-3* 0 1*",
        "0 -3* 2*",
    ])),
    # The entries at (2, 2) and (4, 4) are fixed by the combiner: S1 is
    # conjugated in slot 2 and plain in slot 4.
    "g4": OrthogonalDesign("g4", 4, 3, _table([
        "1 2 3 0",
        "-2* 1* 0 3",
        "-3* 0 1* -2",
        "0 -3* 2* 1",
    ])),
}


def design(id: str) -> OrthogonalDesign:
    try:
        return DESIGNS[id]
    except KeyError:
        raise ConfigError(f"unknown design {id!r}; expected one of {sorted(DESIGNS)}") from None


def encode(S, d: OrthogonalDesign) -> np.ndarray:
    """Evaluate the design table for symbol vectors ``S`` of shape (..., n_syms).

    Returns an array of shape (..., l, n_tx).
    """
    S = np.asarray(S, dtype=complex)
    if S.ndim == 0 or S.shape[-1] != d.n_syms:
        raise ValueError(f"{d.id} expects {d.n_syms} symbols per code word, got shape {S.shape}")
    G = np.zeros(S.shape[:-1] + (d.l, d.n_tx), dtype=complex)
    for t, row in enumerate(d.entries):
        for i, cell in enumerate(row):
            if cell is None:
                continue
            s = S[..., cell.symbol - 1]
            G[..., t, i] = cell.sign * (np.conj(s) if cell.conj else s)
    return G


def channel_energy(H) -> np.ndarray | float:
    """Sum of ``|H_ij|**2`` over the last two axes."""
    H = np.asarray(H)
    return np.sum(np.abs(H) ** 2, axis=(-2, -1))


@dataclass(frozen=True)
class CombinerOutput:
    """Symbol estimates of one (or a batch of) code words.

    ``post_sigma2`` is the residual noise variance per real dimension of
    every estimate.
    """

    estimates: np.ndarray
    energy: np.ndarray | float
    post_sigma2: np.ndarray | float


def _siso(R, H):
    return [np.sum(R[..., 0, :] * np.conj(H[..., 0, :]), axis=-1)]


def _alamouti(R, H):
    r0, r1c = R[..., 0, :], np.conj(R[..., 1, :])
    h1, h2 = H[..., 0, :], H[..., 1, :]
    s1 = r0 * np.conj(h1) + r1c * h2
    s2 = r0 * np.conj(h2) - r1c * h1
    return [np.sum(s, axis=-1) for s in (s1, s2)]


def _g3(R, H):
    r0 = R[..., 0, :]
    r1c, r2c, r3c = (np.conj(R[..., t, :]) for t in (1, 2, 3))
    h1, h2, h3 = H[..., 0, :], H[..., 1, :], H[..., 2, :]
    s1 = r0 * np.conj(h1) + r1c * h2 + r2c * h3
    s2 = r0 * np.conj(h2) - r1c * h1 + r3c * h3
    s3 = r0 * np.conj(h3) - r2c * h1 - r3c * h2
    return [np.sum(s, axis=-1) for s in (s1, s2, s3)]


def _g4(R, H):
    r0, r1, r2, r3 = (R[..., t, :] for t in range(4))
    h1, h2, h3, h4 = (H[..., i, :] for i in range(4))
    s1 = r0 * np.conj(h1) + np.conj(r1) * h2 + np.conj(r2) * h3 + r3 * np.conj(h4)
    s2 = r0 * np.conj(h2) - np.conj(r1) * h1 - r2 * np.conj(h4) + np.conj(r3) * h3
    s3 = r0 * np.conj(h3) + r1 * np.conj(h4) - np.conj(r2) * h1 - np.conj(r3) * h2
    return [np.sum(s, axis=-1) for s in (s1, s2, s3)]


_COMBINERS = {"siso": _siso, "alamouti": _alamouti, "g3": _g3, "g4": _g4}


def combine(R, H, d: OrthogonalDesign, sigma2: float = 0.0) -> CombinerOutput:
    """Soft-decision combiner for design ``d``.

    Parameters
    ----------
    R : array_like, shape (..., l, n_rx)
        Received samples of one code word per leading index.
    H : array_like, shape (..., n_tx, n_rx)
        Channel, constant over the code word.
    d : OrthogonalDesign
    sigma2 : float
        Noise variance per real dimension of ``R``; only used to fill in
        ``post_sigma2``.

    Raises
    ------
    DegenerateChannelError
        If any code word sees a channel with zero energy.
    """
    R = np.asarray(R, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if R.ndim < 2 or R.shape[-2] != d.l:
        raise ValueError(f"{d.id} expects {d.l} received slots, got shape {R.shape}")
    if H.ndim < 2 or H.shape[-2] != d.n_tx or H.shape[-1] != R.shape[-1]:
        raise ValueError(f"channel shape {H.shape} does not match {d.n_tx} tx antennas "
                         f"and {R.shape[-1]} rx antennas")
    energy = channel_energy(H)
    if np.any(energy <= 0):
        raise DegenerateChannelError("channel energy is zero")
    raw = _COMBINERS[d.id](R, H)
    estimates = np.stack(raw, axis=-1) / np.asarray(energy)[..., None]
    return CombinerOutput(estimates, energy, sigma2 / energy)


def combined_snr(H, sigma2: float):
    """Compound SNR ``sum |H_ij|**2 / sigma2`` reached by each estimate."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    return channel_energy(H) / sigma2


def _check_ntx(n_tx):
    if n_tx < 1:
        raise ValueError("n_tx must be at least 1")


def max_rate_bound(n_tx: int) -> Fraction:
    """Largest rate of an orthogonal complex design on ``n_tx`` antennas."""
    _check_ntx(n_tx)
    m = math.ceil(n_tx / 2)
    return Fraction(m + 1, 2 * m)


def energy_loss_bound_db(n_tx: int) -> float:
    """Upper bound on combined symbol energy relative to MRC at equal diversity."""
    _check_ntx(n_tx)
    return 10 * math.log10(1 / n_tx)


def energy_fraction(d: OrthogonalDesign) -> Fraction:
    """Fraction of the MRC symbol energy collected by the combiner of ``d``.

    Each estimate keeps one of the ``n_syms`` symbol energies sharing a
    slot, and the code rate spreads them over ``l`` slots.
    """
    return d.rate / d.n_syms


def received_energy_per_slot(d: OrthogonalDesign) -> Fraction:
    """Mean received signal power per rx antenna and slot.

    Assumes unit-energy symbols in every non-empty cell and a unit-power
    Rayleigh channel.
    """
    active = sum(cell is not None for row in d.entries for cell in row)
    return Fraction(active, d.l)


def orthogonality_defect(d: OrthogonalDesign, S) -> float:
    """Deviation of ``G^H G`` from ``sum |S_k|**2 * I``."""
    G = encode(S, d)
    gram = np.conj(np.swapaxes(G, -1, -2)) @ G
    power = np.sum(np.abs(np.asarray(S)) ** 2, axis=-1)
    eye = np.eye(d.n_tx, dtype=bool)
    off = np.abs(gram[..., ~eye]).max(axis=-1) if d.n_tx > 1 else np.zeros_like(power)
    diag = np.abs(np.diagonal(gram, axis1=-2, axis2=-1) - power[..., None]).max(axis=-1)
    return off + diag
