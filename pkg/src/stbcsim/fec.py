"""Rate-1/2 memory-6 convolutional code, puncturing, interleaving, Viterbi.

The encoder uses the generators 133 and 171 (octal) and is terminated with
six zero tail bits. Coded bits are emitted in stream order ``g0, g1`` per
input bit. The rate-2/3 puncturer applies the pattern
``[[1, 1], [1, 0]]`` column-cyclically, i.e. it drops the ``g1`` output of
every second input bit. Depuncturing inserts zero LLRs (erasures).

The decoders maximise the signed LLR metric ``sum_q sgn(c_q) * lambda_q``
over all codewords, which is the maximum likelihood codeword when the LLRs
are weighted by their channel energies. All functions work on batches: the
coded axis is last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MEMORY",
    "GENERATORS",
    "N_STATES",
    "PUNCTURE_PATTERN",
    "Interleaver",
    "conv_encode",
    "coded_length",
    "info_length",
    "puncture",
    "depuncture",
    "hard_llrs",
    "codeword_metric",
    "viterbi_decode_soft",
    "viterbi_decode_hard",
]

MEMORY = 6
GENERATORS = (0o133, 0o171)
N_STATES = 1 << MEMORY
PUNCTURE_PATTERN = np.array([[1, 1], [1, 0]], dtype=np.uint8)

# keep-mask over one period (two input bits) of the coded stream g0,g1,g0,g1
_KEEP = PUNCTURE_PATTERN.T.ravel().astype(bool)


def _parity(x):
    return bin(x).count("1") & 1


def _taps(g):
    # delay d taps the input d steps back; bit 6 of the generator is delay 0
    return [d for d in range(MEMORY + 1) if (g >> (MEMORY - d)) & 1]


_TAPS = tuple(_taps(g) for g in GENERATORS)


def _build_trellis():
    # the state holds the last six inputs, most recent in bit 5
    ns = np.arange(N_STATES)
    u = ns >> (MEMORY - 1)
    pred = np.stack([((ns & (N_STATES // 2 - 1)) << 1) | b for b in (0, 1)])
    reg = (u << MEMORY) | pred
    out = np.array([[[_parity(r & g) for r in row] for row in reg] for g in GENERATORS])
    # out[g, b, ns] -> antipodal form
    return pred, 2.0 * out - 1.0


_PRED, _SIGNS = _build_trellis()


def coded_length(k_info: int) -> int:
    return 2 * (k_info + MEMORY)


def info_length(n_coded: int) -> int:
    if n_coded % 2 or n_coded < 2 * MEMORY:
        raise ValueError(f"{n_coded} is not a terminated rate-1/2 codeword length")
    return n_coded // 2 - MEMORY


def conv_encode(info) -> np.ndarray:
    """Encode information bits (..., K) into terminated codewords (..., 2(K+6))."""
    info = np.asarray(info, dtype=np.uint8)
    padded = np.concatenate(
        [info, np.zeros(info.shape[:-1] + (MEMORY,), dtype=np.uint8)], axis=-1)
    n = padded.shape[-1]
    out = np.zeros(padded.shape[:-1] + (n, 2), dtype=np.uint8)
    for j, taps in enumerate(_TAPS):
        for d in taps:
            out[..., d:, j] ^= padded[..., : n - d]
    return out.reshape(padded.shape[:-1] + (2 * n,))


def puncture(coded) -> np.ndarray:
    """Drop every fourth coded bit (the second ``g1`` bit of each period)."""
    coded = np.asarray(coded)
    n = coded.shape[-1]
    if n % 4:
        raise ValueError("punctured stream length must be a multiple of 4")
    return coded[..., np.tile(_KEEP, n // 4)]


def depuncture(llrs) -> np.ndarray:
    """Re-insert zero LLRs at the punctured positions.

    Accepts a punctured stream (..., 3n) or an :class:`LlrWord`.
    """
    llrs = np.asarray(getattr(llrs, "lambdas", llrs), dtype=float)
    n = llrs.shape[-1]
    if n % 3:
        raise ValueError("punctured stream length must be a multiple of 3")
    keep = np.tile(_KEEP, n // 3)
    out = np.zeros(llrs.shape[:-1] + (keep.size,))
    out[..., keep] = llrs
    return out


@dataclass(frozen=True, eq=False)
class Interleaver:
    """A fixed random permutation of ``length`` positions."""

    permutation: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.permutation)
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("permutation must be a bijection on 0..N-1")
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(perm.size)
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "_inverse", inverse)

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "Interleaver":
        return cls(rng.permutation(length))

    @classmethod
    def identity(cls, length: int) -> "Interleaver":
        return cls(np.arange(length))

    @property
    def length(self) -> int:
        return self.permutation.size

    def _check(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.length:
            raise ValueError(f"interleaver length {self.length} does not match input {x.shape[-1]}")
        return x

    def interleave(self, bits) -> np.ndarray:
        return self._check(bits)[..., self.permutation]

    def deinterleave(self, llrs) -> np.ndarray:
        return self._check(llrs)[..., self._inverse]


def hard_llrs(bits, weights=None) -> np.ndarray:
    """Map hard bits onto {-1, +1}, optionally scaled by per-bit channel energy."""
    out = 2.0 * np.asarray(bits, dtype=float) - 1.0
    if weights is not None:
        out *= weights
    return out


def codeword_metric(llrs, cw) -> np.ndarray | float:
    """Signed sum ``sum sgn(c_q) lambda_q`` for codewords in antipodal form."""
    llrs = np.asarray(llrs, dtype=float)
    cw = np.asarray(cw)
    if llrs.shape[-1] != cw.shape[-1]:
        raise ValueError("LLR stream and codeword lengths differ")
    return np.sum(np.sign(cw) * llrs, axis=-1)


def viterbi_decode_soft(llrs) -> np.ndarray:
    """Maximum likelihood decoding of terminated codewords from bit LLRs.

    Parameters
    ----------
    llrs : array_like, shape (..., 2(K+6))
        Depunctured, deinterleaved LLRs, positive favouring bit 1.

    Returns
    -------
    ndarray of uint8, shape (..., K)
    """
    llrs = np.asarray(getattr(llrs, "lambdas", llrs), dtype=float)
    lead = llrs.shape[:-1]
    k_info = info_length(llrs.shape[-1])
    steps = k_info + MEMORY
    lam = llrs.reshape(-1, steps, 2)
    batch = lam.shape[0]

    metric = np.full((batch, N_STATES), -np.inf)
    metric[:, 0] = 0.0
    decisions = np.empty((steps, batch, N_STATES), dtype=bool)
    p0, p1 = _PRED
    s0, s1 = _SIGNS[0], _SIGNS[1]
    for t in range(steps):
        l0 = lam[:, t, 0:1]
        l1 = lam[:, t, 1:2]
        m0 = metric[:, p0] + l0 * s0[0] + l1 * s1[0]
        m1 = metric[:, p1] + l0 * s0[1] + l1 * s1[1]
        # ties keep the lower-numbered predecessor
        choose1 = m1 > m0
        decisions[t] = choose1
        metric = np.where(choose1, m1, m0)

    rows = np.arange(batch)
    state = np.zeros(batch, dtype=np.int64)
    out = np.empty((batch, steps), dtype=np.uint8)
    half = N_STATES // 2 - 1
    for t in range(steps - 1, -1, -1):
        out[:, t] = state >> (MEMORY - 1)
        b = decisions[t, rows, state]
        state = ((state & half) << 1) | b
    return out[:, :k_info].reshape(lead + (k_info,))


def viterbi_decode_hard(bits, weights=None) -> np.ndarray:
    """Decode hard bit decisions.

    Without ``weights`` this is minimum Hamming distance decoding. With
    per-bit channel energies the antipodal bits are scaled before entering
    the soft trellis.
    """
    return viterbi_decode_soft(hard_llrs(bits, weights))
