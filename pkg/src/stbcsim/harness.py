"""Monte-Carlo BER simulation of the full soft-decision receive chain.

One frame is one FEC codeword::

    info bits -> conv encode -> [puncture] -> interleave -> Gray map
      -> STBC encode -> Rayleigh block channel + noise -> combine
      -> demap (hard / hard+energy / soft LLR x energy)
      -> deinterleave -> [depuncture] -> Viterbi -> bit errors

Without FEC the frame is just ``interleaver_len`` uncoded bits and errors
are counted at the demodulator output.

SNR convention: every non-empty cell of the design carries a unit-energy
symbol, so the mean received power per rx antenna and slot is
``E_rx = active cells / l``. The noise variance per real dimension is
``sigma2 = E_rx / (2 * SNR)``, i.e. ``SNR`` is the average signal-to-noise
ratio seen by one receive antenna with the complex noise power ``2 sigma2``.
"""

from __future__ import annotations

import csv
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fec
from .channel import NoiseSpec, apply, draw_channels, make_streams
from .constellation import (demap_hard, llr_approx, llr_exact, make_constellation,
                            map_bits, weight_llr)
from .errors import ConfigError, GapRangeError
from .stbc import combine, design, encode, received_energy_per_slot

__all__ = [
    "SimConfig",
    "BerPoint",
    "CSV_FIELDS",
    "SweepIOError",
    "run_point",
    "sweep",
    "ebn0_of",
    "sigma2_of",
    "fec_rate",
    "gap_at_ber",
    "write_csv",
    "read_csv",
]

log = logging.getLogger(__name__)

DECISIONS = ("hard", "hard_energy", "soft")
FECS = ("none", "conv_r12", "conv_punct_r23")
CHANNELS = ("rayleigh", "awgn")

# external (CLI / CSV) spellings
_DECISION_NAMES = {"hard": "hard", "hard_energy": "hard-energy", "soft": "soft"}
_FEC_NAMES = {"none": "none", "conv_r12": "conv", "conv_punct_r23": "conv-p23"}
_MOD_NAMES = {"bpsk": "bpsk", "qpsk": "qpsk", "psk8": "8psk", "qam16": "16qam"}

CSV_FIELDS = ("snr_db", "ebn0_db", "bits", "errors", "ber", "scheme", "nrx", "mod",
              "decision", "fec", "seed", "wallclock_s")

# bits simulated per batch, bounding peak memory
_BATCH_BITS = 1 << 19


def _canonical(value, allowed, aliases, what):
    inverse = {v: k for k, v in aliases.items()}
    value = inverse.get(value, value)
    if value not in allowed:
        raise ConfigError(f"unknown {what} {value!r}")
    return value


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulated link.

    ``snr_grid_db`` is the average received SNR per rx antenna. Construction
    normalises CLI spellings (``8psk``, ``hard-energy``, ``conv-p23``) to the
    internal names and raises :class:`ConfigError` on anything invalid.
    """

    scheme: str = "siso"
    n_rx: int = 1
    constellation: str = "qpsk"
    decision: str = "soft"
    fec: str = "none"
    snr_grid_db: tuple = ()
    max_bits: int = 10_000_000
    target_errors: int = 300
    seed: int = 0
    interleaver_len: int = 4200
    channel: str = "rayleigh"
    noise: bool = True
    llr: str = "approx"
    shards: int = 1
    workers: int = 1

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("constellation", _canonical(self.constellation, ("bpsk", "qpsk", "psk8", "qam16"),
                                         _MOD_NAMES, "constellation"))
        set_("decision", _canonical(self.decision, DECISIONS, _DECISION_NAMES, "decision mode"))
        set_("fec", _canonical(self.fec, FECS, _FEC_NAMES, "FEC mode"))
        design(self.scheme)
        if self.channel not in CHANNELS:
            raise ConfigError(f"unknown channel model {self.channel!r}")
        if self.llr not in ("approx", "exact"):
            raise ConfigError(f"unknown LLR method {self.llr!r}")
        if self.llr == "exact" and not self.noise:
            raise ConfigError("exact LLRs need a noisy channel")
        if self.n_rx < 1:
            raise ConfigError("n_rx must be at least 1")
        grid = tuple(float(x) for x in self.snr_grid_db)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("SNR grid must be strictly increasing")
        set_("snr_grid_db", grid)
        if self.max_bits < 1 or self.target_errors < 1:
            raise ConfigError("stop criteria must be positive")
        if self.shards < 1 or self.workers < 1:
            raise ConfigError("shards and workers must be positive")
        n = self.interleaver_len
        if self.fec == "conv_r12" and (n % 2 or n // 2 <= fec.MEMORY):
            raise ConfigError("interleaver length must be an even coded length for rate 1/2")
        if self.fec == "conv_punct_r23" and (n % 6 or 2 * n // 3 <= 2 * fec.MEMORY):
            raise ConfigError("interleaver length must be a multiple of 6 for rate 2/3")
        if self.target_errors < 100:
            warnings.warn("target_errors below 100 gives statistically weak points",
                          stacklevel=3)

    @property
    def info_bits_per_frame(self) -> int:
        n = self.interleaver_len
        if self.fec == "none":
            return n
        mother = n if self.fec == "conv_r12" else 4 * n // 3
        return fec.info_length(mother)

    def describe(self) -> dict:
        return {"scheme": self.scheme, "nrx": self.n_rx,
                "mod": _MOD_NAMES[self.constellation],
                "decision": _DECISION_NAMES[self.decision],
                "fec": _FEC_NAMES[self.fec], "seed": self.seed}


@dataclass
class BerPoint:
    snr_db: float
    ebn0_db: float
    bits_sent: int
    bit_errors: int
    wallclock: float = 0.0
    # measured mean received signal power per rx antenna over 2 sigma2, dB
    measured_snr_db: float = float("nan")

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0


def fec_rate(cfg: SimConfig) -> float:
    return {"none": 1.0, "conv_r12": 0.5, "conv_punct_r23": 2 / 3}[cfg.fec]


def ebn0_of(snr_db: float, cfg: SimConfig) -> float:
    """Eb/N0 (dB) per rx antenna for the configured modulation and code rates."""
    k = make_constellation(cfg.constellation).k
    bits_per_use = k * float(design(cfg.scheme).rate) * fec_rate(cfg)
    return snr_db - 10 * math.log10(bits_per_use)


def sigma2_of(snr_db: float, cfg: SimConfig) -> float:
    """Noise variance per real dimension giving ``snr_db`` per rx antenna."""
    e_rx = float(received_energy_per_slot(design(cfg.scheme)))
    return e_rx / (2 * 10 ** (snr_db / 10))


class _Link:
    """Per-shard transmit/receive chain; owns the streams of one shard."""

    def __init__(self, cfg: SimConfig, snr_db: float, streams):
        self.cfg = cfg
        self.d = design(cfg.scheme)
        self.c = make_constellation(cfg.constellation)
        self.streams = streams
        self.sigma2 = sigma2_of(snr_db, cfg)
        self.noise = NoiseSpec(self.sigma2) if cfg.noise else None
        self.k_info = cfg.info_bits_per_frame
        self.n_coded = cfg.interleaver_len
        self.n_sym = -(-self.n_coded // self.c.k)
        self.n_words = -(-self.n_sym // self.d.n_syms)
        self.interleaver = None
        if cfg.fec != "none":
            # one permutation per run, shared by all points and shards
            rng = make_streams(cfg.seed).bits
            self.interleaver = fec.Interleaver.random(self.n_coded, rng)

    def transmit(self, info):
        if self.cfg.fec == "none":
            return info
        coded = fec.conv_encode(info)
        if self.cfg.fec == "conv_punct_r23":
            coded = fec.puncture(coded)
        return self.interleaver.interleave(coded)

    def run_frames(self, n_frames):
        cfg, d, c = self.cfg, self.d, self.c
        info = self.streams.bits.integers(0, 2, (n_frames, self.k_info), dtype=np.uint8)
        coded = self.transmit(info)

        pad_bits = self.n_sym * c.k - self.n_coded
        bits = np.pad(coded, ((0, 0), (0, pad_bits)))
        symbols = map_bits(bits.reshape(n_frames, self.n_sym, c.k), c)
        symbols = np.pad(symbols, ((0, 0), (0, self.n_words * d.n_syms - self.n_sym)))
        words = symbols.reshape(n_frames * self.n_words, d.n_syms)

        x = encode(words, d)
        if cfg.channel == "awgn":
            h = np.ones((len(words), d.n_tx, cfg.n_rx), dtype=complex)
        else:
            h = draw_channels(d.n_tx, cfg.n_rx, len(words), self.streams.channel)
        clean = x @ h
        r = apply(x, h, self.noise, self.streams.noise)
        out = combine(r, h, d, self.sigma2)

        est = out.estimates.reshape(n_frames, -1)[:, : self.n_sym]
        energy = np.repeat(out.energy, d.n_syms).reshape(n_frames, -1)[:, : self.n_sym]
        received = self._demodulate(est, energy, out.post_sigma2)
        received = received.reshape(n_frames, -1)[:, : self.n_coded]

        if cfg.fec == "none":
            decided = received > 0
        else:
            llrs = self.interleaver.deinterleave(received)
            if cfg.fec == "conv_punct_r23":
                llrs = fec.depuncture(llrs)
            decided = fec.viterbi_decode_soft(llrs)
        errors = int(np.count_nonzero(decided != info))
        return info.size, errors, float(np.sum(np.abs(clean) ** 2)), clean.size

    def _demodulate(self, est, energy, post_sigma2):
        """Per-bit decoder input with the sign convention ``positive <=> 1``."""
        cfg, c = self.cfg, self.c
        if cfg.decision in ("hard", "hard_energy"):
            bits = demap_hard(est, c)
            w = energy[..., None] if cfg.decision == "hard_energy" else None
            return fec.hard_llrs(bits, w)
        if cfg.llr == "exact":
            post = np.repeat(post_sigma2, self.d.n_syms).reshape(est.shape[0], -1)
            return llr_exact(est, post[:, : self.n_sym], c)
        return weight_llr(llr_approx(est, 1.0, c), energy).lambdas


def _frames_per_batch(cfg):
    return max(1, _BATCH_BITS // cfg.interleaver_len)


def _run_shard(cfg: SimConfig, snr_db: float, point_index: int, shard: int):
    link = _Link(cfg, snr_db, make_streams(cfg.seed, point_index, shard))
    max_bits = -(-cfg.max_bits // cfg.shards)
    target = -(-cfg.target_errors // cfg.shards)
    bits = errors = 0
    power = 0.0
    samples = 0
    batch = _frames_per_batch(cfg)
    while bits < max_bits and errors < target:
        remaining = -(-(max_bits - bits) // link.k_info)
        b, e, p, n = link.run_frames(min(batch, remaining))
        bits += b
        errors += e
        power += p
        samples += n
    return bits, errors, power, samples


def run_point(cfg: SimConfig, snr_db: float, point_index: int = 0) -> BerPoint:
    """Simulate one SNR point until ``target_errors`` or ``max_bits`` is reached.

    The point is split into ``cfg.shards`` independent shards whose streams
    derive from ``(seed, point_index, shard)``; results depend only on those,
    not on ``cfg.workers``.
    """
    start = time.perf_counter()
    args = [(cfg, snr_db, point_index, s) for s in range(cfg.shards)]
    if cfg.workers > 1 and cfg.shards > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, cfg.shards)) as pool:
            results = list(pool.map(_run_shard, *zip(*args)))
    else:
        results = [_run_shard(*a) for a in args]
    bits = sum(r[0] for r in results)
    errors = sum(r[1] for r in results)
    power = sum(r[2] for r in results)
    samples = sum(r[3] for r in results)
    measured = float("nan")
    if cfg.noise and samples:
        measured = 10 * math.log10(power / samples / (2 * sigma2_of(snr_db, cfg)))
    point = BerPoint(snr_db, ebn0_of(snr_db, cfg), bits, errors,
                     time.perf_counter() - start, measured)
    if cfg.noise and abs(measured - snr_db) > 10 * math.log10(1.01):
        log.warning("measured SNR %.3f dB deviates from configured %.3f dB", measured, snr_db)
    log.info("%s snr=%.2f dB bits=%d errors=%d ber=%.3e", cfg.scheme, snr_db, bits, errors,
             point.ber)
    return point


class SweepIOError(OSError):
    """Writing the CSV failed; ``points`` holds everything simulated so far."""

    def __init__(self, msg, points):
        super().__init__(msg)
        self.points = points


def _fmt(x):
    return format(x, ".12g")


def _row(point: BerPoint, cfg: SimConfig):
    row = {"snr_db": _fmt(point.snr_db), "ebn0_db": _fmt(point.ebn0_db),
           "bits": point.bits_sent, "errors": point.bit_errors, "ber": _fmt(point.ber)}
    row.update(cfg.describe())
    row["wallclock_s"] = _fmt(round(point.wallclock, 3))
    return row


def write_csv(path, points, cfg: SimConfig):
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, CSV_FIELDS)
        writer.writeheader()
        for p in points:
            writer.writerow(_row(p, cfg))


def read_csv(path) -> list[BerPoint]:
    with open(path, newline="") as f:
        return [BerPoint(float(r["snr_db"]), float(r["ebn0_db"]), int(r["bits"]),
                         int(r["errors"]), float(r["wallclock_s"]))
                for r in csv.DictReader(f)]


def _warn_non_monotone(points):
    for a, b in zip(points, points[1:]):
        if b.ber > a.ber and b.bits_sent >= 100_000:
            log.warning("BER rises from %.3e to %.3e between %.2f and %.2f dB "
                        "(statistical floor?)", a.ber, b.ber, a.snr_db, b.snr_db)


def sweep(cfg: SimConfig, out: str | Path | None = None) -> list[BerPoint]:
    """Run every grid point, streaming rows to ``out`` as they finish.

    Raises
    ------
    SweepIOError
        On a write failure; the exception carries the finished points.
    """
    points = []
    f = writer = None
    try:
        if out is not None:
            try:
                f = open(out, "w", newline="")
                writer = csv.DictWriter(f, CSV_FIELDS)
                writer.writeheader()
                f.flush()
            except OSError as exc:
                raise SweepIOError(f"cannot write {out}: {exc}", points) from exc
        for i, snr in enumerate(cfg.snr_grid_db):
            point = run_point(cfg, snr, i)
            points.append(point)
            if writer is not None:
                try:
                    writer.writerow(_row(point, cfg))
                    f.flush()
                except OSError as exc:
                    raise SweepIOError(f"cannot write {out}: {exc}", points) from exc
    finally:
        if f is not None:
            f.close()
    _warn_non_monotone(points)
    return points


def _crossing(points, target, abscissa):
    pts = sorted(points, key=lambda p: getattr(p, abscissa))
    for a, b in zip(pts, pts[1:]):
        if a.ber >= target >= b.ber and b.ber > 0 and a.ber > 0:
            xa, xb = getattr(a, abscissa), getattr(b, abscissa)
            ya, yb = math.log10(a.ber), math.log10(b.ber)
            if ya == yb:
                return xa
            return xa + (math.log10(target) - ya) * (xb - xa) / (yb - ya)
    raise GapRangeError(f"curve does not bracket BER {target:g}")


def gap_at_ber(curve_a, curve_b, target_ber: float, abscissa: str = "snr_db") -> float:
    """Horizontal distance (dB) from ``curve_a`` to ``curve_b`` at ``target_ber``.

    Positive when ``curve_b`` needs more SNR. ``abscissa`` is ``"snr_db"`` or
    ``"ebn0_db"``; the crossing is found by interpolating ``log10(BER)``
    linearly in dB between the first bracketing pair of points.
    """
    if abscissa not in ("snr_db", "ebn0_db"):
        raise ValueError(f"unknown abscissa {abscissa!r}")
    return _crossing(curve_b, target_ber, abscissa) - _crossing(curve_a, target_ber, abscissa)
