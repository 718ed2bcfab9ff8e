"""Self-checks behind ``stbcsim verify``.

Each check returns a :class:`CheckResult`; sizes are kept small enough for
the whole suite to run in well under a minute.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

from . import fec
from .channel import complex_normal, draw_channels
from .constellation import CONSTELLATIONS, llr_approx, llr_exact, make_constellation
from .stbc import DESIGNS, combine, encode, orthogonality_defect


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def check_orthogonality(n=10_000, seed=0):
    rng = np.random.default_rng(seed)
    worst_defect = worst_err = 0.0
    for d in DESIGNS.values():
        S = complex_normal(rng, (n, d.n_syms))
        H = draw_channels(d.n_tx, 2, n, rng)
        worst_defect = max(worst_defect, float(orthogonality_defect(d, S).max()))
        est = combine(encode(S, d) @ H, H, d).estimates
        worst_err = max(worst_err, float(np.abs(est - S).max()))
    ok = worst_defect <= 1e-12 and worst_err <= 1e-9
    return CheckResult("orthogonality", ok,
                       f"max defect {worst_defect:.2e}, max recovery error {worst_err:.2e}")


def check_mrc_limit(draws=100_000, sigma2=0.1, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in DESIGNS.values():
        for n_rx in (1, 2):
            H = draw_channels(d.n_tx, n_rx, 1, rng)[0]
            S = np.exp(2j * np.pi * rng.random(d.n_syms))
            X = encode(S, d)
            R = X @ H + complex_normal(rng, (draws, d.l, n_rx), sigma2)
            out = combine(R, np.broadcast_to(H, (draws,) + H.shape), d, sigma2)
            per_dim = np.mean(np.abs(out.estimates - S) ** 2, axis=0) / 2
            snr = 1 / per_dim
            expected = np.sum(np.abs(H) ** 2) / sigma2
            worst = max(worst, float(np.max(np.abs(snr / expected - 1))))
    return CheckResult("mrc-limit", worst < 0.02, f"max relative SNR deviation {worst:.2%}")


def check_llr(n=100_000, seed=2):
    rng = np.random.default_rng(seed)
    mismatches = 0
    for name in CONSTELLATIONS:
        c = make_constellation(name)
        esn0 = 10 ** (rng.uniform(1.2, 2.4, n))
        sigma2 = 1 / (2 * esn0)
        r = rng.choice(c.points, n) + complex_normal(rng, n, 1.0) * np.sqrt(sigma2)
        ex, ap = llr_exact(r, sigma2, c), llr_approx(r, sigma2, c)
        mask = np.abs(ex) > 1e-9
        mismatches += int(np.count_nonzero(np.sign(ex[mask]) != np.sign(ap[mask])))
        if name == "qam16":
            small = np.abs(ex) < 1
            rel = np.abs(ap - ex)[small] / np.maximum(np.abs(ex[small]), 0.1)
            worst = float(rel.max())
    ok = mismatches == 0 and worst < 0.05
    return CheckResult("llr-oracle", ok,
                       f"{mismatches} sign mismatches, 16-QAM small-LLR error {worst:.2%}")


def _codebook(k_info):
    info = np.array(list(itertools.product((0, 1), repeat=k_info)), dtype=np.uint8)
    return info, 2.0 * fec.conv_encode(info) - 1.0


def check_viterbi(trials=1000, k_info=12, seed=3):
    rng = np.random.default_rng(seed)
    info, book = _codebook(k_info)
    llrs = rng.standard_normal((trials, book.shape[1]))
    best = info[np.argmax(llrs @ book.T, axis=1)]
    decoded = fec.viterbi_decode_soft(llrs)
    mismatches = int(np.count_nonzero(np.any(decoded != best, axis=1)))
    return CheckResult("viterbi-ml", mismatches == 0,
                       f"{mismatches}/{trials} differ from exhaustive search")


ALL_CHECKS = (check_orthogonality, check_mrc_limit, check_llr, check_viterbi)


def run_all():
    return [check() for check in ALL_CHECKS]
