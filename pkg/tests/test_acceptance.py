"""Exit criteria for the package, one test per criterion.

Every test reports a PASS/FAIL line through the ``report`` fixture; the
lines are repeated in the pytest terminal summary.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import norm

from stbcsim import fec
from stbcsim.channel import complex_normal, draw_channels
from stbcsim.constellation import CONSTELLATIONS, llr_approx, llr_exact, make_constellation
from stbcsim.harness import SimConfig, gap_at_ber, run_point, sweep
from stbcsim.stbc import (combine, design, encode, energy_loss_bound_db, max_rate_bound,
                          orthogonality_defect)

DESIGN_IDS = ["siso", "alamouti", "g3", "g4"]


def test_orthogonality_and_cancellation(report):
    rng = np.random.default_rng(101)
    n = 10_000
    worst_defect = worst_gram = worst_err = 0.0
    for id in ["alamouti", "g3", "g4"]:
        d = design(id)
        S = complex_normal(rng, (n, d.n_syms))
        G = encode(S, d)
        gram = np.einsum("nti,ntj->nij", G.conj(), G)
        target = np.sum(np.abs(S) ** 2, axis=1)[:, None, None] * np.eye(d.n_tx)
        worst_gram = max(worst_gram, float(np.abs(gram - target).max()))
        worst_defect = max(worst_defect, float(orthogonality_defect(d, S).max()))
        for n_rx in (1, 2):
            H = draw_channels(d.n_tx, n_rx, n, rng)
            est = combine(G @ H, H, d).estimates
            worst_err = max(worst_err, float(np.abs(est - S).max()))
    ok = worst_defect <= 1e-12 and worst_gram <= 1e-12 and worst_err <= 1e-9
    report(1, ok, f"defect {worst_defect:.1e} (<=1e-12), |GhG - sum|S|^2 I| {worst_gram:.1e}, "
                  f"noiseless recovery {worst_err:.1e} (<=1e-9)")
    assert ok


def test_mrc_limit(report):
    rng = np.random.default_rng(202)
    draws, sigma2 = 100_000, 0.25
    worst = 0.0
    for id in DESIGN_IDS:
        d = design(id)
        for n_rx in (1, 2):
            H = draw_channels(d.n_tx, n_rx, 1, rng)[0]
            S = np.exp(2j * np.pi * rng.random(d.n_syms))
            R = encode(S, d) @ H + complex_normal(rng, (draws, d.l, n_rx), sigma2)
            est = combine(R, np.broadcast_to(H, (draws,) + H.shape), d, sigma2).estimates
            noise_per_dim = np.mean(np.abs(est - S) ** 2, axis=0) / 2
            empirical = np.mean(np.abs(S) ** 2) / noise_per_dim
            expected = np.sum(np.abs(H) ** 2) / sigma2
            worst = max(worst, float(np.abs(empirical / expected - 1).max()))
    ok = worst < 0.02
    report(2, ok, f"max |SNR_emp / (sum|H|^2/sigma2) - 1| = {worst:.2%} (<2%) over 8 schemes")
    assert ok


def test_llr_approximation(report):
    """Draws: random transmitted point plus noise, Es/N0 uniform in [12, 24] dB."""
    rng = np.random.default_rng(303)
    n = 100_000
    mismatches = {}
    for name in CONSTELLATIONS:
        c = make_constellation(name)
        sigma2 = 1 / (2 * 10 ** (rng.uniform(12, 24, n) / 10))
        r = rng.choice(c.points, n) + complex_normal(rng, n, 1.0) * np.sqrt(sigma2)
        exact, approx = llr_exact(r, sigma2, c), llr_approx(r, sigma2, c)
        mask = np.abs(exact) > 1e-9
        mismatches[name] = int(np.count_nonzero(np.sign(exact[mask]) != np.sign(approx[mask])))
        if name == "qam16":
            small = np.abs(exact) < 1
            rel = np.abs(approx - exact)[small] / np.maximum(np.abs(exact[small]), 0.1)
            worst, n_small = float(rel.max()), int(small.sum())
    ok = sum(mismatches.values()) == 0 and worst <= 0.05
    report(3, ok, f"sign mismatches {mismatches}; 16-QAM small-LLR max rel. error "
                  f"{worst:.2e} (<=5%) on {n_small} values")
    assert ok


def test_viterbi_is_exhaustive_ml(report):
    k = 12
    rng = np.random.default_rng(404)
    info = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8)
    # independent shift-register encoder for the codebook
    taps = np.array([[1, 0, 1, 1, 0, 1, 1], [1, 1, 1, 1, 0, 0, 1]])
    padded = np.concatenate([np.zeros((len(info), 6), np.uint8), info,
                             np.zeros((len(info), 6), np.uint8)], axis=1)
    book = np.empty((len(info), 2 * (k + 6)))
    for t in range(k + 6):
        window = padded[:, t:t + 7][:, ::-1]
        book[:, 2 * t:2 * t + 2] = (window @ taps.T) % 2
    book = 2 * book - 1
    llrs = rng.standard_normal((1000, book.shape[1]))
    best = np.argmax(llrs @ book.T, axis=1)
    decoded = fec.viterbi_decode_soft(llrs)
    mismatches = int(np.count_nonzero(np.any(decoded != info[best], axis=1)))
    report(4, mismatches == 0, f"{mismatches}/1000 Viterbi outputs differ from exhaustive "
                               f"argmax over {len(info)} codewords")
    assert mismatches == 0


def test_awgn_bpsk(report):
    cfg = SimConfig(constellation="bpsk", channel="awgn", snr_grid_db=(0, 2, 4, 6, 8),
                    max_bits=50_000_000, target_errors=5000, seed=5)
    worst = 0.0
    for p in sweep(cfg):
        theory = norm.sf(math.sqrt(2 * 10 ** (p.snr_db / 10)))
        assert theory >= 1e-4
        worst = max(worst, abs(p.ber / theory - 1))
    ok = worst < 0.05
    report(5, ok, f"max |BER/Q(sqrt(2 SNR)) - 1| = {worst:.2%} (<5%) on 0..8 dB")
    assert ok


def _uncoded_gap(a_kw, b_kw, grid, target, seed):
    common = dict(decision="hard", fec="none", snr_grid_db=grid, max_bits=20_000_000,
                  target_errors=1000, seed=seed)
    a = sweep(SimConfig(**a_kw, **common))
    b = sweep(SimConfig(**b_kw, **common))
    assert min(p.bit_errors for p in a + b if p.ber >= target) >= 300
    return a, b


@pytest.mark.slow
def test_mrc_vs_alamouti_8psk(report):
    grid = tuple(range(14, 27))
    a, b = _uncoded_gap(dict(scheme="siso", n_rx=2, constellation="8psk"),
                        dict(scheme="alamouti", n_rx=1, constellation="8psk"), grid, 1e-3, 6)
    gap = gap_at_ber(a, b, 1e-3, abscissa="ebn0_db")
    ok = abs(gap - 3.0) <= 0.5
    report(6, ok, f"8-PSK MRC 1x2 vs Alamouti 2x1 gap at 1e-3: {gap:.2f} dB (3.0 +- 0.5)")
    assert ok


@pytest.mark.slow
def test_mrc_vs_g4_16qam(report):
    grid = tuple(range(10, 25))
    a, b = _uncoded_gap(dict(scheme="siso", n_rx=4, constellation="16qam"),
                        dict(scheme="g4", n_rx=1, constellation="16qam"), grid, 1e-3, 7)
    gap = gap_at_ber(a, b, 1e-3, abscissa="ebn0_db")
    snr_gap = gap_at_ber(a, b, 1e-3, abscissa="snr_db")
    ok = 5.0 <= gap <= 7.0
    report(7, ok, f"16-QAM MRC 1x4 vs G4 4x1 gap at 1e-3: {gap:.2f} dB in Eb/N0 "
                  f"(in [5, 7]); {snr_gap:.2f} dB in per-antenna SNR")
    assert ok


def _coded_curve(cfg, start, step, target, max_points=40):
    """Ascend the SNR grid until the BER is well below ``target``."""
    points = []
    for i in range(max_points):
        p = run_point(cfg, start + i * step, point_index=i)
        points.append(p)
        if p.ber < target / 4:
            return points
    raise AssertionError(f"{cfg.decision} curve never fell below {target}")


@pytest.mark.slow
@pytest.mark.parametrize("scheme,fec_mode", [("alamouti", "conv"), ("g4", "conv-p23")])
def test_soft_vs_hard_coded_16qam(scheme, fec_mode, report):
    target = 1e-4
    curves = {}
    for decision in ("soft", "hard-energy", "hard"):
        cfg = SimConfig(scheme=scheme, n_rx=2, constellation="16qam", decision=decision,
                        fec=fec_mode, max_bits=10_000_000, target_errors=300, seed=8)
        curves[cfg.decision] = _coded_curve(cfg, 4.0, 0.5, target)
    soft_hard = gap_at_ber(curves["soft"], curves["hard"], target, "ebn0_db")
    soft_energy = gap_at_ber(curves["soft"], curves["hard_energy"], target, "ebn0_db")
    energy_hard = gap_at_ber(curves["hard_energy"], curves["hard"], target, "ebn0_db")
    ok = soft_hard >= 2.0 and soft_energy > 0 and energy_hard > 0
    report(8, ok, f"{scheme} 2 rx {fec_mode}: soft vs hard {soft_hard:.2f} dB (>=2.0); "
                  f"energy scaling gains {energy_hard:.2f} dB, soft gains a further "
                  f"{soft_energy:.2f} dB at BER 1e-4")
    assert ok


def test_analytic_bounds(report):
    rates = [max_rate_bound(n) for n in (2, 3, 4, 5)]
    losses = [round(energy_loss_bound_db(n), 2) for n in (1, 2, 4)]
    ok = (rates == [1, Fraction(3, 4), Fraction(3, 4), Fraction(2, 3)]
          and losses == [0.0, -3.01, -6.02])
    report(9, ok, f"rate bounds {[str(r) for r in rates]}, energy bounds {losses} dB")
    assert ok


def test_determinism(report):
    configs = [
        dict(scheme="g3", n_rx=2, constellation="8psk", fec="conv",
             snr_grid_db=(2, 4, 6), max_bits=300_000, target_errors=300),
        dict(scheme="alamouti", n_rx=1, constellation="16qam",
             snr_grid_db=(5, 10, 15, 20), max_bits=2_000_000, target_errors=500),
    ]
    identical = True
    for kw in configs:
        runs = [sweep(SimConfig(seed=77, shards=3, workers=w, **kw)) for w in (1, 1, 3)]
        counts = [[(p.bits_sent, p.bit_errors) for p in run] for run in runs]
        identical &= counts[0] == counts[1] == counts[2]
    report(10, identical, "repeated sweeps (seed 77, 3 shards, 1 or 3 workers) give identical "
                          "(bits, errors) per point")
    assert identical
