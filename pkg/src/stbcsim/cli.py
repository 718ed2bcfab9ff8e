"""Command line entry point: ``stbcsim simulate | gap | verify``.

Exit codes: 0 success, 1 configuration error, 2 runtime or statistical error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import checks
from .errors import ConfigError, DegenerateChannelError, GapRangeError
from .harness import SimConfig, SweepIOError, gap_at_ber, read_csv, sweep


def parse_grid(text: str) -> tuple:
    """``A:B:STEP`` (inclusive of B), or a comma separated list."""
    try:
        if ":" in text:
            a, b, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(np.floor((b - a) / step + 1e-9)) + 1
            return tuple(round(a + i * step, 10) for i in range(max(n, 0)))
        if not text.strip():
            return ()
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad SNR grid {text!r}; expected A:B:STEP") from None


def build_parser():
    p = argparse.ArgumentParser(prog="stbcsim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a BER sweep and write a CSV")
    s.add_argument("--scheme", default="siso", choices=["siso", "alamouti", "g3", "g4"])
    s.add_argument("--nrx", type=int, default=1)
    s.add_argument("--mod", default="qpsk", choices=["bpsk", "qpsk", "8psk", "16qam"])
    s.add_argument("--decision", default="soft", choices=["hard", "hard-energy", "soft"])
    s.add_argument("--fec", default="none", choices=["none", "conv", "conv-p23"])
    s.add_argument("--snr", default="0:20:2", help="SNR grid A:B:STEP in dB")
    s.add_argument("--target-errors", type=int, default=300)
    s.add_argument("--max-bits", type=int, default=10_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--interleaver-len", type=int, default=4200)
    s.add_argument("--channel", default="rayleigh", choices=["rayleigh", "awgn"])
    s.add_argument("--llr", default="approx", choices=["approx", "exact"])
    s.add_argument("--shards", type=int, default=1)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", required=True)

    g = sub.add_parser("gap", help="dB distance between two CSV curves at a BER")
    g.add_argument("--a", required=True)
    g.add_argument("--b", required=True)
    g.add_argument("--ber", type=float, default=1e-3)
    g.add_argument("--abscissa", default="snr", choices=["snr", "ebn0"])

    sub.add_parser("verify", help="run the built-in oracle checks")
    return p


def _simulate(args):
    cfg = SimConfig(
        scheme=args.scheme, n_rx=args.nrx, constellation=args.mod, decision=args.decision,
        fec=args.fec, snr_grid_db=parse_grid(args.snr), max_bits=args.max_bits,
        target_errors=args.target_errors, seed=args.seed,
        interleaver_len=args.interleaver_len, channel=args.channel, llr=args.llr,
        shards=args.shards, workers=args.workers,
    )
    for p in sweep(cfg, args.out):
        print(f"{p.snr_db:7.2f} dB  Eb/N0 {p.ebn0_db:7.2f} dB  "
              f"BER {p.ber:.3e}  ({p.bit_errors}/{p.bits_sent})")
    return 0


def _gap(args):
    try:
        a, b = read_csv(args.a), read_csv(args.b)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read curves: {exc}") from exc
    print(f"{gap_at_ber(a, b, args.ber, args.abscissa + '_db'):.3f}")
    return 0


def _verify(args):
    results = checks.run_all()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:14s} {r.detail}")
    return 0 if all(r.passed for r in results) else 2


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"simulate": _simulate, "gap": _gap, "verify": _verify}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (GapRangeError, DegenerateChannelError, SweepIOError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
