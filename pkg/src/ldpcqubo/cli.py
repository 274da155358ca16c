"""Command line entry point: ``ldpcqubo {encode,decode-one,sweep,tv-snr}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import harness
from ._backend import backend_name
from .channel import SNR_CONVENTION, ReceivedVector, read_samples, snr_to_sigma
from .codes import derive_generator, encode, load_code, resolve_code

log = logging.getLogger("ldpcqubo")


def _bits(text: str) -> np.ndarray:
    text = text.strip().replace(",", "").replace(" ", "")
    if not text or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError("expected a 0/1 string")
    return np.array([int(c) for c in text], dtype=np.uint8)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file (keys as in ExperimentConfig)")
    p.add_argument("--code", help="code file or bundled code name")
    p.add_argument("--decoders", type=lambda s: tuple(s.split(",")), help="comma list of sa,bp,exhaustive,adapter")
    p.add_argument("--trials", type=int)
    p.add_argument("--w1", type=float)
    p.add_argument("--w2", type=float)
    p.add_argument("--beta-initial", type=float)
    p.add_argument("--beta-final", type=float)
    p.add_argument("--sweeps", dest="num_sweeps", type=int)
    p.add_argument("--reads", dest="num_reads", type=int)
    p.add_argument("--bp-iters", dest="bp_max_iters", type=int)
    p.add_argument("--adapter-command", type=lambda s: tuple(s.split()))
    p.add_argument("--message", choices=["random", "zeros"])
    p.add_argument("--seed", dest="master_seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=Path, required=True, help="results CSV")


_OVERRIDES = (
    "code", "decoders", "trials", "w1", "w2", "beta_initial", "beta_final", "num_sweeps",
    "num_reads", "bp_max_iters", "adapter_command", "message", "master_seed", "workers",
)


def _config(args, **extra) -> harness.ExperimentConfig:
    cfg = harness.ExperimentConfig.load(args.config) if args.config else harness.ExperimentConfig()
    kw = {k: getattr(args, k) for k in _OVERRIDES}
    kw.update(extra)
    return harness.ExperimentConfig.from_dict({**cfg.to_dict(), **{k: v for k, v in kw.items() if v is not None}})


def _report(table: harness.ResultTable) -> None:
    print(f"# backend={backend_name()} snr_convention={SNR_CONVENTION}")
    for r in table.rows:
        secs = table.timing.get((r.snr, r.decoder), float("nan"))
        print(
            f"snr={r.snr:>10} {r.decoder:>10}  FER={r.fer:.4g} [{r.fer_lo:.4g},{r.fer_hi:.4g}]"
            f"  BER={r.ber:.4g}  fallbacks={r.fallbacks}  {1e3 * secs:.1f} ms/frame"
        )


def cmd_encode(args) -> int:
    h = load_code(resolve_code(args.code))
    g = derive_generator(h)
    msg = args.message if args.message is not None else np.random.default_rng(args.seed).integers(0, 2, g.k)
    if msg.shape[0] != g.k:
        raise ValueError(f"message must have {g.k} bits")
    print("".join(map(str, msg)))
    print("".join(map(str, encode(msg, g))))
    return 0


def cmd_decode_one(args) -> int:
    cfg = _config(args) if args.config else harness.ExperimentConfig.from_dict(
        {**harness.ExperimentConfig().to_dict(), "code": args.code or "ldpc_32_16",
         **{k: getattr(args, k) for k in ("w1", "w2", "beta_initial", "beta_final", "num_sweeps",
                                          "num_reads", "bp_max_iters", "adapter_command")
            if getattr(args, k) is not None},
         "decoders": (args.decoder,)}
    )
    ctx = harness.CodeContext(cfg)
    samples = read_samples(args.received.read_text())
    if samples.shape[0] != ctx.h.cols:
        raise ValueError(f"received vector has {samples.shape[0]} samples, code length is {ctx.h.cols}")
    rx = ReceivedVector.from_samples(samples, snr_to_sigma(args.snr))
    res = ctx.decode(args.decoder, rx, args.seed)
    print(json.dumps({"decoder": args.decoder, "snr_db": args.snr, **res.as_dict()}, indent=2))
    return 0


def cmd_sweep(args) -> int:
    extra = {"snr_db": args.snr} if args.snr else {}
    cfg = _config(args, **extra)
    t0 = time.perf_counter()
    table = harness.run_fixed_snr(cfg)
    harness.emit_results(table, args.out)
    _report(table)
    log.info("sweep finished in %.1fs", time.perf_counter() - t0)
    return 0


def cmd_tv(args) -> int:
    extra = {k: v for k, v in (("tv_mu", args.mu), ("tv_sigma", args.sigma), ("tv_floor_db", args.floor)) if v is not None}
    cfg = _config(args, **extra)
    table = harness.run_time_varying(cfg)
    frames = args.frames_out or args.out.with_name(args.out.stem + "_frames.csv")
    harness.emit_results(table, args.out, frames)
    _report(table)
    for r in table.rows:
        lo, hi = r.fraction_correct_ci
        print(f"{r.decoder:>10} fraction correct {r.fraction_correct:.4f} [{lo:.4f},{hi:.4f}]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldpcqubo", description="QUBO/annealing LDPC decoding experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a message (random if not given)")
    p.add_argument("--code", default="ldpc_32_16")
    p.add_argument("--message", type=_bits)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode-one", help="decode one received vector read from a file")
    p.add_argument("received", type=Path, help="samples as whitespace/comma separated floats or received CSV")
    p.add_argument("--snr", type=float, required=True, help=f"channel SNR in dB ({SNR_CONVENTION})")
    p.add_argument("--decoder", choices=harness.DECODERS, default="sa")
    p.add_argument("--config", type=Path)
    p.add_argument("--code")
    p.add_argument("--seed", type=int, default=0)
    for flag, dest, typ in (
        ("--w1", "w1", float), ("--w2", "w2", float), ("--beta-initial", "beta_initial", float),
        ("--beta-final", "beta_final", float), ("--sweeps", "num_sweeps", int),
        ("--reads", "num_reads", int), ("--bp-iters", "bp_max_iters", int),
    ):
        p.add_argument(flag, dest=dest, type=typ)
    p.add_argument("--adapter-command", type=lambda s: tuple(s.split()))
    p.set_defaults(func=cmd_decode_one)

    p = sub.add_parser("sweep", help="fixed-SNR BER/FER sweep")
    _add_experiment_args(p)
    p.add_argument("--snr", type=_floats, help="SNR points in dB, e.g. '4,5,6'")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tv-snr", help="time-varying SNR run (per-frame SNR ~ Normal)")
    _add_experiment_args(p)
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--floor", type=float)
    p.add_argument("--frames-out", type=Path)
    p.set_defaults(func=cmd_tv)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
