"""Stand-in for an external annealer: reads a sparse QUBO file, writes a sample file.

    python -m ldpcqubo.stub_solver problem.qubo samples.txt --seed 7 --reads 100

Used to exercise :class:`ldpcqubo.samplers.ExternalSampler` end to end.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .qubo import Qubo
from .samplers import AnnealSchedule, sample_sa


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ldpcqubo.stub_solver", description=__doc__.splitlines()[0])
    ap.add_argument("qubo", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--reads", type=int, default=100)
    ap.add_argument("--sweeps", type=int, default=1000)
    ap.add_argument("--beta-initial", type=float, default=0.1)
    ap.add_argument("--beta-final", type=float, default=10.0)
    ap.add_argument("--bad-energies", action="store_true", help="corrupt reported energies (testing)")
    ap.add_argument("--truncate", type=int, default=0, help="drop trailing bits (testing)")
    args = ap.parse_args(argv)

    qubo = Qubo.from_text(args.qubo.read_text())
    sched = AnnealSchedule(args.beta_initial, args.beta_final, args.sweeps, args.reads)
    ss = sample_sa(qubo, sched, args.seed)
    lines = []
    for s, c, e in zip(ss.samples, ss.counts, ss.energies):
        bits = "".join("1" if b else "0" for b in s)
        if args.truncate:
            bits = bits[: -args.truncate]
        lines.append(f"{bits} {int(c)} {float(e) + (1.0 if args.bad_energies else 0.0)!r}\n")
    args.out.write_text("".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
