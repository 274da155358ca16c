#!/usr/bin/env python3
"""Time the compiled and pure-numpy kernels side by side.

    python benchmarks/bench_kernels.py [--reads 1000] [--sweeps 100] [--repeat 3]

Both backends are imported in one process (the env flag only picks the
default), so the same inputs run through each. SA outputs are also checked
for bit-identity.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ldpcqubo import kernels
from ldpcqubo._backend import HAVE_NUMBA
from ldpcqubo.channel import ChannelConfig, transmit
from ldpcqubo.codes import derive_generator, encode, load_code, resolve_code
from ldpcqubo.qubo import decoding_qubo
from ldpcqubo.samplers import AnnealSchedule


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--code", default="ldpc_32_16")
    ap.add_argument("--reads", type=int, default=1000)
    ap.add_argument("--sweeps", type=int, default=100)
    ap.add_argument("--bp-frames", type=int, default=200)
    ap.add_argument("--snr", type=float, default=2.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    h = load_code(resolve_code(args.code))
    g = derive_generator(h)
    rng = np.random.default_rng(0)
    rx = transmit(encode(rng.integers(0, 2, g.k), g), ChannelConfig(args.snr), rng)
    q = decoding_qubo(rx.posteriors, h, 2.0, 1.0)
    indptr, indices, weights = q.csr
    keys = rng.integers(0, 2**63 - 1, args.reads).astype(np.uint64)
    sa_args = (indptr, indices, weights, np.asarray(q.linear, dtype=np.float64),
               AnnealSchedule(0.2, 5.0, args.sweeps, args.reads).betas(), keys,
               kernels.initial_states(keys, q.num_vars))
    flips = args.reads * args.sweeps * q.num_vars

    frames = [transmit(encode(rng.integers(0, 2, g.k), g), ChannelConfig(args.snr), rng).llr
              for _ in range(args.bp_frames)]
    ptr, var = h.edges

    def bp_all(fn):
        return [fn(llr, ptr, var, 50)[0] for llr in frames]

    print(f"code={args.code} qubo_vars={q.num_vars} reads={args.reads} sweeps={args.sweeps}")
    rows = []
    if HAVE_NUMBA:
        kernels.sa_anneal_numba(*sa_args[:4], sa_args[4][:2], sa_args[5][:2], sa_args[6][:2])  # compile
        kernels.bp_flood_numba(frames[0], ptr, var, 2)
        t_sa_nb, x_nb = best_of(lambda: kernels.sa_anneal_numba(*sa_args), args.repeat)
        t_bp_nb, b_nb = best_of(lambda: bp_all(kernels.bp_flood_numba), args.repeat)
        rows += [("sa", "numba", t_sa_nb, flips), ("bp", "numba", t_bp_nb, args.bp_frames)]
    t_sa_np, x_np = best_of(lambda: kernels.sa_anneal_numpy(*sa_args), 1)
    t_bp_np, b_np = best_of(lambda: bp_all(kernels.bp_flood_numpy), 1)
    rows += [("sa", "numpy", t_sa_np, flips), ("bp", "numpy", t_bp_np, args.bp_frames)]

    print(f"{'kernel':<6} {'backend':<7} {'seconds':>9} {'per unit':>12}")
    for kernel, backend, secs, units in rows:
        unit = "ns/flip" if kernel == "sa" else "us/frame"
        scale = 1e9 if kernel == "sa" else 1e6
        print(f"{kernel:<6} {backend:<7} {secs:9.4f} {scale * secs / units:9.2f} {unit}")
    if HAVE_NUMBA:
        print(f"sa speedup x{t_sa_np / t_sa_nb:.1f}, identical states: {np.array_equal(x_nb, x_np)}")
        same_bp = all(np.array_equal(a, b) for a, b in zip(b_nb, b_np))
        print(f"bp speedup x{t_bp_np / t_bp_nb:.1f}, identical decisions: {same_bp}")


if __name__ == "__main__":
    main()
