"""Sum-product belief propagation baseline (LLR domain, flooding schedule)."""

from __future__ import annotations

import numpy as np

from . import kernels
from .channel import ReceivedVector
from .codes import ParityCheckMatrix, syndrome
from .postprocess import DecodeResult, Selection, squared_distances

DEFAULT_MAX_ITERS = 50


def bp_decode_llr(llr, h: ParityCheckMatrix, max_iters: int = DEFAULT_MAX_ITERS):
    """Run the flooding kernel on channel LLRs (positive favours bit 0).

    Returns ``(hard_bits, posterior_llr, iterations, converged)``.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    if llr.shape != (h.cols,):
        raise ValueError(f"expected {h.cols} LLRs, got shape {llr.shape}")
    ptr, var = h.edges
    return kernels.bp_flood(llr, ptr, var, int(max_iters))


def bp_decode(r: ReceivedVector, h: ParityCheckMatrix, max_iters: int = DEFAULT_MAX_ITERS) -> DecodeResult:
    hard, post, iters, converged = bp_decode_llr(r.llr, h, max_iters)
    bits = np.asarray(hard, dtype=np.uint8)
    return DecodeResult(
        bits=bits,
        valid=not syndrome(bits, h).any(),
        selection=Selection.BP_HARD_DECISION,
        distance=float(np.sqrt(squared_distances(bits, r))),
        meta={"iterations": int(iters), "converged": bool(converged), "max_iters": int(max_iters)},
    )
