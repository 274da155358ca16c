"""Inner loops for simulated annealing and sum-product decoding.

Every kernel exists twice: ``*_numba`` (compiled, sequential) and
``*_numpy`` (vectorised over independent chains or edges). The module-level
names ``sa_anneal`` and ``bp_flood`` point at whichever backend is active.

Annealing randomness comes from a counter-based generator: the uniform used
for proposal ``(sweep, var)`` of a chain is ``splitmix64(key + (ctr + 1) * G)``
with ``ctr = sweep * num_vars + var``. Both backends therefore consume the
same numbers regardless of loop order, and produce the same final states.
"""

from __future__ import annotations

import numpy as np

from ._backend import HAVE_NUMBA, USE_NUMBA, njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

# exp(-38) < 0.5 * 2**-53, the smallest uniform the generator can emit
REJECT_CUTOFF = 38.0

BP_CLIP = 30.0


# ---------------------------------------------------------------- annealing


def _uniforms_numpy(keys: np.ndarray, ctr: int) -> np.ndarray:
    with np.errstate(over="ignore"):  # uint64 arithmetic wraps by design
        step = (np.uint64(ctr) + _ONE) * GOLDEN
    z = keys + step
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return ((z >> _S11).astype(np.float64) + 0.5) * _INV53


_INIT_SALT = np.uint64(0xD1B54A32D192ED03)


def initial_states(keys: np.ndarray, num_vars: int) -> np.ndarray:
    """Uniform random starting states, bit ``i`` of chain ``r`` taken from ``keys[r]`` alone."""
    salted = keys.astype(np.uint64) ^ _INIT_SALT
    out = np.empty((keys.shape[0], num_vars), dtype=np.uint8)
    for i in range(num_vars):
        out[:, i] = _uniforms_numpy(salted, i) < 0.5
    return out


def sa_anneal_numpy(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    linear: np.ndarray,
    betas: np.ndarray,
    keys: np.ndarray,
    init: np.ndarray,
) -> np.ndarray:
    """Metropolis single-flip annealing, all chains advanced together.

    ``indptr/indices/weights`` is the symmetric CSR coupling structure
    (``weights[p]`` couples ``i`` and ``indices[p]`` for ``p`` in row ``i``).
    Returns the final ``(num_reads, num_vars)`` uint8 states.
    """
    num_reads, num_vars = init.shape
    dense = np.zeros((num_vars, num_vars))
    for i in range(num_vars):
        for p in range(indptr[i], indptr[i + 1]):
            dense[i, indices[p]] = weights[p]

    x = init.astype(np.uint8).copy()
    field = np.tile(linear.astype(np.float64), (num_reads, 1))
    # same accumulation order as the compiled kernel
    for i in range(num_vars):
        field += x[:, i : i + 1] * dense[i]

    keys = keys.astype(np.uint64)
    for s, beta in enumerate(betas):
        base = s * num_vars
        for i in range(num_vars):
            xi = x[:, i]
            de = np.where(xi == 0, field[:, i], -field[:, i])
            bde = beta * de
            accept = bde <= 0.0
            uphill = (bde > 0.0) & (bde <= REJECT_CUTOFF)
            if uphill.any():
                u = _uniforms_numpy(keys, base + i)
                maybe = uphill & (u * (1.0 + bde) < 1.0)
                accept |= maybe & (u < np.exp(-np.where(maybe, bde, 0.0)))
            if not accept.any():
                continue
            rows = np.flatnonzero(accept)
            delta = 1.0 - 2.0 * x[rows, i]
            x[rows, i] ^= 1
            field[rows] += delta[:, None] * dense[i]
    return x


@njit(cache=True)
def _uniform_nb(key, ctr):
    z = key + (np.uint64(ctr) + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (np.float64(z >> np.uint64(11)) + 0.5) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def sa_anneal_numba(indptr, indices, weights, linear, betas, keys, init):
    num_reads, num_vars = init.shape
    out = np.empty((num_reads, num_vars), dtype=np.uint8)
    field = np.empty(num_vars, dtype=np.float64)
    x = np.empty(num_vars, dtype=np.uint8)
    for r in range(num_reads):
        key = keys[r]
        for i in range(num_vars):
            x[i] = init[r, i]
            field[i] = linear[i]
        for i in range(num_vars):
            if x[i]:
                for p in range(indptr[i], indptr[i + 1]):
                    field[indices[p]] += weights[p]
        for s in range(betas.shape[0]):
            beta = betas[s]
            base = s * num_vars
            for i in range(num_vars):
                de = field[i] if x[i] == 0 else -field[i]
                bde = beta * de
                if bde > 0.0:
                    if bde > 38.0:
                        continue
                    u = _uniform_nb(key, base + i)
                    # exp(-x) <= 1/(1+x): most rejections skip exp entirely
                    if u * (1.0 + bde) >= 1.0 or u >= np.exp(-bde):
                        continue
                delta = 1.0 - 2.0 * x[i]
                x[i] ^= 1
                for p in range(indptr[i], indptr[i + 1]):
                    field[indices[p]] += delta * weights[p]
        for i in range(num_vars):
            out[r, i] = x[i]
    return out


# ---------------------------------------------------------- belief propagation


def bp_flood_numpy(
    llr: np.ndarray,
    check_ptr: np.ndarray,
    edge_var: np.ndarray,
    max_iters: int,
):
    """Flooding sum-product in the LLR domain.

    Edges are stored check-major: check ``c`` owns ``edge_var[check_ptr[c]:check_ptr[c+1]]``.
    Positive LLR favours bit 0. Returns ``(hard, posterior, iterations, converged)``.
    """
    n = llr.shape[0]
    m = check_ptr.shape[0] - 1
    degrees = np.diff(check_ptr)
    dmax = int(degrees.max())
    edge_check = np.repeat(np.arange(m), degrees)
    slot = np.arange(edge_var.shape[0]) - check_ptr[edge_check]

    v2c = np.clip(llr[edge_var], -BP_CLIP, BP_CLIP)
    post = llr.astype(np.float64).copy()
    hard = (post < 0).astype(np.uint8)
    for it in range(1, max_iters + 1):
        t = np.ones((m, dmax))
        t[edge_check, slot] = np.tanh(v2c / 2.0)
        prefix = np.ones((m, dmax + 1))
        suffix = np.ones((m, dmax + 1))
        for k in range(dmax):
            prefix[:, k + 1] = prefix[:, k] * t[:, k]
            suffix[:, dmax - k - 1] = suffix[:, dmax - k] * t[:, dmax - k - 1]
        loo = prefix[edge_check, slot] * suffix[edge_check, slot + 1]
        c2v = np.clip(2.0 * np.arctanh(loo), -BP_CLIP, BP_CLIP)

        post = llr + np.bincount(edge_var, weights=c2v, minlength=n)
        hard = (post < 0).astype(np.uint8)
        parity = np.bitwise_xor.reduceat(hard[edge_var], check_ptr[:-1])
        if not parity.any():
            return hard, post, it, True
        v2c = np.clip(post[edge_var] - c2v, -BP_CLIP, BP_CLIP)
    return hard, post, max_iters, False


@njit(cache=True)
def bp_flood_numba(llr, check_ptr, edge_var, max_iters):
    n = llr.shape[0]
    m = check_ptr.shape[0] - 1
    num_edges = edge_var.shape[0]
    v2c = np.empty(num_edges)
    c2v = np.empty(num_edges)
    t = np.empty(num_edges)
    for e in range(num_edges):
        v2c[e] = min(max(llr[edge_var[e]], -30.0), 30.0)
    post = llr.copy()
    hard = np.zeros(n, dtype=np.uint8)
    for v in range(n):
        hard[v] = 1 if post[v] < 0 else 0
    for it in range(1, max_iters + 1):
        for c in range(m):
            lo = check_ptr[c]
            hi = check_ptr[c + 1]
            for e in range(lo, hi):
                t[e] = np.tanh(v2c[e] / 2.0)
            # leave-one-out product as prefix * suffix
            acc = 1.0
            for e in range(lo, hi):
                c2v[e] = acc
                acc *= t[e]
            acc = 1.0
            for e in range(hi - 1, lo - 1, -1):
                p = c2v[e] * acc
                acc *= t[e]
                c2v[e] = min(max(2.0 * np.arctanh(p), -30.0), 30.0)
        for v in range(n):
            post[v] = llr[v]
        for e in range(num_edges):
            post[edge_var[e]] += c2v[e]
        for v in range(n):
            hard[v] = 1 if post[v] < 0 else 0
        ok = True
        for c in range(m):
            par = 0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                par ^= hard[edge_var[e]]
            if par:
                ok = False
                break
        if ok:
            return hard, post, it, True
        for e in range(num_edges):
            v2c[e] = min(max(post[edge_var[e]] - c2v[e], -30.0), 30.0)
    return hard, post, max_iters, False


if not HAVE_NUMBA:  # pragma: no cover
    sa_anneal_numba = None  # type: ignore[assignment]
    bp_flood_numba = None  # type: ignore[assignment]

sa_anneal = sa_anneal_numba if USE_NUMBA else sa_anneal_numpy
bp_flood = bp_flood_numba if USE_NUMBA else bp_flood_numpy
