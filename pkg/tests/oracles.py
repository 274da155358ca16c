"""Independent reference implementations used as test oracles."""

import math

import numpy as np


def ancilla_slices(h):
    """Per check: (members, ancilla indices), widths from ceil(log2(floor(d/2) + 1))."""
    out = []
    nxt = h.cols
    dense = h.dense
    for c in range(h.rows):
        members = np.flatnonzero(dense[c])
        w = math.ceil(math.log2(len(members) // 2 + 1))
        out.append((members, list(range(nxt, nxt + w))))
        nxt += w
    return out, nxt


def objective(q, p, h, w1, w2):
    """W1 * sum (q_i - p_i)^2 + W2 * sum_c (sum_{j in c} q_j - 2 L_c)^2, term by term."""
    q = np.asarray(q, dtype=float)
    n = h.cols
    dist = sum((q[i] - p[i]) ** 2 for i in range(n))
    cons = 0.0
    for members, anc in ancilla_slices(h)[0]:
        s = sum(q[j] for j in members)
        half = sum(q[a] * 2**k for k, a in enumerate(anc))
        cons += (s - 2 * half) ** 2
    return w1 * dist + w2 * cons


def constraint_only(q, h):
    return objective(q, np.zeros(h.cols), h, 0.0, 1.0)


def ml_codeword(r, codewords):
    """argmin of squared Euclidean distance between BPSK(c) and r."""
    d = ((1.0 - 2.0 * codewords - np.asarray(r)[None, :]) ** 2).sum(axis=1)
    return codewords[int(np.argmin(d))], float(d.min())
