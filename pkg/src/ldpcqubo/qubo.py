"""Decoding QUBO: weighted distance metric plus parity-constraint penalty.

Variables ``0..n-1`` are codeword bits; ancillas follow, grouped by check.
Energies include the constant offset, so :func:`energy` evaluates the full
objective ``W1 * sum_i (q_i - p_i)**2 + W2 * sum_c (sum_{j in c} q_j - 2 L_c)**2``
rather than a shifted version of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .codes import ParityCheckMatrix


@dataclass(frozen=True)
class CheckAncillas:
    """Ancillas holding the half-sum ``L_c = sum_k place[k] * a_k`` of one check."""

    check: int
    members: tuple[int, ...]
    variables: tuple[int, ...]
    place: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Qubo:
    num_vars: int
    num_code_bits: int
    linear: np.ndarray
    quad_i: np.ndarray
    quad_j: np.ndarray
    quad_v: np.ndarray
    offset: float = 0.0
    layout: tuple[CheckAncillas, ...] = ()

    @classmethod
    def build(cls, num_vars, num_code_bits, linear, pairs, offset=0.0, layout=()) -> "Qubo":
        """Coalesce ``pairs`` (iterable of ``(i, j, value)``) into canonical ``i < j`` form.

        Self-pairs fold into the linear term since ``q**2 = q``.
        """
        lin = np.array(linear, dtype=np.float64)
        if lin.shape != (num_vars,):
            raise ValueError(f"linear must have length {num_vars}")
        acc: dict[tuple[int, int], float] = {}
        for i, j, v in pairs:
            i, j = int(i), int(j)
            if not (0 <= i < num_vars and 0 <= j < num_vars):
                raise ValueError(f"pair ({i}, {j}) out of range")
            if i == j:
                lin[i] += v
                continue
            key = (i, j) if i < j else (j, i)
            acc[key] = acc.get(key, 0.0) + v
        return cls._from_sorted(num_vars, num_code_bits, lin, acc, offset, layout)

    @classmethod
    def _from_sorted(cls, num_vars, num_code_bits, lin, acc, offset, layout):
        keys = sorted(acc)
        qi = np.array([k[0] for k in keys], dtype=np.int64)
        qj = np.array([k[1] for k in keys], dtype=np.int64)
        qv = np.array([acc[k] for k in keys], dtype=np.float64)
        for a in (lin, qi, qj, qv):
            a.flags.writeable = False
        return cls(num_vars, num_code_bits, lin, qi, qj, qv, float(offset), tuple(layout))

    @property
    def quadratic(self) -> dict[tuple[int, int], float]:
        return {(int(i), int(j)): float(v) for i, j, v in zip(self.quad_i, self.quad_j, self.quad_v)}

    @property
    def ancillas(self) -> np.ndarray:
        return np.arange(self.num_code_bits, self.num_vars)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric neighbour lists ``(indptr, indices, weights)``."""
        rows = np.concatenate([self.quad_i, self.quad_j])
        cols = np.concatenate([self.quad_j, self.quad_i])
        vals = np.concatenate([self.quad_v, self.quad_v])
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        indptr = np.zeros(self.num_vars + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return np.cumsum(indptr), cols.astype(np.int64), vals

    def dense(self) -> np.ndarray:
        """Upper-triangular matrix with the linear terms on the diagonal."""
        q = np.zeros((self.num_vars, self.num_vars))
        q[np.diag_indices(self.num_vars)] = self.linear
        q[self.quad_i, self.quad_j] = self.quad_v
        return q

    def scaled(self, w: float) -> "Qubo":
        return Qubo(
            self.num_vars, self.num_code_bits, self.linear * w, self.quad_i, self.quad_j,
            self.quad_v * w, self.offset * w, self.layout,
        )

    # ---- sparse text format: "i j value" lines, i == j for linear, "offset value"

    def to_text(self) -> str:
        out = [f"# qubo num_vars={self.num_vars} code_bits={self.num_code_bits}"]
        out.append(f"offset {self.offset!r}")
        for i, v in enumerate(self.linear):
            if v != 0.0:
                out.append(f"{i} {i} {float(v)!r}")
        for i, j, v in zip(self.quad_i, self.quad_j, self.quad_v):
            out.append(f"{i} {j} {float(v)!r}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Qubo":
        num_vars = code_bits = None
        offset = 0.0
        terms = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("num_vars="):
                        num_vars = int(tok.split("=", 1)[1])
                    elif tok.startswith("code_bits="):
                        code_bits = int(tok.split("=", 1)[1])
                continue
            toks = line.split()
            try:
                if toks[0] == "offset" and len(toks) == 2:
                    offset = float(toks[1])
                elif len(toks) == 3:
                    terms.append((int(toks[0]), int(toks[1]), float(toks[2])))
                else:
                    raise ValueError("expected 'i j value' or 'offset value'")
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if num_vars is None:
            num_vars = 1 + max((max(i, j) for i, j, _ in terms), default=-1)
        lin = np.zeros(num_vars)
        return cls.build(num_vars, num_vars if code_bits is None else code_bits, lin, terms, offset)


def _binary_matrix(q, num_vars: int) -> np.ndarray:
    a = np.asarray(q)
    if a.ndim == 1:
        a = a[None, :]
    if a.shape[-1] != num_vars:
        raise ValueError(f"assignment length {a.shape[-1]} does not match num_vars={num_vars}")
    return a.astype(np.float64)


def energies(q, qubo: Qubo) -> np.ndarray:
    """Energies of a ``(count, num_vars)`` batch of assignments."""
    x = _binary_matrix(q, qubo.num_vars)
    e = qubo.offset + x @ qubo.linear
    if qubo.quad_v.size:
        e = e + (x[:, qubo.quad_i] * x[:, qubo.quad_j]) @ qubo.quad_v
    return e


def energy(q, qubo: Qubo) -> float:
    if np.ndim(q) != 1:
        raise ValueError("energy() takes a single assignment; use energies() for batches")
    return float(energies(q, qubo)[0])


def build_distance_metric(posteriors) -> Qubo:
    """``sum_i (q_i - p_i)**2`` = ``sum_i (1 - 2 p_i) q_i + sum_i p_i**2`` on binary ``q``."""
    p = np.asarray(posteriors, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("posteriors must be a non-empty vector")
    if not ((p > 0.0) & (p < 1.0)).all():
        raise ValueError("posteriors must lie strictly inside (0, 1)")
    n = p.shape[0]
    return Qubo.build(n, n, 1.0 - 2.0 * p, (), offset=float(np.sum(p * p)))


def ancilla_width(degree: int) -> int:
    """Bits needed to hold ``0..degree // 2``."""
    return (degree // 2).bit_length()


def build_constraint_metric(h: ParityCheckMatrix) -> Qubo:
    """``sum_c (sum_{j in c} q_j - 2 L_c)**2`` with ``L_c`` in binary ancillas."""
    n = h.cols
    lin = np.zeros(n)
    pairs = []
    layout = []
    nxt = n
    anc_lin = []
    for c, vs in enumerate(h.check_adjacency):
        d = len(vs)
        if d < 2:
            raise ValueError(f"check {c} has degree {d}; every check needs degree >= 2")
        width = ancilla_width(d)
        anc = tuple(range(nxt, nxt + width))
        place = tuple(1 << k for k in range(width))
        nxt += width
        layout.append(CheckAncillas(c, tuple(vs), anc, place))
        # (S - 2L)^2 = S^2 - 4 S L + 4 L^2
        for a_pos, j in enumerate(vs):
            lin[j] += 1.0
            for j2 in vs[a_pos + 1 :]:
                pairs.append((j, j2, 2.0))
            for a, w in zip(anc, place):
                pairs.append((j, a, -4.0 * w))
        for k, (a, w) in enumerate(zip(anc, place)):
            anc_lin.append(4.0 * w * w)
            for a2, w2 in zip(anc[k + 1 :], place[k + 1 :]):
                pairs.append((a, a2, 8.0 * w * w2))
    linear = np.concatenate([lin, np.array(anc_lin)])
    return Qubo.build(nxt, n, linear, pairs, 0.0, layout)


def compose(delta: Qubo, constraint: Qubo, w1: float, w2: float) -> Qubo:
    """``w1 * delta + w2 * constraint``, coefficient-wise, offsets included."""
    if w1 < 0 or w2 <= 0:
        raise ValueError("weights must satisfy w1 >= 0 and w2 > 0")
    if delta.num_vars != delta.num_code_bits:
        raise ValueError("distance fragment must not carry ancillas")
    if delta.num_vars != constraint.num_code_bits:
        raise ValueError(
            f"distance fragment covers {delta.num_vars} bits, constraint expects "
            f"{constraint.num_code_bits}"
        )
    lin = w2 * constraint.linear
    lin[: delta.num_vars] += w1 * delta.linear
    acc = {(int(i), int(j)): w2 * v for i, j, v in zip(constraint.quad_i, constraint.quad_j, constraint.quad_v)}
    for i, j, v in zip(delta.quad_i, delta.quad_j, delta.quad_v):
        acc[(int(i), int(j))] = acc.get((int(i), int(j)), 0.0) + w1 * v
    return Qubo._from_sorted(
        constraint.num_vars,
        constraint.num_code_bits,
        lin,
        acc,
        w1 * delta.offset + w2 * constraint.offset,
        constraint.layout,
    )


def decoding_qubo(posteriors, h: ParityCheckMatrix, w1: float = 0.5, w2: float = 1.0,
                  constraint: Qubo | None = None) -> Qubo:
    """Distance + constraint QUBO for one received frame; pass ``constraint`` to reuse it."""
    if constraint is None:
        constraint = build_constraint_metric(h)
    return compose(build_distance_metric(posteriors), constraint, w1, w2)


def ancilla_fill(bits, qubo: Qubo) -> np.ndarray:
    """Extend codeword bits with each check's ancillas set to half its (floored) sum."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (qubo.num_code_bits,):
        raise ValueError(f"expected {qubo.num_code_bits} codeword bits")
    full = np.zeros(qubo.num_vars, dtype=np.uint8)
    full[: qubo.num_code_bits] = bits
    for item in qubo.layout:
        half = int(bits[list(item.members)].sum()) // 2
        for a, w in zip(item.variables, item.place):
            full[a] = 1 if half & w else 0
    return full


__all__ = [
    "CheckAncillas",
    "Qubo",
    "ancilla_fill",
    "ancilla_width",
    "build_constraint_metric",
    "build_distance_metric",
    "compose",
    "decoding_qubo",
    "energies",
    "energy",
]
