"""GF(2) code algebra: parity-check matrices, alist I/O, generators, encoding."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np


class AlistError(ValueError):
    """Malformed alist input. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class NoCodeError(ValueError):
    """The parity-check matrix has no nontrivial nullspace."""


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary matrix ``H`` with Tanner-graph adjacency views.

    ``check_adjacency[i]`` lists the variables in check ``i`` (sorted);
    ``variable_adjacency[j]`` lists the checks touching variable ``j``.
    """

    rows: int
    cols: int
    check_adjacency: tuple[tuple[int, ...], ...]
    variable_adjacency: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if len(self.check_adjacency) != self.rows:
            raise ValueError("check adjacency length does not match row count")
        if len(self.variable_adjacency) != self.cols:
            raise ValueError("variable adjacency length does not match column count")
        from_checks = set()
        for i, vs in enumerate(self.check_adjacency):
            if len(set(vs)) != len(vs):
                raise ValueError(f"duplicate variable in check {i}")
            for j in vs:
                if not 0 <= j < self.cols:
                    raise ValueError(f"variable index {j} out of range in check {i}")
                from_checks.add((i, j))
        from_vars = set()
        for j, cs in enumerate(self.variable_adjacency):
            if len(set(cs)) != len(cs):
                raise ValueError(f"duplicate check on variable {j}")
            for i in cs:
                if not 0 <= i < self.rows:
                    raise ValueError(f"check index {i} out of range on variable {j}")
                from_vars.add((i, j))
        if from_checks != from_vars:
            raise ValueError("check and variable adjacency disagree")

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries) -> "ParityCheckMatrix":
        entries = sorted(set((int(i), int(j)) for i, j in entries))
        for i, j in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry ({i}, {j}) outside {rows}x{cols}")
        checks = [[] for _ in range(rows)]
        variables = [[] for _ in range(cols)]
        for i, j in entries:
            checks[i].append(j)
            variables[j].append(i)
        return cls(rows, cols, tuple(map(tuple, checks)), tuple(map(tuple, variables)))

    @classmethod
    def from_dense(cls, matrix) -> "ParityCheckMatrix":
        a = np.asarray(matrix)
        if a.ndim != 2:
            raise ValueError("parity-check matrix must be 2-D")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("parity-check matrix must be binary")
        return cls.from_entries(a.shape[0], a.shape[1], zip(*np.nonzero(a)))

    @property
    def n(self) -> int:
        return self.cols

    @property
    def entries(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for i, vs in enumerate(self.check_adjacency) for j in vs)

    @cached_property
    def dense(self) -> np.ndarray:
        h = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, vs in enumerate(self.check_adjacency):
            h[i, list(vs)] = 1
        h.flags.writeable = False
        return h

    @property
    def density(self) -> float:
        return len(self.entries) / float(self.rows * self.cols)

    @property
    def check_degrees(self) -> np.ndarray:
        return np.array([len(vs) for vs in self.check_adjacency], dtype=np.int64)

    @property
    def variable_degrees(self) -> np.ndarray:
        return np.array([len(cs) for cs in self.variable_adjacency], dtype=np.int64)

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Check-major edge layout ``(check_ptr, edge_var)`` used by the BP kernels."""
        ptr = np.zeros(self.rows + 1, dtype=np.int64)
        ptr[1:] = np.cumsum(self.check_degrees)
        var = np.fromiter(
            (j for vs in self.check_adjacency for j in vs), dtype=np.int64, count=int(ptr[-1])
        )
        return ptr, var


# ---------------------------------------------------------------- alist I/O


def _significant_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            yield lineno, line


def _ints(lineno: int, line: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise AlistError(f"non-integer token ({exc})", lineno) from None


def parse_alist(text: str) -> ParityCheckMatrix:
    """Parse MacKay's alist format (1-based indices, optional zero padding)."""
    lines = list(_significant_lines(text))
    if len(lines) < 4:
        raise AlistError("truncated header", lines[-1][0] if lines else None)

    def take(idx: int) -> tuple[int, list[int]]:
        if idx >= len(lines):
            raise AlistError("unexpected end of file", lines[-1][0])
        lineno, line = lines[idx]
        return lineno, _ints(lineno, line)

    lineno, head = take(0)
    if len(head) != 2 or min(head) <= 0:
        raise AlistError("header must be 'n m' with positive sizes", lineno)
    n, m = head
    lineno, maxdeg = take(1)
    if len(maxdeg) != 2:
        raise AlistError("expected 'max_col_degree max_row_degree'", lineno)
    lineno, col_deg = take(2)
    if len(col_deg) != n:
        raise AlistError(f"expected {n} column degrees, got {len(col_deg)}", lineno)
    lineno, row_deg = take(3)
    if len(row_deg) != m:
        raise AlistError(f"expected {m} row degrees, got {len(row_deg)}", lineno)
    if max(col_deg) > maxdeg[0] or max(row_deg) > maxdeg[1]:
        raise AlistError("degree exceeds declared maximum", lines[1][0])

    def adjacency(start: int, count: int, degrees: list[int], bound: int, what: str):
        out = []
        for k in range(count):
            lineno, vals = take(start + k)
            z = vals.index(0) if 0 in vals else len(vals)
            nonzero = vals[:z]
            if any(vals[z:]):
                raise AlistError("zero padding must trail the index list", lineno)
            if len(nonzero) != degrees[k]:
                raise AlistError(
                    f"{what} {k + 1} lists {len(nonzero)} indices, degree says {degrees[k]}", lineno
                )
            for v in nonzero:
                if not 1 <= v <= bound:
                    raise AlistError(f"index {v} out of range 1..{bound}", lineno)
            if len(set(nonzero)) != len(nonzero):
                raise AlistError("duplicate index", lineno)
            out.append((lineno, [v - 1 for v in nonzero]))
        return out

    cols = adjacency(4, n, col_deg, m, "column")
    rows = adjacency(4 + n, m, row_deg, n, "row")
    from_cols = {(i, j) for j, (_, cs) in enumerate(cols) for i in cs}
    from_rows = {(i, j) for i, (_, vs) in enumerate(rows) for j in vs}
    if from_cols != from_rows:
        bad = sorted(from_cols ^ from_rows)[0]
        lineno = rows[bad[0]][0]
        raise AlistError(f"row/column lists disagree at entry ({bad[0] + 1}, {bad[1] + 1})", lineno)
    return ParityCheckMatrix.from_entries(m, n, from_rows)


def _padded(idx, width: int) -> str:
    vals = [i + 1 for i in idx]
    return " ".join(map(str, vals + [0] * (width - len(vals))))


def to_alist(h: ParityCheckMatrix) -> str:
    """Serialise in alist form; short lists are zero padded to the maximum degree."""
    cdeg = h.variable_degrees
    rdeg = h.check_degrees
    out = [
        f"{h.cols} {h.rows}",
        f"{cdeg.max()} {rdeg.max()}",
        " ".join(map(str, cdeg)),
        " ".join(map(str, rdeg)),
    ]
    # an empty list still needs a line, so pad to at least one token
    out += [_padded(cs, max(1, int(cdeg.max()))) for cs in h.variable_adjacency]
    out += [_padded(vs, max(1, int(rdeg.max()))) for vs in h.check_adjacency]
    return "\n".join(out) + "\n"


def parse_dense(text: str) -> ParityCheckMatrix:
    """Rows of 0/1 tokens (whitespace-separated, or packed like ``0110``)."""
    rows = []
    for lineno, line in _significant_lines(text):
        if line.lstrip().startswith("#"):
            continue
        toks = line.split()
        if len(toks) == 1 and len(toks[0]) > 1:
            toks = list(toks[0])
        if any(t not in ("0", "1") for t in toks):
            raise AlistError("dense matrix rows must contain only 0/1", lineno)
        rows.append([int(t) for t in toks])
    if not rows or len({len(r) for r in rows}) != 1:
        raise AlistError("dense matrix rows must be non-empty and equal length")
    return ParityCheckMatrix.from_dense(rows)


def load_code(path) -> ParityCheckMatrix:
    """Load a bundled code by name, ``.alist`` files as alist, anything else as a dense 0/1 matrix."""
    path = resolve_code(path)
    text = path.read_text()
    if path.suffix == ".alist":
        return parse_alist(text)
    return parse_dense(text)


# ------------------------------------------------------------ GF(2) algebra


def gf2_rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot column of each row."""
    r = (np.asarray(a, dtype=np.uint8) & 1).copy()
    m, n = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        hits = np.flatnonzero(r[row:, col])
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            r[[row, p]] = r[[p, row]]
        others = np.flatnonzero(r[:, col])
        others = others[others != row]
        r[others] ^= r[row]
        pivots.append(col)
        row += 1
    return r[:row], pivots


def gf2_rank(a: np.ndarray) -> int:
    return len(gf2_rref(a)[1])


@dataclass(frozen=True)
class GeneratorMatrix:
    """``k x n`` generator with ``H @ G.T = 0``.

    ``rows[:, info_positions]`` is the identity, so message bit ``t`` appears
    verbatim at codeword position ``info_positions[t]``.
    """

    rows: np.ndarray
    info_positions: tuple[int, ...]

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    @property
    def permutation(self) -> np.ndarray:
        """Column order putting ``G`` in systematic form ``[I | P]``."""
        info = list(self.info_positions)
        rest = [j for j in range(self.n) if j not in set(info)]
        return np.array(info + rest, dtype=np.int64)


def derive_generator(h: ParityCheckMatrix) -> GeneratorMatrix:
    """Nullspace basis of ``H`` by Gauss-Jordan elimination with column pivoting.

    Dependent rows of ``H`` are dropped with a warning; ``k = n - rank(H)``.
    """
    reduced, pivots = gf2_rref(h.dense)
    rank = len(pivots)
    if rank < h.rows:
        warnings.warn(
            f"parity-check matrix has {h.rows - rank} dependent row(s); using rank {rank}",
            stacklevel=2,
        )
    if rank == h.cols:
        raise NoCodeError("rank(H) equals n: the only codeword is all-zero")
    free = [j for j in range(h.cols) if j not in set(pivots)]
    g = np.zeros((len(free), h.cols), dtype=np.uint8)
    for t, f in enumerate(free):
        g[t, f] = 1
        g[t, pivots] = reduced[:, f]
    g.flags.writeable = False
    return GeneratorMatrix(g, tuple(free))


def _bits(v, length: int, what: str) -> np.ndarray:
    a = np.asarray(v)
    if a.ndim != 1 or a.shape[0] != length:
        raise ValueError(f"{what} must have length {length}, got shape {a.shape}")
    return (a.astype(np.uint8) & 1)


def encode(message, g: GeneratorMatrix) -> np.ndarray:
    m = _bits(message, g.k, "message")
    return ((m.astype(np.int64) @ g.rows) & 1).astype(np.uint8)


def syndrome(c, h: ParityCheckMatrix) -> np.ndarray:
    bits = _bits(c, h.cols, "codeword")
    return ((h.dense.astype(np.int64) @ bits) & 1).astype(np.uint8)


def syndromes(words: np.ndarray, h: ParityCheckMatrix) -> np.ndarray:
    """Row-wise syndrome of a ``(count, n)`` array."""
    words = np.asarray(words)
    if words.ndim != 2 or words.shape[1] != h.cols:
        raise ValueError(f"expected (count, {h.cols}) array, got {words.shape}")
    return ((words.astype(np.int64) @ h.dense.T.astype(np.int64)) & 1).astype(np.uint8)


def codebook(g: GeneratorMatrix, limit: int = 24) -> np.ndarray:
    """All ``2**k`` codewords, message index order (bit 0 of the index is message bit 0)."""
    if g.k > limit:
        raise ValueError(f"k={g.k} exceeds enumeration limit {limit}")
    idx = np.arange(1 << g.k, dtype=np.int64)
    msgs = ((idx[:, None] >> np.arange(g.k)) & 1).astype(np.int64)
    return ((msgs @ g.rows) & 1).astype(np.uint8)


DATA_DIR = Path(__file__).parent / "data"


def builtin_code(name: str) -> Path:
    """Path of a bundled code file, e.g. ``builtin_code("ldpc_32_16")``."""
    path = DATA_DIR / f"{name}.alist"
    if not path.exists():
        raise FileNotFoundError(f"no bundled code named {name!r}")
    return path


def resolve_code(name_or_path) -> Path:
    """Accept a path or the name of a bundled code."""
    p = Path(name_or_path)
    if p.exists():
        return p
    return builtin_code(str(name_or_path))
