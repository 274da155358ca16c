"""Samplers: Qubo in, SampleSet out.

``sample_sa`` is single-flip Metropolis annealing on a geometric inverse-temperature
ladder; ``sample_exhaustive`` enumerates every assignment (small problems only);
``ExternalSampler`` hands the problem to another process through the sparse QUBO
text format and reads a sample file back.
"""

from __future__ import annotations

import logging
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from . import kernels
from .qubo import Qubo, energies

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 24


class SamplerContractError(RuntimeError):
    """A sampler returned something that does not fit the Qubo it was given."""


@dataclass(frozen=True)
class AnnealSchedule:
    beta_initial: float = 0.1
    beta_final: float = 10.0
    num_sweeps: int = 1000
    num_reads: int = 100

    def __post_init__(self):
        if not 0 < self.beta_initial < self.beta_final:
            raise ValueError("need 0 < beta_initial < beta_final")
        if self.num_sweeps < 1 or self.num_reads < 1:
            raise ValueError("num_sweeps and num_reads must be >= 1")

    def betas(self) -> np.ndarray:
        return np.geomspace(self.beta_initial, self.beta_final, self.num_sweeps)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Distinct assignments sorted by (energy, bits), with multiplicities."""

    samples: np.ndarray
    energies: np.ndarray
    counts: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_assignments(cls, assignments, qubo: Qubo, counts=None, meta=None) -> "SampleSet":
        """Merge duplicates, recompute energies against ``qubo`` and sort."""
        x = np.asarray(assignments)
        if x.ndim != 2 or x.shape[0] == 0:
            raise SamplerContractError("sampler returned no assignments")
        if x.shape[1] != qubo.num_vars:
            raise SamplerContractError(
                f"assignments have length {x.shape[1]}, qubo has {qubo.num_vars} variables"
            )
        if not np.isin(x, (0, 1)).all():
            raise SamplerContractError("assignments must be binary")
        x = x.astype(np.uint8)
        c = np.ones(x.shape[0], dtype=np.int64) if counts is None else np.asarray(counts, dtype=np.int64)
        if c.shape != (x.shape[0],) or (c < 1).any():
            raise SamplerContractError("counts must be positive, one per assignment")
        uniq, inverse = np.unique(x, axis=0, return_inverse=True)
        merged = np.zeros(uniq.shape[0], dtype=np.int64)
        np.add.at(merged, inverse.ravel(), c)
        e = energies(uniq, qubo)
        # np.unique already sorted rows lexicographically; stable sort keeps that for ties
        order = np.argsort(e, kind="stable")
        return cls(uniq[order], e[order], merged[order], dict(meta or {}))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def num_occurrences(self) -> int:
        return int(self.counts.sum())

    @property
    def lowest_energy(self) -> float:
        return float(self.energies[0])

    def equals(self, other: "SampleSet") -> bool:
        return (
            np.array_equal(self.samples, other.samples)
            and np.array_equal(self.energies, other.energies)
            and np.array_equal(self.counts, other.counts)
        )

    def to_text(self) -> str:
        """Sample-file format: ``<bits> <count> [energy]`` per line."""
        return "".join(
            f"{''.join('1' if b else '0' for b in s)} {int(c)} {float(e)!r}\n"
            for s, c, e in zip(self.samples, self.counts, self.energies)
        )


def read_sample_file(text: str, num_vars: int):
    """Parse ``<bits> <count> [energy]`` lines; returns (assignments, counts, energies-or-None)."""
    rows, counts, reported = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        bits = toks[0]
        if set(bits) - {"0", "1"}:
            raise SamplerContractError(f"line {lineno}: sample must be a 0/1 string")
        if len(bits) != num_vars:
            raise SamplerContractError(
                f"line {lineno}: sample has {len(bits)} bits, expected {num_vars}"
            )
        try:
            count = int(toks[1]) if len(toks) > 1 else 1
            reported.append(float(toks[2]) if len(toks) > 2 else np.nan)
        except ValueError:
            raise SamplerContractError(f"line {lineno}: malformed count/energy") from None
        rows.append([int(b) for b in bits])
        counts.append(count)
    if not rows:
        raise SamplerContractError("sample file is empty")
    return np.array(rows, dtype=np.uint8), np.array(counts), np.array(reported)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_sa(qubo: Qubo, schedule: AnnealSchedule | None = None, rng=None) -> SampleSet:
    """Simulated annealing, ``schedule.num_reads`` independent chains.

    Each chain is driven by one 64-bit key drawn from ``rng``; its random
    start and every acceptance draw are derived from that key alone. Chain
    ``r`` is therefore the same whatever ``num_reads`` is, so a run with more
    reads (same ``rng`` seed) returns a superset of the states of a shorter one.
    """
    schedule = schedule or AnnealSchedule()
    rng = _as_rng(rng)
    keys = rng.integers(0, np.iinfo(np.int64).max, size=schedule.num_reads, dtype=np.int64)
    init = kernels.initial_states(keys.astype(np.uint64), qubo.num_vars)
    indptr, indices, weights = qubo.csr
    final = kernels.sa_anneal(
        indptr, indices, weights, np.ascontiguousarray(qubo.linear, dtype=np.float64),
        schedule.betas(), keys.astype(np.uint64), init,
    )
    meta = {
        "sampler": "sa",
        "beta_initial": schedule.beta_initial,
        "beta_final": schedule.beta_final,
        "num_sweeps": schedule.num_sweeps,
        "num_reads": schedule.num_reads,
    }
    return SampleSet.from_assignments(final, qubo, meta=meta)


def _enumerate(num_vars: int) -> np.ndarray:
    idx = np.arange(1 << num_vars, dtype=np.int64)
    return ((idx[:, None] >> np.arange(num_vars)) & 1).astype(np.uint8)


def exhaustive_energies(qubo: Qubo) -> np.ndarray:
    """Energy of assignment ``t`` (bit ``v`` of ``t`` is variable ``v``) for all ``t``.

    Splits the variables into a low and a high block so only two ``2**(N/2)``
    enumerations and one cross-term product are materialised.
    """
    nv = qubo.num_vars
    lo = nv // 2
    hi = nv - lo
    q = qubo.dense()
    low = _enumerate(lo).astype(np.float64)
    high = _enumerate(hi).astype(np.float64)
    q_ll, q_hh, q_lh = q[:lo, :lo], q[lo:, lo:], q[:lo, lo:]
    e_low = np.einsum("ai,ij,aj->a", low, q_ll, low) if lo else np.zeros(1)
    e_high = np.einsum("ai,ij,aj->a", high, q_hh, high)
    cross = low @ q_lh @ high.T if lo else np.zeros((1, high.shape[0]))
    total = qubo.offset + e_low[:, None] + e_high[None, :] + cross
    # index t = low_index + high_index * 2**lo
    return total.T.reshape(-1)


def sample_exhaustive(qubo: Qubo, top_k: int | None = None) -> SampleSet:
    """Every assignment ranked by energy (or the ``top_k`` lowest)."""
    if qubo.num_vars > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive sampling limited to {EXHAUSTIVE_LIMIT} variables, got {qubo.num_vars}")
    e = exhaustive_energies(qubo)
    if top_k is not None and top_k < e.size:
        # keep a margin so float noise cannot evict a true member of the top k
        cut = np.partition(e, top_k - 1)[top_k - 1]
        idx = np.flatnonzero(e <= cut + 1e-9 * max(1.0, abs(cut)))
    else:
        idx = np.arange(e.size)
    nv = qubo.num_vars
    x = ((idx[:, None] >> np.arange(nv)) & 1).astype(np.uint8)
    e = energies(x, qubo)
    # rows are distinct; tie-break on bits with variable 0 most significant
    lex = (x.astype(np.int64) << np.arange(nv - 1, -1, -1)).sum(axis=1)
    order = np.lexsort((lex, e))
    if top_k is not None:
        order = order[:top_k]
    meta = {"sampler": "exhaustive", "top_k": top_k}
    return SampleSet(x[order], e[order], np.ones(order.size, dtype=np.int64), meta)


class Sampler(Protocol):
    def sample(self, qubo: Qubo) -> SampleSet: ...


@dataclass
class SimulatedAnnealingSampler:
    schedule: AnnealSchedule = field(default_factory=AnnealSchedule)
    seed: int | None = None

    def sample(self, qubo: Qubo, rng=None) -> SampleSet:
        return sample_sa(qubo, self.schedule, self.seed if rng is None else rng)


@dataclass
class ExhaustiveSampler:
    top_k: int | None = None

    def sample(self, qubo: Qubo, rng=None) -> SampleSet:
        return sample_exhaustive(qubo, self.top_k)


@dataclass
class ExternalSampler:
    """Run an external solver process.

    ``command`` is an argv list (or shell-style string) whose ``{qubo}`` and
    ``{out}`` placeholders are replaced by a QUBO file path and the path where
    the solver must write its sample file. ``{seed}`` is replaced when a seed
    is given. Energies in the sample file are recomputed locally.
    """

    command: list[str] | str
    timeout: float = 60.0

    def sample(self, qubo: Qubo, rng=None) -> SampleSet:
        argv = shlex.split(self.command) if isinstance(self.command, str) else list(self.command)
        seed = None
        if rng is not None:
            seed = int(_as_rng(rng).integers(0, 2**31 - 1))
        with tempfile.TemporaryDirectory(prefix="ldpcqubo-") as tmp:
            qpath = Path(tmp) / "problem.qubo"
            opath = Path(tmp) / "samples.txt"
            qpath.write_text(qubo.to_text())
            subs = {"qubo": str(qpath), "out": str(opath), "seed": "0" if seed is None else str(seed)}
            argv = [a.format(**subs) for a in argv]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
            except subprocess.TimeoutExpired:
                raise SamplerContractError(f"external sampler timed out after {self.timeout}s") from None
            if proc.returncode != 0:
                raise SamplerContractError(
                    f"external sampler exited with {proc.returncode}: {proc.stderr.strip()[-500:]}"
                )
            if not opath.exists():
                raise SamplerContractError("external sampler wrote no sample file")
            x, counts, reported = read_sample_file(opath.read_text(), qubo.num_vars)
        ss = SampleSet.from_assignments(x, qubo, counts, meta={"sampler": "external", "command": argv[0]})
        local = energies(x, qubo)
        bad = np.isfinite(reported) & ~np.isclose(reported, local, rtol=1e-9, atol=1e-9)
        if bad.any():
            log.warning("external sampler reported %d inconsistent energies; recomputed locally", int(bad.sum()))
            ss.meta["energy_corrections"] = int(bad.sum())
        return ss


SAMPLERS: dict[str, Callable[..., object]] = {
    "sa": SimulatedAnnealingSampler,
    "exhaustive": ExhaustiveSampler,
    "adapter": ExternalSampler,
}


def get_sampler(name: str, **kwargs):
    try:
        factory = SAMPLERS[name]
    except KeyError:
        raise ValueError(f"unknown sampler {name!r}; choose from {sorted(SAMPLERS)}") from None
    return factory(**kwargs)


def register_sampler(name: str, factory: Callable[..., object]) -> None:
    SAMPLERS[name] = factory
