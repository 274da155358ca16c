"""Turn a sample set into one decoded codeword.

Valid codewords among the samples are kept and the one closest (Euclidean)
to the received samples wins; if no sample is valid, the lowest-energy
sample's codeword bits are returned and flagged.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .channel import ReceivedVector, bpsk
from .codes import ParityCheckMatrix, syndrome, syndromes
from .samplers import SampleSet


class Selection(str, enum.Enum):
    MIN_DISTANCE = "min-distance"
    LOWEST_ENERGY_FALLBACK = "lowest-energy-fallback"
    BP_HARD_DECISION = "bp-hard-decision"
    ML_ENUMERATION = "ml-enumeration"


@dataclass(frozen=True, eq=False)
class DecodeResult:
    bits: np.ndarray
    valid: bool
    selection: Selection
    distance: float
    energy: float = float("nan")
    candidates_considered: int = 0
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "bits": "".join(str(int(b)) for b in self.bits),
            "valid": bool(self.valid),
            "selection": self.selection.value,
            "distance": float(self.distance),
            "energy": float(self.energy),
            "candidates_considered": int(self.candidates_considered),
            **self.meta,
        }


@dataclass(frozen=True, eq=False)
class Candidates:
    """Distinct valid codewords, in the energy order they were found."""

    bits: np.ndarray
    energies: np.ndarray

    def __len__(self) -> int:
        return self.bits.shape[0]


def squared_distances(words: np.ndarray, r: ReceivedVector) -> np.ndarray:
    return ((bpsk(words) - r.samples) ** 2).sum(axis=-1)


def filter_valid(samples: SampleSet, h: ParityCheckMatrix) -> Candidates:
    n = h.cols
    if samples.samples.shape[1] < n:
        raise ValueError("samples are shorter than the code")
    proj = samples.samples[:, :n]
    ok = ~syndromes(proj, h).any(axis=1)
    proj, e = proj[ok], samples.energies[ok]
    if proj.shape[0] == 0:
        return Candidates(np.zeros((0, n), dtype=np.uint8), np.zeros(0))
    # first occurrence = lowest energy, since samples are energy-sorted
    _, first = np.unique(proj, axis=0, return_index=True)
    first.sort()
    return Candidates(proj[first], e[first])


def select_min_distance(valid: Candidates, r: ReceivedVector) -> DecodeResult:
    """Closest candidate to ``r``; ties go to lower energy, then lexicographically smaller bits."""
    if len(valid) == 0:
        raise ValueError("no candidates to select from")
    d2 = squared_distances(valid.bits, r)
    # lexsort: last key is primary; bit columns reversed so bit 0 outranks bit 1
    best = np.lexsort((*valid.bits.T[::-1], valid.energies, d2))[0]
    return DecodeResult(
        bits=valid.bits[best].copy(),
        valid=True,
        selection=Selection.MIN_DISTANCE,
        distance=float(np.sqrt(d2[best])),
        energy=float(valid.energies[best]),
        candidates_considered=len(valid),
    )


def decode(samples: SampleSet, r: ReceivedVector, h: ParityCheckMatrix) -> DecodeResult:
    if len(samples) == 0:
        raise ValueError("empty sample set")
    valid = filter_valid(samples, h)
    if len(valid):
        return select_min_distance(valid, r)
    bits = samples.samples[0, : h.cols].copy()
    return DecodeResult(
        bits=bits,
        valid=not syndrome(bits, h).any(),
        selection=Selection.LOWEST_ENERGY_FALLBACK,
        distance=float(np.sqrt(squared_distances(bits, r))),
        energy=float(samples.energies[0]),
        candidates_considered=0,
    )


def ml_decode(r: ReceivedVector, book: np.ndarray) -> DecodeResult:
    """Maximum-likelihood codeword by scanning a full codebook (``codes.codebook``)."""
    corr = bpsk(book) @ r.samples
    # max correlation == min Euclidean distance for equal-energy BPSK words
    ties = np.flatnonzero(corr == corr.max())
    best = int(ties[np.lexsort(book[ties].T[::-1])[0]])
    bits = book[best].copy()
    return DecodeResult(
        bits=bits,
        valid=True,
        selection=Selection.ML_ENUMERATION,
        distance=float(np.sqrt(squared_distances(bits, r))),
        candidates_considered=int(book.shape[0]),
    )
