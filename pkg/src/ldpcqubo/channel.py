"""BPSK over AWGN and per-bit posteriors.

SNR convention, used everywhere in this package: ``snr_db = 10 log10(Es / sigma**2)``
with symbol energy ``Es = 1`` and ``sigma**2`` the noise variance of each real
sample. Bit 0 is sent as +1, bit 1 as -1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

SNR_CONVENTION = "Es/sigma^2 per real sample, Es=1"

# float64 bounds that keep posteriors strictly inside (0, 1)
_P_LO = np.finfo(np.float64).tiny
_P_HI = 1.0 - np.finfo(np.float64).epsneg


def snr_to_sigma(snr_db: float) -> float:
    return float(np.sqrt(10.0 ** (-snr_db / 10.0)))


def sigma_to_snr(sigma: float) -> float:
    return float(-10.0 * np.log10(sigma**2))


def bpsk(bits) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def posterior(r, sigma: float):
    """``P(bit = 1 | r) = 1 / (1 + exp(2 r / sigma**2))``.

    Evaluated through the logistic function so large ``|r| / sigma**2`` neither
    overflows nor rounds to exactly 0 or 1.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    p = np.clip(expit(-2.0 * np.asarray(r, dtype=np.float64) / sigma**2), _P_LO, _P_HI)
    return float(p) if np.ndim(p) == 0 else p


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    seed: int | None = None

    @property
    def sigma(self) -> float:
        return snr_to_sigma(self.snr_db)


@dataclass(frozen=True, eq=False)
class ReceivedVector:
    samples: np.ndarray
    sigma: float
    posteriors: np.ndarray

    @classmethod
    def from_samples(cls, samples, sigma: float) -> "ReceivedVector":
        r = np.array(samples, dtype=np.float64)
        p = np.atleast_1d(posterior(r, sigma))
        r.flags.writeable = False
        p.flags.writeable = False
        return cls(r, float(sigma), p)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def snr_db(self) -> float:
        return sigma_to_snr(self.sigma)

    @property
    def llr(self) -> np.ndarray:
        """Channel LLR ``log P(0|r)/P(1|r) = 2 r / sigma**2``."""
        return 2.0 * self.samples / self.sigma**2

    def hard_decision(self) -> np.ndarray:
        return (self.samples < 0).astype(np.uint8)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "sample", "posterior"])
        for i, (r, p) in enumerate(zip(self.samples, self.posteriors)):
            w.writerow([i, repr(float(r)), repr(float(p))])
        return buf.getvalue()


def transmit(codeword, cfg: ChannelConfig, rng: np.random.Generator) -> ReceivedVector:
    """BPSK-modulate ``codeword`` and add i.i.d. Gaussian noise of std ``cfg.sigma``."""
    x = bpsk(codeword)
    sigma = cfg.sigma
    return ReceivedVector.from_samples(x + sigma * rng.standard_normal(x.shape[0]), sigma)


def read_samples(text: str) -> np.ndarray:
    """Received samples from text: whitespace/comma separated floats, or the
    CSV written by :meth:`ReceivedVector.to_csv`."""
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if rows and rows[0].split(",")[0].strip() == "index":
        reader = csv.DictReader(io.StringIO("\n".join(rows)))
        return np.array([float(row["sample"]) for row in reader])
    return np.array([float(tok) for ln in rows for tok in ln.replace(",", " ").split()])
