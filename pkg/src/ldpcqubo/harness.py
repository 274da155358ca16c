"""Monte Carlo BER/FER experiments.

Every trial is seeded from ``master_seed + trial_index`` alone, so results do
not depend on how trials are split across workers or in which order they run.
All decoders of a trial see the same received vector.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .bp import DEFAULT_MAX_ITERS, bp_decode
from .channel import SNR_CONVENTION, ChannelConfig, ReceivedVector, transmit
from .codes import ParityCheckMatrix, codebook, derive_generator, encode, load_code, resolve_code
from .postprocess import DecodeResult, decode, ml_decode
from .qubo import build_constraint_metric, build_distance_metric, compose
from .samplers import (
    EXHAUSTIVE_LIMIT,
    AnnealSchedule,
    ExternalSampler,
    sample_exhaustive,
    sample_sa,
)

log = logging.getLogger(__name__)

DECODERS = ("sa", "bp", "exhaustive", "adapter")
# Experiment defaults, calibrated on the bundled (32,16) code: W1 = 0.5 lets
# the constraint term swamp the soft information and SA then settles on
# far codewords; W1 >= 3 starts to produce invalid ground states. For a fixed
# budget of reads x sweeps, many short anneals beat few long ones because the
# post-processing step feeds on distinct valid candidates.
DEFAULT_W1 = 2.0
DEFAULT_W2 = 1.0
DEFAULT_SCHEDULE = AnnealSchedule(beta_initial=0.2, beta_final=5.0, num_sweeps=100, num_reads=1000)
Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


@dataclass(frozen=True)
class ExperimentConfig:
    code: str = "ldpc_32_16"
    decoders: tuple[str, ...] = ("sa", "bp")
    snr_db: tuple[float, ...] = (4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)
    tv_mu: float = 5.0
    tv_sigma: float = 2.0
    tv_floor_db: float = -5.0
    trials: int = 10_000
    w1: float = DEFAULT_W1
    w2: float = DEFAULT_W2
    beta_initial: float = DEFAULT_SCHEDULE.beta_initial
    beta_final: float = DEFAULT_SCHEDULE.beta_final
    num_sweeps: int = DEFAULT_SCHEDULE.num_sweeps
    num_reads: int = DEFAULT_SCHEDULE.num_reads
    bp_max_iters: int = DEFAULT_MAX_ITERS
    exhaustive_top_k: int | None = None
    adapter_command: tuple[str, ...] = ()
    adapter_timeout: float = 60.0
    message: str = "random"
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.decoders) - set(DECODERS)
        if unknown or not self.decoders:
            raise ValueError(f"decoders must be a non-empty subset of {DECODERS}, got {self.decoders}")
        if "adapter" in self.decoders and not self.adapter_command:
            raise ValueError("decoder 'adapter' needs adapter_command")
        if self.message not in ("random", "zeros"):
            raise ValueError("message must be 'random' or 'zeros'")
        if self.tv_sigma < 0:
            raise ValueError("tv_sigma must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.schedule  # validates the annealing parameters

    @property
    def schedule(self) -> AnnealSchedule:
        return AnnealSchedule(self.beta_initial, self.beta_final, self.num_sweeps, self.num_reads)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["decoders"] = list(self.decoders)
        d["snr_db"] = list(self.snr_db)
        d["adapter_command"] = list(self.adapter_command)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        for key in ("decoders", "snr_db", "adapter_command"):
            if key in d and d[key] is not None:
                d[key] = tuple(d[key])
        if "snr_db" in d:
            d["snr_db"] = tuple(float(s) for s in d["snr_db"])
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass(frozen=True)
class TrialRecord:
    snr_db: float
    decoder: str
    bit_errors: int
    frame_error: bool
    fallback_used: bool
    wall_time: float


class CodeContext:
    """Per-process cache of everything derived from the code file."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.h: ParityCheckMatrix = load_code(resolve_code(cfg.code))
        self.g = derive_generator(self.h)
        self.constraint = build_constraint_metric(self.h)
        self._book = None
        self.adapter = (
            ExternalSampler(list(cfg.adapter_command), cfg.adapter_timeout) if cfg.adapter_command else None
        )

    @property
    def book(self) -> np.ndarray:
        if self._book is None:
            self._book = codebook(self.g)
        return self._book

    def decode(self, name: str, rx: ReceivedVector, seed: int) -> DecodeResult:
        cfg = self.cfg
        if name == "bp":
            return bp_decode(rx, self.h, cfg.bp_max_iters)
        if name == "exhaustive" and self.constraint.num_vars > EXHAUSTIVE_LIMIT:
            # full enumeration + min-distance selection reduces to ML over the codebook
            return ml_decode(rx, self.book)
        qubo = compose(build_distance_metric(rx.posteriors), self.constraint, cfg.w1, cfg.w2)
        if name == "sa":
            samples = sample_sa(qubo, cfg.schedule, np.random.default_rng([seed, 1]))
        elif name == "exhaustive":
            samples = sample_exhaustive(qubo, cfg.exhaustive_top_k)
        elif name == "adapter":
            samples = self.adapter.sample(qubo, np.random.default_rng([seed, 2]))
        else:
            raise ValueError(f"unknown decoder {name!r}")
        return decode(samples, rx, self.h)


_CTX: dict[str, CodeContext] = {}


def _context(cfg: ExperimentConfig) -> CodeContext:
    key = json.dumps(cfg.to_dict(), sort_keys=True)
    if key not in _CTX:
        _CTX.clear()
        _CTX[key] = CodeContext(cfg)
    return _CTX[key]


def make_frame(ctx: CodeContext, snr_db: float | None, seed: int):
    """Message, codeword and received vector for one trial. ``snr_db=None`` draws it."""
    cfg = ctx.cfg
    rng = np.random.default_rng(seed)
    if snr_db is None:
        snr_db = max(cfg.tv_floor_db, float(rng.normal(cfg.tv_mu, cfg.tv_sigma)))
    if cfg.message == "zeros":
        msg = np.zeros(ctx.g.k, dtype=np.uint8)
    else:
        msg = rng.integers(0, 2, ctx.g.k, dtype=np.uint8)
    c = encode(msg, ctx.g)
    rx = transmit(c, ChannelConfig(snr_db, seed), rng)
    return snr_db, c, rx


def run_trial(ctx: CodeContext, snr_db: float | None, trial_index: int):
    seed = ctx.cfg.master_seed + trial_index
    snr, c, rx = make_frame(ctx, snr_db, seed)
    records = []
    for name in ctx.cfg.decoders:
        t0 = time.perf_counter()
        res = ctx.decode(name, rx, seed)
        dt = time.perf_counter() - t0
        errs = int(np.count_nonzero(res.bits != c))
        records.append(TrialRecord(snr, name, errs, errs > 0, res.selection.value == "lowest-energy-fallback", dt))
    return snr, records


def _run_chunk(args):
    cfg, snr_db, start, stop = args
    ctx = _context(cfg)
    counts = {d: [0, 0, 0, 0.0] for d in cfg.decoders}
    frames = []
    for t in range(start, stop):
        snr, recs = run_trial(ctx, snr_db, t)
        for r in recs:
            c = counts[r.decoder]
            c[0] += r.bit_errors
            c[1] += r.frame_error
            c[2] += r.fallback_used
            c[3] += r.wall_time
        if snr_db is None:
            frames.append((t, snr, tuple(not r.frame_error for r in recs)))
    return counts, frames


def _chunks(total: int, workers: int, offset: int):
    size = max(1, math.ceil(total / (workers * 4)))
    return [(offset + a, offset + min(total, a + size)) for a in range(0, total, size)]


def _execute(cfg: ExperimentConfig, snr_db: float | None, offset: int):
    jobs = [(cfg, snr_db, a, b) for a, b in _chunks(cfg.trials, cfg.workers, offset)]
    totals = {d: [0, 0, 0, 0.0] for d in cfg.decoders}
    frames = []
    if cfg.workers == 1:
        results = map(_run_chunk, jobs)
    else:
        pool = ProcessPoolExecutor(cfg.workers)
        results = pool.map(_run_chunk, jobs)
    for counts, fr in results:
        for d, c in counts.items():
            for i in range(4):
                totals[d][i] += c[i]
        frames.extend(fr)
    if cfg.workers > 1:
        pool.shutdown()
    frames.sort()
    return totals, frames


@dataclass(frozen=True)
class ResultRow:
    snr: str
    decoder: str
    trials: int
    n: int
    bit_errors: int
    frame_errors: int
    fallbacks: int
    ber: float
    ber_lo: float
    ber_hi: float
    fer: float
    fer_lo: float
    fer_hi: float

    @property
    def fraction_correct(self) -> float:
        return 1.0 - self.fer

    @property
    def fraction_correct_ci(self) -> tuple[float, float]:
        return (1.0 - self.fer_hi, 1.0 - self.fer_lo)


def _row(snr: str, decoder: str, trials: int, n: int, bit_errors: int, frame_errors: int, fallbacks: int):
    ber_lo, ber_hi = wilson_interval(bit_errors, trials * n)
    fer_lo, fer_hi = wilson_interval(frame_errors, trials)
    return ResultRow(
        snr, decoder, trials, n, bit_errors, frame_errors, fallbacks,
        bit_errors / (trials * n), ber_lo, ber_hi, frame_errors / trials, fer_lo, fer_hi,
    )


@dataclass
class ResultTable:
    config: dict
    rows: list[ResultRow] = field(default_factory=list)
    frames: list[tuple] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def get(self, snr, decoder: str) -> ResultRow:
        key = snr if isinstance(snr, str) else _fmt_snr(snr)
        for r in self.rows:
            if r.snr == key and r.decoder == decoder:
                return r
        raise KeyError((snr, decoder))


def _fmt_snr(s: float) -> str:
    return repr(float(s))


def run_fixed_snr(cfg: ExperimentConfig) -> ResultTable:
    """BER/FER per (SNR point, decoder). Trial indices run on across SNR points."""
    table = ResultTable(config=cfg.to_dict())
    n = _context(cfg).h.cols
    for p, snr in enumerate(cfg.snr_db):
        totals, _ = _execute(cfg, float(snr), p * cfg.trials)
        for d in cfg.decoders:
            be, fe, fb, wall = totals[d]
            table.rows.append(_row(_fmt_snr(snr), d, cfg.trials, n, be, fe, fb))
            table.timing[(_fmt_snr(snr), d)] = wall / cfg.trials
            log.info("snr=%s %s FER=%.3g BER=%.3g", snr, d, fe / cfg.trials, be / (cfg.trials * n))
    return table


def tv_label(cfg: ExperimentConfig) -> str:
    return f"N({cfg.tv_mu!r},{cfg.tv_sigma!r})"


def run_time_varying(cfg: ExperimentConfig) -> ResultTable:
    """Per-frame SNR drawn from N(tv_mu, tv_sigma), clamped below at tv_floor_db."""
    table = ResultTable(config=cfg.to_dict())
    n = _context(cfg).h.cols
    totals, frames = _execute(cfg, None, 0)
    for d in cfg.decoders:
        be, fe, fb, wall = totals[d]
        table.rows.append(_row(tv_label(cfg), d, cfg.trials, n, be, fe, fb))
        table.timing[(tv_label(cfg), d)] = wall / cfg.trials
    table.frames = frames
    return table


# ------------------------------------------------------------------- output

COLUMNS = [f for f in ResultRow.__dataclass_fields__]


def _cell(v):
    return repr(v) if isinstance(v, float) else str(v)


def results_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(table.config, sort_keys=True) + "\n")
    buf.write(f"# snr_convention: {SNR_CONVENTION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in table.rows:
        w.writerow([_cell(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def frames_csv(table: ResultTable) -> str:
    decoders = table.config["decoders"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["frame", "snr_db", *[f"{d}_correct" for d in decoders]])
    for t, snr, ok in table.frames:
        w.writerow([t, repr(float(snr)), *[int(x) for x in ok]])
    return buf.getvalue()


def emit_results(table: ResultTable, path, frames_path=None) -> None:
    Path(path).write_text(results_csv(table))
    if frames_path is not None:
        Path(frames_path).write_text(frames_csv(table))


def read_results(path) -> ResultTable:
    text = Path(path).read_text()
    config: dict = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# config: "):
            config = json.loads(line[len("# config: "):])
        elif not line.startswith("#"):
            body.append(line)
    rows = []
    for rec in csv.DictReader(io.StringIO("\n".join(body))):
        kw = {}
        for name, f in ResultRow.__dataclass_fields__.items():
            v = rec[name]
            kw[name] = v if f.type == "str" else (int(v) if f.type == "int" else float(v))
        rows.append(ResultRow(**kw))
    return ResultTable(config=config, rows=rows)


def checksum(rx: ReceivedVector) -> str:
    return hashlib.sha256(rx.samples.tobytes()).hexdigest()
