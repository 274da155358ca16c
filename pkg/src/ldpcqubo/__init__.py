"""LDPC decoding as a QUBO, solved by annealing and cleaned up by minimum-distance selection."""

from ._backend import backend_name
from .bp import bp_decode
from .channel import ChannelConfig, ReceivedVector, posterior, snr_to_sigma, transmit
from .codes import (
    GeneratorMatrix,
    ParityCheckMatrix,
    derive_generator,
    encode,
    load_code,
    parse_alist,
    syndrome,
    to_alist,
)
from .postprocess import DecodeResult, Selection, decode, filter_valid, select_min_distance
from .qubo import (
    Qubo,
    build_constraint_metric,
    build_distance_metric,
    compose,
    decoding_qubo,
    energy,
)
from .samplers import AnnealSchedule, ExternalSampler, SampleSet, sample_exhaustive, sample_sa

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule",
    "ChannelConfig",
    "DecodeResult",
    "ExternalSampler",
    "GeneratorMatrix",
    "ParityCheckMatrix",
    "Qubo",
    "ReceivedVector",
    "SampleSet",
    "Selection",
    "backend_name",
    "bp_decode",
    "build_constraint_metric",
    "build_distance_metric",
    "compose",
    "decode",
    "decoding_qubo",
    "derive_generator",
    "encode",
    "energy",
    "filter_valid",
    "load_code",
    "parse_alist",
    "posterior",
    "sample_exhaustive",
    "sample_sa",
    "select_min_distance",
    "snr_to_sigma",
    "syndrome",
    "to_alist",
    "transmit",
]
