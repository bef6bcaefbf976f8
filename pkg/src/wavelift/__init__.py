"""Two-dimensional lifting wavelet schemes with exact polyphase algebra."""

from .laurent import LaurentPoly1, LaurentPoly2
from .parsim import TileConfig, cells_report, simulate, traffic_report
from .polyphase import StepKind, StepMatrix, build_matrix, compose, verify_scheme_identity
from .schemes import SchemeKind, build_scheme, cost_table, count_barriers, count_macs, verify_scheme
from .transform import (
    BoundaryMode,
    QuadGrid,
    forward,
    inverse,
    multi_level_forward,
    multi_level_inverse,
    polyphase_merge,
    polyphase_split,
)
from .wavelets import WaveletSpec, get_wavelet

__all__ = [
    "LaurentPoly1",
    "LaurentPoly2",
    "TileConfig",
    "cells_report",
    "simulate",
    "traffic_report",
    "StepKind",
    "StepMatrix",
    "build_matrix",
    "compose",
    "verify_scheme_identity",
    "SchemeKind",
    "build_scheme",
    "cost_table",
    "count_barriers",
    "count_macs",
    "verify_scheme",
    "BoundaryMode",
    "QuadGrid",
    "forward",
    "inverse",
    "multi_level_forward",
    "multi_level_inverse",
    "polyphase_merge",
    "polyphase_split",
    "WaveletSpec",
    "get_wavelet",
]
