"""Lifting factorizations of the shipped wavelets and quantities derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as F

from .laurent import HORIZONTAL, VERTICAL, LaurentPoly1, LaurentPoly2, orient, split_scalar
from .polyphase import interleave_phases, lifting_product_1d

__all__ = [
    "LiftingStage",
    "WaveletSpec",
    "WAVELET_NAMES",
    "CDF97_CONSTANTS",
    "get_wavelet",
    "split_operators",
    "analysis_filters",
    "conv2d_filters",
]

WAVELET_NAMES = ("cdf53", "cdf97", "dd137")

# JPEG 2000 irreversible 9/7 lifting constants
CDF97_CONSTANTS = {
    "alpha": -1.586134342059924,
    "beta": -0.052980118572961,
    "gamma": 0.882911075530934,
    "delta": 0.443506852043971,
    "zeta": 1.149604398860241,
}


@dataclass(frozen=True)
class LiftingStage:
    predict: LaurentPoly1
    update: LaurentPoly1


@dataclass(frozen=True)
class WaveletSpec:
    """Ordered predict/update pairs plus the scaling factor ``zeta``."""

    name: str
    stages: tuple
    zeta: float

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a wavelet needs at least one lifting stage")
        if self.zeta == 0:
            raise ValueError("scaling factor must be nonzero")

    @property
    def exact(self) -> bool:
        return self.stages[0].predict.exact

    @property
    def K(self) -> int:
        return len(self.stages)

    def to_float(self) -> "WaveletSpec":
        return WaveletSpec(
            self.name,
            tuple(LiftingStage(s.predict.to_float(), s.update.to_float()) for s in self.stages),
            float(self.zeta),
        )


def _p(terms, exact=True):
    return LaurentPoly1(terms, exact=exact)


def _cdf53() -> WaveletSpec:
    half, quarter = F(-1, 2), F(1, 4)
    stage = LiftingStage(_p({0: half, -1: half}), _p({0: quarter, 1: quarter}))
    return WaveletSpec("cdf53", (stage,), math.sqrt(2.0))


def _cdf97() -> WaveletSpec:
    c = CDF97_CONSTANTS
    s0 = LiftingStage(_p({0: c["alpha"], -1: c["alpha"]}, False), _p({0: c["beta"], 1: c["beta"]}, False))
    s1 = LiftingStage(_p({0: c["gamma"], -1: c["gamma"]}, False), _p({0: c["delta"], 1: c["delta"]}, False))
    return WaveletSpec("cdf97", (s0, s1), c["zeta"])


def _dd137() -> WaveletSpec:
    predict = _p({1: F(1, 16), -2: F(1, 16), 0: F(-9, 16), -1: F(-9, 16)})
    update = _p({0: F(9, 32), 1: F(9, 32), -1: F(-1, 32), 2: F(-1, 32)})
    # no scaling factor is given for this wavelet; sqrt(2) keeps the DC gain of
    # the low band consistent with cdf53
    return WaveletSpec("dd137", (LiftingStage(predict, update),), math.sqrt(2.0))


_FACTORIES = {"cdf53": _cdf53, "cdf97": _cdf97, "dd137": _dd137}


def get_wavelet(name: str) -> WaveletSpec:
    try:
        return _FACTORIES[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown wavelet {name!r}; expected one of {', '.join(WAVELET_NAMES)}") from None


def split_operators(spec: WaveletSpec) -> list[tuple[LaurentPoly1, LaurentPoly1, LaurentPoly1, LaurentPoly1]]:
    """Per stage ``(P0, P1, U0, U1)`` where ``P0``/``U0`` are the exponent-0 terms."""
    out = []
    for stage in spec.stages:
        p0, p1 = split_scalar(stage.predict)
        u0, u1 = split_scalar(stage.update)
        out.append((p0, p1, u0, u1))
    return out


def analysis_filters(spec: WaveletSpec, include_scaling: bool = False) -> tuple[LaurentPoly1, LaurentPoly1]:
    """Low- and high-pass analysis filters ``(g0, g1)`` equivalent to the lifting steps.

    ``low[n] = sum_e g0[e] x[2n - e]`` and ``high[n] = sum_e g1[e] x[2n + 1 - e]``.
    """
    return interleave_phases(lifting_product_1d(spec, include_scaling=include_scaling))


def conv2d_filters(spec: WaveletSpec) -> tuple[LaurentPoly2, LaurentPoly2, LaurentPoly2, LaurentPoly2]:
    """Separable 2-D filters ``(F_LL, F_HL, F_LH, F_HH)``.

    The first letter of a subband names the horizontal filter, so
    ``F_HL = g1(z_m) * g0(z_n)``.
    """
    g0, g1 = analysis_filters(spec)
    lo_m, hi_m = orient(g0, HORIZONTAL), orient(g1, HORIZONTAL)
    lo_n, hi_n = orient(g0, VERTICAL), orient(g1, VERTICAL)
    return (lo_m * lo_n, hi_m * lo_n, lo_m * hi_n, hi_m * hi_n)
