"""The ten named 2-D lifting schemes and their operation/barrier cost model.

A scheme is an ordered list of steps in application order. A step flagged
``needs_barrier`` starts a new synchronization epoch; unflagged steps share
the epoch of the step before them.

Cost convention: one multiply-accumulate per nonzero tap of every matrix
entry except a diagonal entry equal to the constant 1; the Convolution
scheme is charged the nonzero taps of its four 2-D filters; scaling is never counted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .polyphase import (
    IdentityReport,
    MatrixKindParams,
    StepKind,
    StepMatrix,
    build_matrix,
    compose,
    conv2d_polyphase,
    verify_scheme_identity,
)
from .wavelets import WaveletSpec, conv2d_filters, get_wavelet, split_operators

__all__ = [
    "SchemeKind",
    "TABLE_ORDER",
    "ConvStep",
    "Scheme",
    "CostReport",
    "REFERENCE_COSTS",
    "build_scheme",
    "count_macs",
    "count_barriers",
    "cost_table",
    "verify_scheme",
    "clear_barrier",
    "parse_scheme_kind",
]


class SchemeKind(enum.Enum):
    SWELDENS = "sweldens"
    IWAHASHI = "iwahashi"
    IWAHASHI_STAR = "iwahashi_star"
    EXPLOSIVE = "explosive"
    EXPLOSIVE_STAR = "explosive_star"
    MONOLITHIC = "monolithic"
    MONOLITHIC_STAR = "monolithic_star"
    POLYPHASE = "polyphase"
    POLYPHASE_STAR = "polyphase_star"
    CONVOLUTION = "convolution"

    @property
    def display_name(self) -> str:
        base = self.value.replace("_star", "")
        return base.capitalize() + ("*" if self.value.endswith("_star") else "")

    @property
    def is_star(self) -> bool:
        return self.value.endswith("_star")


TABLE_ORDER = tuple(SchemeKind)

# Published (barriers, operations) per wavelet and scheme.
REFERENCE_COSTS = {
    "cdf53": dict(zip(TABLE_ORDER, [(4, 16), (3, 24), (3, 18), (3, 24), (3, 18), (2, 24), (2, 18), (1, 63), (1, 23), (1, 64)])),
    "cdf97": dict(zip(TABLE_ORDER, [(8, 32), (6, 48), (6, 36), (6, 48), (6, 36), (4, 48), (4, 36), (2, 126), (2, 46), (1, 256)])),
    "dd137": dict(zip(TABLE_ORDER, [(4, 32), (3, 64), (3, 50), (3, 64), (3, 50), (2, 64), (2, 50), (1, 255), (1, 203), (1, 256)])),
}


def parse_scheme_kind(name: str | SchemeKind) -> SchemeKind:
    if isinstance(name, SchemeKind):
        return name
    key = name.strip().lower().replace("*", "_star").replace("-", "_")
    try:
        return SchemeKind(key)
    except ValueError:
        valid = ", ".join(k.value for k in SchemeKind)
        raise ValueError(f"unknown scheme {name!r}; expected one of {valid}") from None


@dataclass(frozen=True)
class ConvStep:
    """Direct evaluation of the four full-resolution 2-D analysis filters."""

    filters: tuple
    needs_barrier: bool = True
    stage: int = 0
    label: str = "CONV"

    def polyphase_matrix(self) -> StepMatrix:
        return replace(conv2d_polyphase(self.filters), needs_barrier=self.needs_barrier, stage=self.stage, label=self.label)


@dataclass(frozen=True)
class Scheme:
    kind: SchemeKind
    wavelet: WaveletSpec
    steps: tuple

    @property
    def name(self) -> str:
        return self.kind.value

    def epochs(self) -> list[list[int]]:
        """Step indices grouped by synchronization epoch.

        Steps before the first barrier form their own leading group.
        """
        groups: list[list[int]] = []
        for idx, step in enumerate(self.steps):
            if step.needs_barrier or not groups:
                groups.append([idx])
            else:
                groups[-1].append(idx)
        return groups

    def stage_steps(self, stage: int) -> list:
        return [s for s in self.steps if s.stage == stage]

    def matrices(self) -> list[StepMatrix]:
        """Every step as a 4x4 matrix (the Convolution step via its polyphase form)."""
        return [s.polyphase_matrix() if isinstance(s, ConvStep) else s for s in self.steps]

    def to_float(self) -> "Scheme":
        return replace(self, wavelet=self.wavelet.to_float(), steps=tuple(_to_float(s) for s in self.steps))


def _to_float(step):
    if isinstance(step, ConvStep):
        return replace(step, filters=tuple(f.to_float() for f in step.filters))
    return step.to_float()


@dataclass(frozen=True)
class CostReport:
    kind: SchemeKind
    wavelet: str
    barriers: int
    macs: int

    @property
    def reference(self) -> tuple[int, int] | None:
        return REFERENCE_COSTS.get(self.wavelet, {}).get(self.kind)

    @property
    def matches_reference(self) -> bool:
        return self.reference == (self.barriers, self.macs)


def _mk(kind, predict=None, update=None, *, barrier, stage, label):
    return build_matrix(kind, MatrixKindParams(predict, update), needs_barrier=barrier, stage=stage, label=label)


def _stage_steps(kind: SchemeKind, stage_idx: int, stage, split) -> list[StepMatrix]:
    P, U = stage.predict, stage.update
    p0, p1, u0, u1 = split
    k = stage_idx

    def m(step_kind, predict=None, update=None, *, barrier=True, label):
        return _mk(step_kind, predict, update, barrier=barrier, stage=k, label=label)

    def scalar_predicts():
        if p0.is_zero():
            return []
        return [
            m(StepKind.T_H, p0, barrier=False, label="T^H(P0)"),
            m(StepKind.T_V, p0, barrier=False, label="T^V(P0)"),
        ]

    def scalar_updates():
        if u0.is_zero():
            return []
        return [
            m(StepKind.S_H, update=u0, barrier=False, label="S^H(U0)"),
            m(StepKind.S_V, update=u0, barrier=False, label="S^V(U0)"),
        ]

    if kind is SchemeKind.SWELDENS:
        return [
            m(StepKind.T_H, P, label="T^H(P)"),
            m(StepKind.T_V, P, label="T^V(P)"),
            m(StepKind.S_H, update=U, label="S^H(U)"),
            m(StepKind.S_V, update=U, label="S^V(U)"),
        ]
    if kind is SchemeKind.IWAHASHI:
        return [
            m(StepKind.T_I, P, label="T^I(P)"),
            m(StepKind.R_I, P, U, label="R^I(P,U)"),
            m(StepKind.S_I, update=U, label="S^I(U)"),
        ]
    if kind is SchemeKind.EXPLOSIVE:
        return [
            m(StepKind.T_E, P, label="T^E(P)"),
            m(StepKind.R_E, P, U, label="R^E(P,U)"),
            m(StepKind.S_E, update=U, label="S^E(U)"),
        ]
    if kind is SchemeKind.MONOLITHIC:
        return [m(StepKind.T_MONO, P, label="T(P)"), m(StepKind.S_MONO, update=U, label="S(U)")]
    if kind is SchemeKind.POLYPHASE:
        return [m(StepKind.N_FULL, P, U, label="N(P,U)")]
    if kind is SchemeKind.IWAHASHI_STAR:
        return [
            *scalar_predicts(),
            m(StepKind.T_I, p1, label="T^I(P1)"),
            m(StepKind.R_I, p1, u1, label="R^I(P1,U1)"),
            m(StepKind.S_I, update=u1, label="S^I(U1)"),
            *scalar_updates(),
        ]
    if kind is SchemeKind.EXPLOSIVE_STAR:
        return [
            *scalar_predicts(),
            m(StepKind.T_E, p1, label="T^E(P1)"),
            m(StepKind.R_E, p1, u1, label="R^E(P1,U1)"),
            m(StepKind.S_E, update=u1, label="S^E(U1)"),
            *scalar_updates(),
        ]
    if kind is SchemeKind.MONOLITHIC_STAR:
        return [
            m(StepKind.T_MONO, p1, label="T(P1)"),
            *scalar_predicts(),
            m(StepKind.S_MONO, update=u1, label="S(U1)"),
            *scalar_updates(),
        ]
    if kind is SchemeKind.POLYPHASE_STAR:
        return [
            *scalar_predicts(),
            m(StepKind.N_FULL, p1, u1, label="N(P1,U1)"),
            *scalar_updates(),
        ]
    raise ValueError(f"no per-stage construction for {kind}")  # pragma: no cover


def build_scheme(kind: SchemeKind | str, wavelet: WaveletSpec | str) -> Scheme:
    """Assemble the step list of ``kind`` for ``wavelet`` (stages concatenated)."""
    kind = parse_scheme_kind(kind)
    if isinstance(wavelet, str):
        wavelet = get_wavelet(wavelet)
    if kind is SchemeKind.CONVOLUTION:
        return Scheme(kind, wavelet, (ConvStep(conv2d_filters(wavelet)),))
    steps: list = []
    for k, (stage, split) in enumerate(zip(wavelet.stages, split_operators(wavelet))):
        steps.extend(_stage_steps(kind, k, stage, split))
    return Scheme(kind, wavelet, tuple(steps))


def _step_macs(step) -> int:
    if isinstance(step, ConvStep):
        return sum(f.tap_count() for f in step.filters)
    total = 0
    for i, row in enumerate(step.entries):
        for j, entry in enumerate(row):
            if i == j and entry.is_one():
                continue
            total += entry.tap_count()
    return total


def count_macs(scheme: Scheme) -> int:
    return sum(_step_macs(s) for s in scheme.steps)


def count_barriers(scheme: Scheme) -> int:
    return sum(1 for s in scheme.steps if s.needs_barrier)


def cost_table(
    wavelets: Iterable[str | WaveletSpec] = ("cdf53", "cdf97", "dd137"),
    kinds: Sequence[SchemeKind | str] = TABLE_ORDER,
) -> list[CostReport]:
    """Costs for every (wavelet, scheme) pair, wavelet-major in table row order."""
    kinds = sorted((parse_scheme_kind(k) for k in kinds), key=TABLE_ORDER.index)
    out = []
    for w in wavelets:
        spec = get_wavelet(w) if isinstance(w, str) else w
        for kind in kinds:
            scheme = build_scheme(kind, spec)
            out.append(CostReport(kind, spec.name, count_barriers(scheme), count_macs(scheme)))
    return out


def verify_scheme(scheme: Scheme, tol: float = 1e-12) -> list[IdentityReport]:
    """Check the scheme's step product against the reference polyphase matrix.

    Lifting schemes are checked stage by stage against ``N(P, U)`` of that
    stage; the Convolution scheme is checked as a whole against the product
    of every stage's ``N``.
    """
    wavelet = scheme.wavelet
    stage_refs = [
        _mk(StepKind.N_FULL, s.predict, s.update, barrier=True, stage=k, label="N")
        for k, s in enumerate(wavelet.stages)
    ]
    reports = []
    if scheme.kind is SchemeKind.CONVOLUTION:
        rep = verify_scheme_identity(scheme.matrices(), compose(stage_refs), tol)
        rep.scheme, rep.wavelet = scheme.name, wavelet.name
        return [rep]
    for k, ref in enumerate(stage_refs):
        rep = verify_scheme_identity(scheme.stage_steps(k), ref, tol)
        rep.scheme, rep.wavelet, rep.stage = scheme.name, wavelet.name, k
        reports.append(rep)
    return reports


def clear_barrier(scheme: Scheme, n: int) -> Scheme:
    """Copy of ``scheme`` with its ``n``-th (1-based) barrier flag cleared."""
    barriered = [i for i, s in enumerate(scheme.steps) if s.needs_barrier]
    if not 1 <= n <= len(barriered):
        raise ValueError(f"scheme has {len(barriered)} barriers; cannot clear barrier {n}")
    idx = barriered[n - 1]
    steps = list(scheme.steps)
    steps[idx] = replace(steps[idx], needs_barrier=False)
    return replace(scheme, steps=tuple(steps))


def stage_reference(wavelet: WaveletSpec, stage: int) -> StepMatrix:
    s = wavelet.stages[stage]
    return _mk(StepKind.N_FULL, s.predict, s.update, barrier=True, stage=stage, label="N")
