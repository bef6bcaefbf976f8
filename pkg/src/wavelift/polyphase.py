"""2x2 and 4x4 polyphase matrices of Laurent polynomials.

Component vectors are ordered ``[LL, HL, LH, HH]``. ``HL`` holds the
even-row/odd-column samples (horizontally high-pass after the transform),
``LH`` the odd-row/even-column samples.

A *step* maps the component vector ``x`` to ``M x``. Steps are listed in the
order they are applied, so the matrix of a step sequence is the product with
the first-applied step as the rightmost factor; :func:`compose` is the one
place that builds such products.

1-D convention: the low-pass output at index ``n`` sits on sample ``2n`` and
the high-pass output on sample ``2n + 1``. The 2x2 polyphase matrix has rows
``[low, high]`` and columns ``[even phase, odd phase]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

from .laurent import HORIZONTAL, VERTICAL, CoefficientModeError, LaurentPoly1, LaurentPoly2, orient

if TYPE_CHECKING:  # pragma: no cover
    from .wavelets import WaveletSpec

__all__ = [
    "COMPONENTS",
    "StepKind",
    "MatrixKindParams",
    "StepMatrix",
    "PolyMatrix2",
    "IdentityReport",
    "MissingOperatorError",
    "build_matrix",
    "identity",
    "matmul",
    "compose",
    "verify_scheme_identity",
    "build_1d_polyphase",
    "interleave_phases",
    "lifting_product_1d",
    "conv2d_polyphase",
]

COMPONENTS = ("LL", "HL", "LH", "HH")
LL, HL, LH, HH = range(4)

# full-resolution parity (row, col) of each component
COMPONENT_PARITY = ((0, 0), (0, 1), (1, 0), (1, 1))


class StepKind(enum.Enum):
    T_H = "T_H"
    T_V = "T_V"
    S_H = "S_H"
    S_V = "S_V"
    T_I = "T_I"
    R_I = "R_I"
    S_I = "S_I"
    T_E = "T_E"
    R_E = "R_E"
    S_E = "S_E"
    T_MONO = "T_MONO"
    S_MONO = "S_MONO"
    N_FULL = "N_FULL"
    IDENTITY = "IDENTITY"
    PRODUCT = "PRODUCT"


_PREDICT_KINDS = {StepKind.T_H, StepKind.T_V, StepKind.T_I, StepKind.T_E, StepKind.T_MONO}
_UPDATE_KINDS = {StepKind.S_H, StepKind.S_V, StepKind.S_I, StepKind.S_E, StepKind.S_MONO}
_BOTH_KINDS = {StepKind.R_I, StepKind.R_E, StepKind.N_FULL}


class MissingOperatorError(ValueError):
    """A step kind was built without an operator it needs."""


@dataclass(frozen=True)
class MatrixKindParams:
    predict: LaurentPoly1 | None = None
    update: LaurentPoly1 | None = None


@dataclass(frozen=True)
class StepMatrix:
    """A 4x4 lifting step over ``[LL, HL, LH, HH]``.

    ``needs_barrier`` marks whether the step must be preceded by a memory
    barrier; ``stage`` is the lifting-pair index it belongs to and ``label``
    a human-readable name such as ``T^H(P0)``.
    """

    entries: tuple
    kind: StepKind = StepKind.PRODUCT
    needs_barrier: bool = True
    stage: int = 0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.entries) != 4 or any(len(row) != 4 for row in self.entries):
            raise ValueError("StepMatrix needs 4x4 entries")
        modes = {e.exact for row in self.entries for e in row}
        if len(modes) != 1:
            raise ValueError("StepMatrix entries must share a coefficient mode")

    @property
    def exact(self) -> bool:
        return self.entries[0][0].exact

    def __getitem__(self, ij) -> LaurentPoly2:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "StepMatrix") -> "StepMatrix":
        return matmul(self, other)

    def with_barrier(self, flag: bool) -> "StepMatrix":
        return replace(self, needs_barrier=flag)

    def to_float(self) -> "StepMatrix":
        return replace(self, entries=tuple(tuple(e.to_float() for e in row) for row in self.entries))

    def is_identity(self) -> bool:
        return all(
            self.entries[i][j].is_one() if i == j else self.entries[i][j].is_zero()
            for i in range(4)
            for j in range(4)
        )

    def written_components(self) -> set[int]:
        """Rows whose output differs from the input component."""
        out = set()
        for i in range(4):
            for j in range(4):
                e = self.entries[i][j]
                if (i == j and not e.is_one()) or (i != j and not e.is_zero()):
                    out.add(i)
                    break
        return out

    def nonlocal_reads(self) -> dict[int, set]:
        """Per input component, the exponents that reach another position."""
        reads: dict[int, set] = {}
        for j in range(4):
            exps = set()
            for i in range(4):
                exps |= self.entries[i][j].nonlocal_exponents()
            if exps:
                reads[j] = exps
        return reads

    def max_shift(self) -> int:
        return max(e.max_shift() for row in self.entries for e in row)

    def max_abs_difference(self, other: "StepMatrix") -> tuple[float, tuple | None]:
        """Largest entrywise coefficient deviation and the first entry that differs."""
        worst, first = 0.0, None
        for i in range(4):
            for j in range(4):
                d = self.entries[i][j].max_abs_difference(other.entries[i][j])
                if d > 0 and first is None:
                    first = (i, j)
                worst = max(worst, d)
        return worst, first

    def render(self) -> str:
        lines = []
        for i, row in enumerate(self.entries):
            cells = "; ".join(f"{COMPONENTS[j]}: {e}" for j, e in enumerate(row) if not e.is_zero())
            lines.append(f"{COMPONENTS[i]} <- {cells}")
        return "\n".join(lines)


def _z(exact):
    return LaurentPoly2.zero(exact)


def _one(exact):
    return LaurentPoly2.one(exact)


def identity(exact: bool = True, **kw) -> StepMatrix:
    rows = tuple(tuple(_one(exact) if i == j else _z(exact) for j in range(4)) for i in range(4))
    kw.setdefault("kind", StepKind.IDENTITY)
    return StepMatrix(rows, **kw)


def build_matrix(
    kind: StepKind,
    params: MatrixKindParams,
    *,
    needs_barrier: bool = True,
    stage: int = 0,
    label: str = "",
) -> StepMatrix:
    """Build one of the named 4x4 step matrices from 1-D predict/update operators."""
    kind = StepKind(kind)
    p1, u1 = params.predict, params.update
    if kind in (_PREDICT_KINDS | _BOTH_KINDS) and p1 is None:
        raise MissingOperatorError(f"{kind.value} needs a predict operator")
    if kind in (_UPDATE_KINDS | _BOTH_KINDS) and u1 is None:
        raise MissingOperatorError(f"{kind.value} needs an update operator")
    if kind in (StepKind.IDENTITY, StepKind.PRODUCT):
        raise ValueError(f"{kind.value} is not a buildable step kind")

    present = [op for op in (p1, u1) if op is not None]
    exact = present[0].exact
    if any(op.exact != exact for op in present):
        raise ValueError("predict and update operators must share a coefficient mode")

    O, I = _z(exact), _one(exact)
    if p1 is not None:
        P, Ps = orient(p1, HORIZONTAL), orient(p1, VERTICAL)
    if u1 is not None:
        U, Us = orient(u1, HORIZONTAL), orient(u1, VERTICAL)

    if kind is StepKind.T_H:
        rows = [[I, O, O, O], [P, I, O, O], [O, O, I, O], [O, O, P, I]]
    elif kind is StepKind.T_V:
        rows = [[I, O, O, O], [O, I, O, O], [Ps, O, I, O], [O, Ps, O, I]]
    elif kind is StepKind.S_H:
        rows = [[I, U, O, O], [O, I, O, O], [O, O, I, U], [O, O, O, I]]
    elif kind is StepKind.S_V:
        rows = [[I, O, Us, O], [O, I, O, Us], [O, O, I, O], [O, O, O, I]]
    elif kind is StepKind.T_I:
        rows = [[I, O, O, O], [O, I, O, O], [O, O, I, O], [P * Ps, Ps, P, I]]
    elif kind is StepKind.R_I:
        rows = [[I, O, O, O], [P, I, O, Us], [Ps, O, I, U], [O, O, O, I]]
    elif kind is StepKind.S_I:
        rows = [[I, U, Us, -(U * Us)], [O, I, O, O], [O, O, I, O], [O, O, O, I]]
    elif kind is StepKind.T_E:
        rows = [[I, O, O, O], [P, I, O, O], [Ps, O, I, O], [-(P * Ps), O, O, I]]
    elif kind is StepKind.R_E:
        rows = [[I, U, Us, O], [O, I, O, O], [O, O, I, O], [O, Ps, P, I]]
    elif kind is StepKind.S_E:
        rows = [[I, O, O, U * Us], [O, I, O, Us], [O, O, I, U], [O, O, O, I]]
    elif kind is StepKind.T_MONO:
        rows = [[I, O, O, O], [P, I, O, O], [Ps, O, I, O], [P * Ps, Ps, P, I]]
    elif kind is StepKind.S_MONO:
        rows = [[I, U, Us, U * Us], [O, I, O, Us], [O, O, I, U], [O, O, O, I]]
    elif kind is StepKind.N_FULL:
        V = P * U + I
        Vs = V.transpose()
        rows = [
            [Vs * V, Vs * U, Us * V, Us * U],
            [Vs * P, Vs, Us * P, Us],
            [Ps * V, Ps * U, V, U],
            [Ps * P, Ps, P, I],
        ]
    else:  # pragma: no cover
        raise ValueError(kind)
    return StepMatrix(
        tuple(tuple(r) for r in rows),
        kind=kind,
        needs_barrier=needs_barrier,
        stage=stage,
        label=label or kind.value,
    )


def matmul(a: StepMatrix, b: StepMatrix) -> StepMatrix:
    """Matrix product ``a @ b`` (``b`` is applied first)."""
    if a.exact != b.exact:
        raise CoefficientModeError("exact and float step matrices cannot be mixed")
    exact = a.exact
    rows = []
    for i in range(4):
        row = []
        for j in range(4):
            acc = _z(exact)
            for k in range(4):
                x, y = a.entries[i][k], b.entries[k][j]
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        rows.append(tuple(row))
    return StepMatrix(tuple(rows), kind=StepKind.PRODUCT, needs_barrier=a.needs_barrier or b.needs_barrier)


def compose(steps: Sequence[StepMatrix]) -> StepMatrix:
    """Matrix of a step sequence given in application order."""
    if not steps:
        raise ValueError("cannot compose an empty step list")
    out = steps[0]
    for s in steps[1:]:
        out = matmul(s, out)
    return out


@dataclass
class IdentityReport:
    passed: bool
    exact: bool
    max_deviation: float
    first_mismatch: tuple | None
    scheme: str = ""
    wavelet: str = ""
    stage: int | None = None

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "float"

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "wavelet": self.wavelet,
            "stage": self.stage,
            "mode": self.mode,
            "max_deviation": self.max_deviation,
            "first_mismatch": (
                None
                if self.first_mismatch is None
                else [COMPONENTS[self.first_mismatch[0]], COMPONENTS[self.first_mismatch[1]]]
            ),
            "passed": self.passed,
        }


def verify_scheme_identity(
    steps: Sequence[StepMatrix], reference: StepMatrix, tol: float = 1e-12
) -> IdentityReport:
    """Compare the composed step sequence with ``reference``.

    Exact matrices are compared for identity; anything in float mode is
    compared entrywise within ``tol``.
    """
    if not steps:
        raise ValueError("step list is empty")
    exact = reference.exact and all(s.exact for s in steps)
    if not exact:
        steps = [s.to_float() for s in steps]
        reference = reference.to_float()
    product = compose(steps)
    dev, first = product.max_abs_difference(reference)
    if exact:
        mismatch = next(
            ((i, j) for i in range(4) for j in range(4) if product.entries[i][j] != reference.entries[i][j]),
            None,
        )
        return IdentityReport(mismatch is None, True, dev, mismatch)
    return IdentityReport(dev <= tol, False, dev, first if dev > tol else None)


# -- 1-D polyphase ----------------------------------------------------------


@dataclass(frozen=True)
class PolyMatrix2:
    """2x2 polyphase matrix; rows ``[low, high]``, columns ``[even, odd]``."""

    entries: tuple

    def __getitem__(self, ij) -> LaurentPoly1:
        return self.entries[ij[0]][ij[1]]

    @property
    def exact(self) -> bool:
        return self.entries[0][0].exact

    def __matmul__(self, other: "PolyMatrix2") -> "PolyMatrix2":
        a, b = self.entries, other.entries
        return PolyMatrix2(
            tuple(
                tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2))
                for i in range(2)
            )
        )

    def determinant(self) -> LaurentPoly1:
        a = self.entries
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]

    @classmethod
    def identity(cls, exact: bool = True) -> "PolyMatrix2":
        one, zero = LaurentPoly1.one(exact), LaurentPoly1.zero(exact)
        return cls(((one, zero), (zero, one)))


def build_1d_polyphase(g0: LaurentPoly1, g1: LaurentPoly1) -> PolyMatrix2:
    """Phase-split an analysis filter pair into its 2x2 polyphase matrix.

    With ``low[n] = sum g0[e] x[2n - e]`` and ``high[n] = sum g1[e] x[2n+1-e]``:
    ``G0e`` collects ``g0[2k]``, ``G0o`` collects ``g0[2k-1]``, ``G1e`` collects
    ``g1[2k+1]`` and ``G1o`` collects ``g1[2k]``, each at exponent ``k``.
    """
    exact = g0.exact
    g0e, g0o, g1e, g1o = {}, {}, {}, {}
    for e, c in g0.terms.items():
        if e % 2 == 0:
            g0e[e // 2] = c
        else:
            g0o[(e + 1) // 2] = c
    for e, c in g1.terms.items():
        if e % 2 == 0:
            g1o[e // 2] = c
        else:
            g1e[(e - 1) // 2] = c
    mk = lambda t: LaurentPoly1(t, exact=exact)  # noqa: E731
    return PolyMatrix2(((mk(g0e), mk(g0o)), (mk(g1e), mk(g1o))))


def interleave_phases(m: PolyMatrix2) -> tuple[LaurentPoly1, LaurentPoly1]:
    """Inverse of :func:`build_1d_polyphase`: recover ``(g0, g1)``."""
    exact = m.exact
    g0, g1 = {}, {}
    for k, c in m[0, 0].terms.items():
        g0[2 * k] = c
    for k, c in m[0, 1].terms.items():
        g0[2 * k - 1] = c
    for k, c in m[1, 0].terms.items():
        g1[2 * k + 1] = c
    for k, c in m[1, 1].terms.items():
        g1[2 * k] = c
    return LaurentPoly1(g0, exact=exact), LaurentPoly1(g1, exact=exact)


def lifting_product_1d(spec: "WaveletSpec", include_scaling: bool = False) -> PolyMatrix2:
    """Multiply the elementary predict/update matrices of ``spec``.

    Stage ``k`` contributes ``[[1, U_k], [0, 1]] @ [[1, 0], [P_k, 1]]``; the
    first stage is rightmost. The scaling diagonal ``diag(zeta, 1/zeta)`` is
    left out unless ``include_scaling`` is set.
    """
    if not spec.stages:
        raise ValueError("wavelet has no lifting stages")
    exact = spec.stages[0].predict.exact
    one, zero = LaurentPoly1.one(exact), LaurentPoly1.zero(exact)
    m = PolyMatrix2.identity(exact)
    for stage in spec.stages:
        predict = PolyMatrix2(((one, zero), (stage.predict, one)))
        update = PolyMatrix2(((one, stage.update), (zero, one)))
        m = update @ (predict @ m)
    if include_scaling:
        z = spec.zeta
        if exact:
            z = Fraction(z) if isinstance(z, (int, Fraction)) else None
            if z is None:
                raise ValueError("irrational scaling factor requires float mode")
        m = PolyMatrix2(((LaurentPoly1.constant(z, exact=exact), zero), (zero, LaurentPoly1.constant(1 / z, exact=exact)))) @ m
    return m


def conv2d_polyphase(filters: Sequence[LaurentPoly2]) -> StepMatrix:
    """4x4 polyphase matrix of four full-resolution 2-D analysis filters.

    ``filters`` are ``(F_LL, F_HL, F_LH, F_HH)``. Output subband ``s`` at
    component position ``(i, j)`` is ``sum F_s[em, en] x[2i + r_s - en, 2j + c_s - em]``
    where ``(r_s, c_s)`` is the subband's parity.
    """
    exact = filters[0].exact
    rows = []
    for s, filt in enumerate(filters):
        orow, ocol = COMPONENT_PARITY[s]
        acc = [dict() for _ in range(4)]
        for (em, en), c in filt.terms.items():
            pr, pc = (orow - en) % 2, (ocol - em) % 2
            j = COMPONENT_PARITY.index((pr, pc))
            km, kn = (em - ocol + pc) // 2, (en - orow + pr) // 2
            acc[j][(km, kn)] = acc[j].get((km, kn), 0) + c
        rows.append(tuple(LaurentPoly2(t, exact=exact) for t in acc))
    return StepMatrix(tuple(rows), kind=StepKind.PRODUCT, label="CONV")
