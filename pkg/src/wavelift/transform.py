"""Run schemes on images: polyphase split/merge, step execution, forward/inverse, pyramids.

A monomial ``z_m^a z_n^b`` applied to a component plane ``X`` yields the plane
``X[r - b, c - a]``; planes are indexed ``[row, col]``.

Symmetric mode computes the transform of the image extended by whole-point
mirroring (``x[-k] = x[k]``, ``x[N-1+k] = x[N-1-k]``) to infinity. It is
evaluated by padding the full-resolution image, running the periodic steps,
and cropping. All shipped filters are symmetric, so the coefficients of a
mirrored image are themselves mirror-symmetric once interleaved, which is what
the inverse relies on.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .polyphase import COMPONENT_PARITY, MatrixKindParams, StepKind, StepMatrix, build_matrix
from .schemes import ConvStep, Scheme, SchemeKind, build_scheme
from .wavelets import WaveletSpec, conv2d_filters, get_wavelet

__all__ = [
    "BoundaryMode",
    "QuadGrid",
    "Pyramid",
    "OddDimensionError",
    "polyphase_split",
    "polyphase_merge",
    "apply_step",
    "apply_steps",
    "forward",
    "inverse",
    "inverse_steps",
    "multi_level_forward",
    "multi_level_inverse",
    "mirror_pad",
    "scheme_reach",
    "thread_count",
]


class BoundaryMode(enum.Enum):
    PERIODIC = "periodic"
    SYMMETRIC = "symmetric"

    @classmethod
    def parse(cls, value: "BoundaryMode | str") -> "BoundaryMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"boundary must be 'periodic' or 'symmetric', got {value!r}") from None


class OddDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class QuadGrid:
    """Four equally sized planes stacked as ``planes[c]`` with ``c`` in LL, HL, LH, HH order."""

    planes: np.ndarray

    def __post_init__(self):
        if self.planes.ndim != 3 or self.planes.shape[0] != 4:
            raise ValueError(f"QuadGrid needs a (4, h, w) array, got shape {self.planes.shape}")

    @classmethod
    def from_planes(cls, ll, hl, lh, hh) -> "QuadGrid":
        shapes = {np.shape(p) for p in (ll, hl, lh, hh)}
        if len(shapes) != 1:
            raise ValueError(f"plane shapes differ: {sorted(shapes)}")
        return cls(np.stack([np.asarray(p, dtype=np.float64) for p in (ll, hl, lh, hh)]))

    LL = property(lambda self: self.planes[0])
    HL = property(lambda self: self.planes[1])
    LH = property(lambda self: self.planes[2])
    HH = property(lambda self: self.planes[3])

    @property
    def shape(self) -> tuple[int, int]:
        return self.planes.shape[1:]

    def max_abs_difference(self, other: "QuadGrid", margin: int = 0) -> float:
        a, b = self.planes, other.planes
        if margin:
            a = a[:, margin:-margin, margin:-margin]
            b = b[:, margin:-margin, margin:-margin]
        if a.size == 0:
            return 0.0
        return float(np.max(np.abs(a - b)))


@dataclass(frozen=True)
class Pyramid:
    """Multi-level decomposition: ``details[0]`` is the finest level's (HL, LH, HH)."""

    details: tuple
    approx: np.ndarray

    @property
    def levels(self) -> int:
        return len(self.details)


def thread_count() -> int:
    """Worker count from ``WAVELIFT_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("WAVELIFT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"WAVELIFT_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("WAVELIFT_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _check_image(img) -> np.ndarray:
    x = np.asarray(img, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D image, got {x.ndim} dimensions")
    h, w = x.shape
    if h == 0 or w == 0 or h % 2 or w % 2:
        raise OddDimensionError(f"image dimensions must be even and positive, got {w}x{h}")
    return x


def polyphase_split(img) -> QuadGrid:
    x = _check_image(img)
    return QuadGrid(np.stack([x[r::2, c::2] for r, c in COMPONENT_PARITY]))


def polyphase_merge(q: QuadGrid) -> np.ndarray:
    h, w = q.shape
    out = np.empty((2 * h, 2 * w), dtype=np.float64)
    for plane, (r, c) in zip(q.planes, COMPONENT_PARITY):
        out[r::2, c::2] = plane
    return out


def mirror_pad(x: np.ndarray, width: int) -> np.ndarray:
    """Whole-point mirror extension (period ``2N - 2``) by ``width`` on every side."""
    if width == 0:
        return x
    if min(x.shape) < 2:
        raise ValueError("whole-point mirroring needs at least two samples per axis")
    return np.pad(x, width, mode="reflect")


# -- step execution ---------------------------------------------------------


def _compile(step: StepMatrix):
    """Rows that change, each as ``(row, [(col, kn, km, coeff), ...])`` in canonical order."""
    rows = []
    for i in range(4):
        entries = step.entries[i]
        if entries[i].is_one() and all(entries[j].is_zero() for j in range(4) if j != i):
            continue
        terms = []
        for j in range(4):
            for (km, kn), c in entries[j].items():
                terms.append((j, kn, km, float(c)))
        rows.append((i, terms))
    return rows


def _shifted(plane: np.ndarray, kn: int, km: int, r0: int, r1: int) -> np.ndarray:
    h = plane.shape[0]
    if r0 == 0 and r1 == h:
        rows = plane if kn == 0 else np.roll(plane, kn, axis=0)
    else:
        rows = plane[(np.arange(r0, r1) - kn) % h]
    return rows if km == 0 else np.roll(rows, km, axis=1)


def _evaluate_rows(src: np.ndarray, terms, r0: int, r1: int) -> np.ndarray:
    # fixed summation order keeps results independent of how rows are chunked
    acc = np.zeros((r1 - r0, src.shape[2]), dtype=np.float64)
    for j, kn, km, c in terms:
        acc += c * _shifted(src[j], kn, km, r0, r1)
    return acc


def _run_compiled(src: np.ndarray, compiled, workers: int) -> np.ndarray:
    out = src.copy()
    h = src.shape[1]
    if workers <= 1 or h < 2 * workers or src[0].size < 65536:
        for i, terms in compiled:
            out[i] = _evaluate_rows(src, terms, 0, h)
        return out
    bounds = np.linspace(0, h, workers + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    def work(job):
        (i, terms), (r0, r1) = job
        out[i, r0:r1] = _evaluate_rows(src, terms, r0, r1)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(work, [(row, ch) for row in compiled for ch in chunks]))
    return out


def _step_matrix(step) -> StepMatrix:
    return step.polyphase_matrix() if isinstance(step, ConvStep) else step


def apply_step(q: QuadGrid, step, boundary: BoundaryMode | str = BoundaryMode.PERIODIC) -> QuadGrid:
    """Out-of-place ``y = M x`` on the component grid.

    In symmetric mode the step's inputs are read through the whole-point
    mirror of the interleaved full-resolution image.
    """
    boundary = BoundaryMode.parse(boundary)
    m = _step_matrix(step)
    if boundary is BoundaryMode.PERIODIC:
        return QuadGrid(_run_compiled(q.planes, _compile(m), thread_count()))
    reach = m.max_shift()
    return _crop(apply_steps(_pad_grid(q, reach), [m]), reach)


def apply_steps(q: QuadGrid, steps: Iterable, workers: int | None = None) -> QuadGrid:
    """Apply ``steps`` in order with periodic wrap-around."""
    workers = thread_count() if workers is None else workers
    planes = q.planes
    for step in steps:
        planes = _run_compiled(planes, _compile(_step_matrix(step)), workers)
    return QuadGrid(planes)


def _pad_grid(q: QuadGrid, reach: int) -> QuadGrid:
    return polyphase_split(mirror_pad(polyphase_merge(q), 2 * reach))


def _crop(q: QuadGrid, reach: int) -> QuadGrid:
    if reach == 0:
        return q
    return QuadGrid(q.planes[:, reach:-reach, reach:-reach].copy())


def scheme_reach(steps: Sequence) -> int:
    """Largest distance, in component cells, over which the step sequence propagates data."""
    return sum(_step_matrix(s).max_shift() for s in steps)


# -- forward / inverse ------------------------------------------------------


def _resolve_scheme(scheme, wavelet) -> Scheme:
    if isinstance(scheme, Scheme):
        return scheme
    if wavelet is None:
        raise ValueError("a wavelet is required when the scheme is given by name")
    return build_scheme(scheme, wavelet)


def _convolve_direct(x: np.ndarray, filters) -> QuadGrid:
    planes = []
    for filt, (pr, pc) in zip(filters, COMPONENT_PARITY):
        acc = np.zeros_like(x)
        for (em, en), c in filt.items():
            acc += float(c) * np.roll(x, (en, em), axis=(0, 1))
        planes.append(acc[pr::2, pc::2])
    return QuadGrid(np.stack(planes))


def _scale(q: QuadGrid, zeta: float, inverse: bool = False) -> QuadGrid:
    factors = np.array([zeta**2, 1.0, 1.0, zeta**-2])
    if inverse:
        factors = 1.0 / factors
    return QuadGrid(q.planes * factors[:, None, None])


def forward(
    img,
    scheme: Scheme | SchemeKind | str = SchemeKind.SWELDENS,
    wavelet: WaveletSpec | str | None = "cdf53",
    boundary: BoundaryMode | str = BoundaryMode.PERIODIC,
    apply_scaling: bool = False,
) -> QuadGrid:
    """Single-level 2-D transform of ``img`` with the given scheme.

    ``scheme`` may be a built :class:`Scheme` (its own wavelet is used) or a
    kind name combined with ``wavelet``.
    """
    x = _check_image(img)
    sch = _resolve_scheme(scheme, wavelet)
    boundary = BoundaryMode.parse(boundary)
    reach = scheme_reach(sch.steps) if boundary is BoundaryMode.SYMMETRIC else 0
    if reach:
        x = mirror_pad(x, 2 * reach)
    if sch.kind is SchemeKind.CONVOLUTION:
        q = _convolve_direct(x, sch.steps[0].filters)
    else:
        q = apply_steps(polyphase_split(x), sch.steps)
    q = _crop(q, reach)
    return _scale(q, float(sch.wavelet.zeta)) if apply_scaling else q


def inverse_steps(wavelet: WaveletSpec) -> list[StepMatrix]:
    """Separable steps undoing the transform: last stage first, each step negated."""
    steps = []
    for k in reversed(range(wavelet.K)):
        st = wavelet.stages[k]
        neg_p, neg_u = -st.predict, -st.update
        for kind, p, u in (
            (StepKind.S_V, None, neg_u),
            (StepKind.S_H, None, neg_u),
            (StepKind.T_V, neg_p, None),
            (StepKind.T_H, neg_p, None),
        ):
            steps.append(build_matrix(kind, MatrixKindParams(p, u), stage=k))
    return steps


def inverse(
    q: QuadGrid,
    wavelet: WaveletSpec | str,
    boundary: BoundaryMode | str = BoundaryMode.PERIODIC,
    undo_scaling: bool = False,
) -> np.ndarray:
    """Reconstruct the image from a single-level QuadGrid produced by any scheme."""
    spec = get_wavelet(wavelet) if isinstance(wavelet, str) else wavelet
    boundary = BoundaryMode.parse(boundary)
    if undo_scaling:
        q = _scale(q, float(spec.zeta), inverse=True)
    steps = inverse_steps(spec)
    reach = scheme_reach(steps) if boundary is BoundaryMode.SYMMETRIC else 0
    if reach:
        q = _pad_grid(q, reach)
    x = polyphase_merge(apply_steps(q, steps))
    if reach:
        x = x[2 * reach : -2 * reach, 2 * reach : -2 * reach].copy()
    return x


def multi_level_forward(
    img,
    levels: int,
    scheme: Scheme | SchemeKind | str = SchemeKind.SWELDENS,
    wavelet: WaveletSpec | str | None = "cdf53",
    boundary: BoundaryMode | str = BoundaryMode.PERIODIC,
    apply_scaling: bool = False,
) -> Pyramid:
    x = np.asarray(img, dtype=np.float64)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    step = 2**levels
    if x.ndim != 2 or x.shape[0] % step or x.shape[1] % step or 0 in x.shape:
        raise OddDimensionError(f"image shape {x.shape} is not divisible by 2^{levels} = {step}")
    sch = _resolve_scheme(scheme, wavelet)
    details = []
    for _ in range(levels):
        q = forward(x, sch, None, boundary, apply_scaling)
        details.append((q.HL.copy(), q.LH.copy(), q.HH.copy()))
        x = q.LL.copy()
    return Pyramid(tuple(details), x)


def multi_level_inverse(
    pyr: Pyramid,
    wavelet: WaveletSpec | str,
    boundary: BoundaryMode | str = BoundaryMode.PERIODIC,
    undo_scaling: bool = False,
) -> np.ndarray:
    x = pyr.approx
    for hl, lh, hh in reversed(pyr.details):
        x = inverse(QuadGrid.from_planes(x, hl, lh, hh), wavelet, boundary, undo_scaling)
    return x
