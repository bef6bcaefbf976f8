"""Deterministic simulation of tiled, barrier-synchronized scheme execution.

Each tile is a work-group holding its component cells plus a halo; every cell
position is one thread owning a coefficient quadruple. Threads see their own
cells live. Cells owned by other threads are seen as they stood at the most
recent barrier. A barriered step begins a new epoch. Reading another thread's
cell that was written in the reader's own epoch is a race hazard: on real
hardware the value would depend on timing.

The memory-traffic and storage figures come from a static model over epoch
groups (a barriered step plus the unbarriered steps after it):

* ``R(g)``: components some step of group ``g`` reads from a neighbouring
  position; ``W(g)``: components written in ``g``.
* reads per quadruple: distinct neighbouring cells per input component, summed
  over steps;
* writes per quadruple: stores into shared tile storage, i.e. a component
  written by the load or by group ``g`` whose next writer-or-neighbour-reader
  is a neighbour reader;
* single-buffered cells: peak ``|R(g)|``; double-buffered cells: peak
  ``|R(g)| + |W(g) & R(g+1)|`` (values read now plus values being prepared
  for the next group).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .polyphase import COMPONENTS
from .schemes import Scheme, SchemeKind
from .transform import BoundaryMode, QuadGrid, _check_image, _compile, mirror_pad, polyphase_split

__all__ = [
    "Buffering",
    "TileConfig",
    "Hazard",
    "ExecTrace",
    "TrafficReport",
    "CellsReport",
    "InsufficientHaloError",
    "required_halo",
    "simulate",
    "detect_hazards",
    "epoch_footprints",
    "split_barriers",
    "traffic_report",
    "cells_report",
    "REFERENCE_TRAFFIC",
    "REFERENCE_CELLS",
]


class Buffering(enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"

    @classmethod
    def parse(cls, value) -> "Buffering":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"buffering must be 'single' or 'double', got {value!r}") from None


class InsufficientHaloError(ValueError):
    pass


@dataclass(frozen=True)
class TileConfig:
    """Tile geometry in component-grid cells. ``halo=None`` picks :func:`required_halo`."""

    tile_w: int = 16
    tile_h: int = 16
    halo: int | None = None
    buffering: Buffering = Buffering.DOUBLE

    def __post_init__(self):
        for name in ("tile_w", "tile_h"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v <= 0 or v % 2:
                raise ValueError(f"{name} must be an even positive integer, got {v!r}")
        if self.halo is not None and self.halo < 0:
            raise ValueError("halo must be nonnegative")
        object.__setattr__(self, "buffering", Buffering.parse(self.buffering))


# Published per-quadruple traffic: (write constant, writes per stage,
# reads per stage for 2-tap operators, reads per stage for 4-tap operators).
REFERENCE_TRAFFIC = {
    SchemeKind.SWELDENS: (1, 4, 8, 24),
    SchemeKind.IWAHASHI: (2, 4, 10, 42),
    SchemeKind.IWAHASHI_STAR: (0, 6, 10, 42),
    SchemeKind.EXPLOSIVE: (0, 4, 10, 42),
    SchemeKind.EXPLOSIVE_STAR: (0, 4, 10, 42),
    SchemeKind.MONOLITHIC: (0, 6, 10, 42),
    SchemeKind.MONOLITHIC_STAR: (0, 6, 10, 42),
    SchemeKind.POLYPHASE: (0, 4, 21, 117),
    SchemeKind.POLYPHASE_STAR: (0, 4, 12, 117),
}

# Published cells per quadruple: (single, double, double when stages are chained).
REFERENCE_CELLS = {
    SchemeKind.SWELDENS: (2, 3, 3),
    SchemeKind.IWAHASHI: (3, 4, 4),
    SchemeKind.IWAHASHI_STAR: (3, 4, 6),
    SchemeKind.EXPLOSIVE: (2, 3, 3),
    SchemeKind.EXPLOSIVE_STAR: (2, 3, 3),
    SchemeKind.MONOLITHIC: (3, 6, 6),
    SchemeKind.MONOLITHIC_STAR: (3, 6, 6),
    SchemeKind.POLYPHASE: (4, 4, 8),
    SchemeKind.POLYPHASE_STAR: (4, 4, 8),
}


@dataclass(frozen=True)
class Hazard:
    step: int
    tile: int
    reader: tuple
    cell: tuple
    writer: tuple

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "tile": self.tile,
            "reader": list(self.reader),
            "cell": {"plane": COMPONENTS[self.cell[0]], "row": self.cell[1], "col": self.cell[2]},
            "writer": list(self.writer),
        }


_READ_DTYPE = np.dtype(
    [
        ("step", np.int32),
        ("tile", np.int32),
        ("epoch", np.int32),
        ("reader_r", np.int64),
        ("reader_c", np.int64),
        ("plane", np.int8),
        ("cell_r", np.int64),
        ("cell_c", np.int64),
        ("write_epoch", np.int32),
    ]
)


@dataclass(frozen=True)
class TrafficReport:
    reads: int
    writes: int
    reference_reads: int | None
    reference_writes: int | None

    @property
    def matches_reference(self) -> bool | None:
        if self.reference_reads is None:
            return None
        return (self.reads, self.writes) == (self.reference_reads, self.reference_writes)


@dataclass(frozen=True)
class CellsReport:
    single: int
    double: int
    reference_single: int | None
    reference_double: int | None

    def value(self, buffering) -> int:
        return self.single if Buffering.parse(buffering) is Buffering.SINGLE else self.double

    @property
    def matches_reference(self) -> bool | None:
        if self.reference_single is None:
            return None
        return (self.single, self.double) == (self.reference_single, self.reference_double)


@dataclass
class ExecTrace:
    """What happened during :func:`simulate`.

    ``same_epoch_reads`` keeps every read of a cell whose last write happened
    in the reader's epoch (own cells included); :func:`detect_hazards`
    selects the racy ones.
    """

    scheme: str
    wavelet: str
    buffering: Buffering
    tile: tuple
    halo: int
    tiles: int = 0
    barriers_executed: int = 0
    epochs: list = field(default_factory=list)
    same_epoch_reads: list = field(default_factory=list)
    hazards: list = field(default_factory=list)
    local_reads: int = 0
    local_writes: int = 0
    cells_per_quadruple: int = 0

    @property
    def race_free(self) -> bool:
        return not self.hazards

    def to_dict(self, max_hazards: int | None = None) -> dict:
        hz = self.hazards if max_hazards is None else self.hazards[:max_hazards]
        return {
            "scheme": self.scheme,
            "wavelet": self.wavelet,
            "buffering": self.buffering.value,
            "tile": list(self.tile),
            "halo": self.halo,
            "tiles": self.tiles,
            "barriers": self.barriers_executed,
            "epochs": self.epochs,
            "hazard_count": len(self.hazards),
            "hazards": [h.to_dict() for h in hz],
            "local_reads": self.local_reads,
            "local_writes": self.local_writes,
            "cells_per_quadruple": self.cells_per_quadruple,
        }

    def to_json(self, max_hazards: int | None = None, **kw) -> str:
        return json.dumps(self.to_dict(max_hazards), **kw)


# -- static model -------------------------------------------------------------


def required_halo(scheme: Scheme) -> int:
    """Halo that lets every interior cell see its whole dependency cone."""
    return sum(m.max_shift() for m in scheme.matrices())


def epoch_footprints(scheme: Scheme) -> list[tuple[frozenset, frozenset]]:
    """``(R, W)`` per epoch group; see the module docstring."""
    mats = scheme.matrices()
    out = []
    for group in scheme.epochs():
        reads, writes = set(), set()
        for idx in group:
            reads |= set(mats[idx].nonlocal_reads())
            writes |= mats[idx].written_components()
        out.append((frozenset(reads), frozenset(writes)))
    return out


def split_barriers(scheme: Scheme) -> int:
    """Extra barriers in-place execution needs: one per group overwriting what it reads from neighbours."""
    return sum(1 for r, w in epoch_footprints(scheme) if r & w)


def _stage_degree(scheme: Scheme) -> int | None:
    taps = {s.predict.tap_count() for s in scheme.wavelet.stages}
    taps |= {s.update.tap_count() for s in scheme.wavelet.stages}
    if taps == {2}:
        return 1
    if taps == {4}:
        return 3
    return None


def traffic_report(scheme: Scheme, cfg: TileConfig | None = None) -> TrafficReport:
    """Per-quadruple shared-storage reads and writes under the static model."""
    mats = scheme.matrices()
    reads = sum(len(exps) for m in mats for exps in m.nonlocal_reads().values())
    groups = [(frozenset(), frozenset(range(4)))] + epoch_footprints(scheme)
    writes = 0
    for gi, (_, written) in enumerate(groups):
        for comp in written:
            for later_r, later_w in groups[gi + 1 :]:
                if comp in later_r or comp in later_w:
                    writes += comp in later_r
                    break
    ref = REFERENCE_TRAFFIC.get(scheme.kind)
    degree = _stage_degree(scheme)
    ref_r = ref_w = None
    if ref is not None and degree is not None:
        k = scheme.wavelet.K
        ref_w = ref[0] + ref[1] * k
        ref_r = (ref[2] if degree == 1 else ref[3]) * k
    return TrafficReport(reads, writes, ref_r, ref_w)


def cells_report(scheme: Scheme, cfg: TileConfig | None = None) -> CellsReport:
    """Peak shared cells per quadruple for both buffering modes."""
    fp = epoch_footprints(scheme)
    single = max([1] + [len(r) for r, _ in fp])
    double = 1
    for i, (r, w) in enumerate(fp):
        ahead = fp[i + 1][0] if i + 1 < len(fp) else frozenset()
        double = max(double, len(r) + len(w & ahead))
    ref = REFERENCE_CELLS.get(scheme.kind)
    ref_s = ref_d = None
    if ref is not None:
        ref_s, ref_d = ref[0], ref[2] if scheme.wavelet.K > 1 else ref[1]
    return CellsReport(single, double, ref_s, ref_d)


# -- dynamic simulation ------------------------------------------------------


def _shift_fill(a: np.ndarray, kn: int, km: int, fill):
    """``out[r, c] = a[r - kn, c - km]`` with ``fill`` where that lies outside ``a``."""
    out = np.full_like(a, fill)
    h, w = a.shape
    dst_r = slice(max(kn, 0), h + min(kn, 0))
    src_r = slice(max(-kn, 0), h + min(-kn, 0))
    dst_c = slice(max(km, 0), w + min(km, 0))
    src_c = slice(max(-km, 0), w + min(-km, 0))
    out[dst_r, dst_c] = a[src_r, src_c]
    return out


def _extended_grid(x: np.ndarray, halo: int, boundary: BoundaryMode) -> np.ndarray:
    if boundary is BoundaryMode.SYMMETRIC:
        return polyphase_split(mirror_pad(x, 2 * halo)).planes
    planes = polyphase_split(x).planes
    return np.pad(planes, ((0, 0), (halo, halo), (halo, halo)), mode="wrap") if halo else planes


def _run_tile(buf, mats, compiled, halo, origin, tile_idx, trace, record):
    n_planes, hh, ww = buf.shape
    cur = buf
    pub = cur.copy()
    last_write = np.zeros(buf.shape, dtype=np.int32)
    epoch = 0
    rr, cc = np.meshgrid(np.arange(hh), np.arange(ww), indexing="ij")
    gr, gc = rr + origin[0] - halo, cc + origin[1] - halo
    for s, (m, rows) in enumerate(zip(mats, compiled)):
        if m.needs_barrier:
            epoch += 1
            pub = cur.copy()
        used = sorted({(j, kn, km) for _, terms in rows for j, kn, km, _ in terms})
        views = {}
        for j, kn, km in used:
            own = kn == 0 and km == 0
            views[(j, kn, km)] = cur[j] if own else _shift_fill(pub[j], kn, km, np.nan)
            if record:
                lw = last_write[j] if own else _shift_fill(last_write[j], kn, km, -1)
                hit = lw == epoch
                if hit.any():
                    n = int(hit.sum())
                    rec = np.empty(n, dtype=_READ_DTYPE)
                    rec["step"], rec["tile"], rec["epoch"] = s, tile_idx, epoch
                    rec["reader_r"], rec["reader_c"] = gr[hit], gc[hit]
                    rec["plane"] = j
                    rec["cell_r"], rec["cell_c"] = gr[hit] - kn, gc[hit] - km
                    rec["write_epoch"] = lw[hit]
                    trace.same_epoch_reads.append(rec)
        new = {}
        for i, terms in rows:
            acc = np.zeros((hh, ww), dtype=np.float64)
            for j, kn, km, c in terms:
                acc += c * views[(j, kn, km)]
            new[i] = acc
        for i, acc in new.items():
            cur[i] = acc
            last_write[i] = epoch
    return cur


def simulate(
    img,
    scheme: Scheme,
    cfg: TileConfig | None = None,
    boundary: BoundaryMode | str = BoundaryMode.PERIODIC,
    record_reads: bool = True,
) -> tuple[QuadGrid, ExecTrace]:
    """Execute ``scheme`` tile by tile and return the coefficients with the trace."""
    cfg = cfg or TileConfig()
    boundary = BoundaryMode.parse(boundary)
    x = _check_image(img)
    mats = scheme.matrices()
    max_shift = max((m.max_shift() for m in mats), default=0)
    halo = required_halo(scheme) if cfg.halo is None else cfg.halo
    if halo < max_shift:
        raise InsufficientHaloError(f"halo {halo} is smaller than the largest step reach {max_shift}")
    compiled = [_compile(m) for m in mats]

    h, w = x.shape[0] // 2, x.shape[1] // 2
    ext = _extended_grid(x, halo, boundary)
    th, tw = min(cfg.tile_h, h), min(cfg.tile_w, w)
    trace = ExecTrace(scheme.name, scheme.wavelet.name, cfg.buffering, (cfg.tile_w, cfg.tile_h), halo)

    out = np.empty((4, h, w), dtype=np.float64)
    tile_idx = 0
    for r0 in range(0, h, th):
        for c0 in range(0, w, tw):
            r1, c1 = min(r0 + th, h), min(c0 + tw, w)
            buf = ext[:, r0 : r1 + 2 * halo, c0 : c1 + 2 * halo].copy()
            res = _run_tile(buf, mats, compiled, halo, (r0, c0), tile_idx, trace, record_reads)
            out[:, r0:r1, c0:c1] = res[:, halo : halo + r1 - r0, halo : halo + c1 - c0]
            tile_idx += 1
    if np.isnan(out).any():
        raise InsufficientHaloError(f"halo {halo} does not cover the dependency reach of {scheme.name}")

    trace.tiles = tile_idx
    epoch = 0
    for s, m in enumerate(mats):
        epoch += bool(m.needs_barrier)
        trace.epochs.append({"step": s, "label": m.label, "epoch": epoch, "barrier": bool(m.needs_barrier)})
    trace.barriers_executed = sum(1 for m in mats if m.needs_barrier)
    if cfg.buffering is Buffering.SINGLE:
        trace.barriers_executed += split_barriers(scheme)
    traffic = traffic_report(scheme, cfg)
    trace.local_reads, trace.local_writes = traffic.reads, traffic.writes
    trace.cells_per_quadruple = cells_report(scheme, cfg).value(cfg.buffering)
    trace.hazards = detect_hazards(trace)
    return QuadGrid(out), trace


def detect_hazards(trace: ExecTrace) -> list[Hazard]:
    """Reads of another thread's cell written in the reader's own epoch."""
    if not trace.same_epoch_reads:
        return []
    rec = np.concatenate(trace.same_epoch_reads)
    racy = (rec["write_epoch"] == rec["epoch"]) & (
        (rec["cell_r"] != rec["reader_r"]) | (rec["cell_c"] != rec["reader_c"])
    )
    rec = np.unique(rec[racy])
    return [
        Hazard(
            step=int(r["step"]),
            tile=int(r["tile"]),
            reader=(int(r["reader_r"]), int(r["reader_c"])),
            cell=(int(r["plane"]), int(r["cell_r"]), int(r["cell_c"])),
            writer=(int(r["cell_r"]), int(r["cell_c"])),
        )
        for r in rec
    ]
