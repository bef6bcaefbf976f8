"""``wavelift`` command-line interface."""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

import numpy as np

from . import fileio
from .parsim import Buffering, InsufficientHaloError, TileConfig, simulate
from .schemes import TABLE_ORDER, build_scheme, clear_barrier, cost_table, verify_scheme
from .transform import (
    BoundaryMode,
    OddDimensionError,
    Pyramid,
    forward,
    multi_level_forward,
    multi_level_inverse,
)
from .wavelets import WAVELET_NAMES

SCHEME_NAMES = tuple(k.value for k in TABLE_ORDER)
ROUNDTRIP_TOLERANCE = 1e-6


class CommandError(Exception):
    """A precondition failed; reported on stderr with exit status 2."""


def _parse_pair(text: str, what: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            a = b = int(parts[0])
        elif len(parts) == 2:
            a, b = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must look like WxH, got {text!r}") from None
    if a <= 0 or b <= 0:
        raise argparse.ArgumentTypeError(f"{what} must be positive, got {text!r}")
    return a, b


def _tile(text):
    return _parse_pair(text, "tile")


def _size(text):
    return _parse_pair(text, "size")


def _load_image(path: str, levels: int, pad: bool) -> tuple[np.ndarray, int, tuple[int, int]]:
    """Pixels normalized to [0, 1), maxval, and the (right, bottom) padding applied."""
    pixels, maxval = fileio.read_pgm(path)
    img = pixels.astype(np.float64) / (maxval + 1)
    h, w = img.shape
    mult = 2**levels
    pad_r, pad_b = (-w) % mult, (-h) % mult
    if pad_r or pad_b:
        if not pad:
            raise CommandError(f"image is {w}x{h}; dimensions must be divisible by {mult} (use --pad)")
        if min(h, w) < 2:
            raise CommandError("image too small to mirror-pad")
        img = np.pad(img, ((0, pad_b), (0, pad_r)), mode="reflect")
    return img, maxval, (pad_r, pad_b)


def _add_transform_options(p: argparse.ArgumentParser, scheme_default="sweldens"):
    p.add_argument("--wavelet", choices=WAVELET_NAMES, default="cdf53")
    p.add_argument("--scheme", choices=SCHEME_NAMES, default=scheme_default)
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--boundary", choices=[b.value for b in BoundaryMode], default="periodic")


# -- commands -----------------------------------------------------------------


def cmd_verify(args) -> int:
    wavelets = [args.wavelet] if args.wavelet else list(WAVELET_NAMES)
    kinds = [args.scheme] if args.scheme else list(SCHEME_NAMES)
    ok = True
    rows = []
    for w in wavelets:
        for k in kinds:
            reports = verify_scheme(build_scheme(k, w))
            passed = all(r.passed for r in reports)
            ok &= passed
            dev = max(r.max_deviation for r in reports)
            mode = "exact" if all(r.exact for r in reports) else "float"
            rows.append({"wavelet": w, "scheme": k, "passed": passed, "mode": mode, "max_deviation": dev})
    if args.format == "json":
        print(json.dumps({"passed": ok, "checks": rows}))
    else:
        for r in rows:
            status = "PASS" if r["passed"] else "FAIL"
            print(f"{status} {r['wavelet']:<6} {r['scheme']:<16} {r['mode']:<5} max_dev={r['max_deviation']:.3g}")
    return 0 if ok else 1


def cmd_report(args) -> int:
    wavelets = [args.wavelet] if args.wavelet else list(WAVELET_NAMES)
    table = cost_table(wavelets)
    off = [r for r in table if r.reference is not None and not r.matches_reference]
    if args.format == "csv":
        print("wavelet,scheme,barriers,macs")
        for r in table:
            print(f"{r.wavelet},{r.kind.value},{r.barriers},{r.macs}")
        for r in off:
            print(f"note: {r.wavelet}/{r.kind.value} differs from published {r.reference}", file=sys.stderr)
        return 0
    print("| wavelet | scheme | barriers | operations | published |")
    print("|---|---|---:|---:|---:|")
    for r in table:
        mark = "*" if r in off else ""
        ref = "" if r.reference is None else f"{r.reference[0]} / {r.reference[1]}"
        print(f"| {r.wavelet} | {r.kind.display_name} | {r.barriers}{mark} | {r.macs}{mark} | {ref} |")
    print()
    if off:
        print("\\* differs from the published count; see the project notes.")
    else:
        print(f"All {len(table)} cells match the published barrier and operation counts.")
    return 0


def _forward_pyramid(args) -> tuple[Pyramid, int, tuple[int, int], tuple[int, int]]:
    img, maxval, pad = _load_image(args.input, args.levels, args.pad)
    scheme = build_scheme(args.scheme, args.wavelet)
    pyr = multi_level_forward(img, args.levels, scheme, None, args.boundary, args.scaling)
    orig = (img.shape[1] - pad[0], img.shape[0] - pad[1])
    return pyr, maxval, pad, orig


def cmd_transform(args) -> int:
    pyr, maxval, pad, (w, h) = _forward_pyramid(args)
    sf = fileio.SubbandFile(
        wavelet=args.wavelet,
        scheme=args.scheme,
        levels=args.levels,
        boundary=args.boundary,
        scaling=args.scaling,
        width=w,
        height=h,
        pad=pad,
        maxval=maxval,
        details=list(pyr.details),
        approx=pyr.approx,
    )
    fileio.write_subbands(args.output, sf)
    shapes = ", ".join(f"{s[1]}x{s[0]}" for s in sf.plane_shapes())
    print(f"wrote {args.output}: {args.levels} level(s), planes {shapes}")
    return 0


def cmd_inverse(args) -> int:
    sf = fileio.read_subbands(args.input)
    img = multi_level_inverse(Pyramid(tuple(sf.details), sf.approx), sf.wavelet, sf.boundary, sf.scaling)
    img = img[: sf.height, : sf.width]
    pixels = np.clip(np.rint(img * (sf.maxval + 1)), 0, sf.maxval).astype(np.int64)
    fileio.write_pgm(args.output, pixels, sf.maxval)
    print(f"wrote {args.output}: {sf.width}x{sf.height}")
    return 0


def cmd_roundtrip(args) -> int:
    img, maxval, _ = _load_image(args.input, args.levels, args.pad)
    scheme = build_scheme(args.scheme, args.wavelet)
    pyr = multi_level_forward(img, args.levels, scheme, None, args.boundary, args.scaling)
    rec = multi_level_inverse(pyr, args.wavelet, args.boundary, args.scaling)
    err = float(np.max(np.abs(rec - img))) * (maxval + 1)
    ok = err <= ROUNDTRIP_TOLERANCE
    print(f"max_abs_error {err:.3e} ({'PASS' if ok else 'FAIL'}, tolerance {ROUNDTRIP_TOLERANCE:g} pixel units)")
    return 0 if ok else 1


def cmd_simulate(args) -> int:
    img, _, _ = _load_image(args.input, 1, args.pad)
    scheme = build_scheme(args.scheme, args.wavelet)
    if args.break_barrier is not None:
        try:
            scheme = clear_barrier(scheme, args.break_barrier)
        except ValueError as exc:
            raise CommandError(str(exc)) from None
    try:
        cfg = TileConfig(args.tile[0], args.tile[1], args.halo, Buffering.parse(args.buffering))
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    q, trace = simulate(img, scheme, cfg, args.boundary)
    out = trace.to_dict(max_hazards=args.max_hazards)
    if args.check:
        ref = forward(img, scheme, None, args.boundary)
        out["max_diff_vs_forward"] = q.max_abs_difference(ref)
    print(json.dumps(out, indent=None if args.compact else 2))
    return 1 if trace.hazards else 0


def cmd_bench(args) -> int:
    if args.reps < 1:
        raise CommandError("--reps must be at least 1")
    w, h = args.size
    if w % 2 or h % 2:
        raise CommandError("bench size must be even")
    rng = np.random.default_rng(args.seed)
    img = rng.random((h, w))
    schemes = list(SCHEME_NAMES) if args.scheme == "all" else [args.scheme]
    if args.format == "csv":
        print("scheme,wavelet,size,mbps")
    for name in schemes:
        scheme = build_scheme(name, args.wavelet)
        forward(img, scheme, None, args.boundary)  # warm-up
        times = []
        for _ in range(args.reps):
            t0 = time.perf_counter()
            forward(img, scheme, None, args.boundary)
            times.append(time.perf_counter() - t0)
        mbps = w * h * 8 / statistics.median(times) / 1e6
        if args.format == "csv":
            print(f"{name},{args.wavelet},{w}x{h},{mbps:.2f}")
        else:
            print(f"{name:<16} {args.wavelet:<6} {w}x{h}  {mbps:10.2f} MB/s (median of {args.reps})")
    return 0


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavelift", description="2-D lifting wavelet schemes: costs, transforms, simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check every scheme's step product against the reference matrix")
    p.add_argument("--wavelet", choices=WAVELET_NAMES)
    p.add_argument("--scheme", choices=SCHEME_NAMES)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="operation and barrier counts")
    p.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p.add_argument("--wavelet", choices=WAVELET_NAMES)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("transform", help="forward transform of a PGM into a subband file")
    p.add_argument("input")
    p.add_argument("output")
    _add_transform_options(p)
    p.add_argument("--scaling", action="store_true", help="apply the final scaling step")
    p.add_argument("--pad", action="store_true", help="mirror-pad dimensions up to a multiple of 2^levels")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("inverse", help="reconstruct a PGM from a subband file")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("roundtrip", help="forward then inverse; report the max error in pixel units")
    p.add_argument("input")
    _add_transform_options(p)
    p.add_argument("--scaling", action="store_true")
    p.add_argument("--pad", action="store_true")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("simulate", help="tiled barrier-level simulation with race detection (JSON)")
    p.add_argument("input")
    p.add_argument("--wavelet", choices=WAVELET_NAMES, default="cdf53")
    p.add_argument("--scheme", choices=SCHEME_NAMES, default="monolithic")
    p.add_argument("--boundary", choices=[b.value for b in BoundaryMode], default="periodic")
    p.add_argument("--tile", type=_tile, default=(16, 16), help="tile size in component cells, WxH")
    p.add_argument("--halo", type=int, default=None)
    p.add_argument("--buffering", choices=[b.value for b in Buffering], default="double")
    p.add_argument("--break-barrier", type=int, default=None, metavar="N", help="clear the N-th barrier (1-based)")
    p.add_argument("--max-hazards", type=int, default=20, help="hazards listed in the output (count is always full)")
    p.add_argument("--check", action="store_true", help="also report the deviation from the plain transform")
    p.add_argument("--compact", action="store_true")
    p.add_argument("--pad", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="forward-transform throughput")
    p.add_argument("--size", type=_size, default=(1024, 1024), help="NxN or WxH")
    p.add_argument("--wavelet", choices=WAVELET_NAMES, default="cdf53")
    p.add_argument("--scheme", choices=SCHEME_NAMES + ("all",), default="monolithic")
    p.add_argument("--boundary", choices=[b.value for b in BoundaryMode], default="periodic")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "levels", 1) < 1:
        parser.error("--levels must be >= 1")
    if getattr(args, "reps", 1) < 1:
        parser.error("--reps must be at least 1")
    try:
        return args.func(args)
    except (CommandError, OddDimensionError, InsufficientHaloError, fileio.PGMError, fileio.SubbandFormatError) as exc:
        print(f"wavelift: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"wavelift: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
