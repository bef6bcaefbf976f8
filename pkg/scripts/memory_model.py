"""Per-quadruple shared-memory traffic and storage under the static epoch model.

Prints model values beside the published ones; mismatches are listed, not fatal.
"""

import argparse
import sys
from dataclasses import dataclass, field

from wavelift.parsim import cells_report, split_barriers, traffic_report
from wavelift.schemes import TABLE_ORDER, SchemeKind, build_scheme
from wavelift.wavelets import WAVELET_NAMES


@dataclass
class Config:
    wavelets: list = field(default_factory=lambda: list(WAVELET_NAMES))


def _pair(a, b):
    return f"{a}" if b is None or a == b else f"{a} (pub {b})"


def run(cfg: Config) -> int:
    header = f"{'wavelet':<7} {'scheme':<16} {'reads':>14} {'writes':>12} {'cells 1x':>12} {'cells 2x':>12} {'split':>5}"
    print(header)
    print("-" * len(header))
    mismatches = []
    for w in cfg.wavelets:
        for kind in TABLE_ORDER:
            if kind is SchemeKind.CONVOLUTION:
                continue
            s = build_scheme(kind, w)
            t, c = traffic_report(s), cells_report(s)
            print(
                f"{w:<7} {kind.value:<16} {_pair(t.reads, t.reference_reads):>14} "
                f"{_pair(t.writes, t.reference_writes):>12} {_pair(c.single, c.reference_single):>12} "
                f"{_pair(c.double, c.reference_double):>12} {split_barriers(s):>5}"
            )
            if not t.matches_reference or not c.matches_reference:
                mismatches.append(f"{w}/{kind.value}")
    print()
    print("mismatches: " + (", ".join(mismatches) if mismatches else "none"))
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--wavelet", action="append", choices=WAVELET_NAMES)
    a = ap.parse_args()
    sys.exit(run(Config(a.wavelet or list(WAVELET_NAMES))))
