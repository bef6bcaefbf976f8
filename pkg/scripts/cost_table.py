"""Operation and barrier counts for every scheme, next to the published counts."""

import argparse
import csv
import sys
from dataclasses import dataclass, field

from wavelift.schemes import cost_table
from wavelift.wavelets import WAVELET_NAMES


@dataclass
class Config:
    wavelets: list = field(default_factory=lambda: list(WAVELET_NAMES))
    out: str | None = None


def run(cfg: Config) -> int:
    rows = cost_table(cfg.wavelets)
    sink = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    writer = csv.writer(sink)
    writer.writerow(["wavelet", "scheme", "barriers", "macs", "published_barriers", "published_macs", "match"])
    for r in rows:
        ref = r.reference or (None, None)
        writer.writerow([r.wavelet, r.kind.value, r.barriers, r.macs, ref[0], ref[1], r.matches_reference])
    if cfg.out:
        sink.close()
    matched = sum(r.matches_reference for r in rows)
    print(f"{matched}/{len(rows)} cells match", file=sys.stderr)
    return 0 if matched == len(rows) else 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--wavelet", action="append", choices=WAVELET_NAMES)
    ap.add_argument("--out")
    a = ap.parse_args()
    sys.exit(run(Config(a.wavelet or list(WAVELET_NAMES), a.out)))
