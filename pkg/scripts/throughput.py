"""Forward-transform throughput of every scheme across image sizes (CSV on stdout).

Numbers describe this NumPy implementation on this machine only.
"""

import argparse
import statistics
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from wavelift.schemes import TABLE_ORDER, build_scheme
from wavelift.transform import forward
from wavelift.wavelets import WAVELET_NAMES


@dataclass
class Config:
    sizes: list = field(default_factory=lambda: [128, 256, 512, 1024])
    wavelets: list = field(default_factory=lambda: list(WAVELET_NAMES))
    reps: int = 5
    seed: int = 0


def run(cfg: Config) -> int:
    rng = np.random.default_rng(cfg.seed)
    print("scheme,wavelet,size,mbps")
    for n in cfg.sizes:
        img = rng.random((n, n))
        for w in cfg.wavelets:
            for kind in TABLE_ORDER:
                scheme = build_scheme(kind, w)
                forward(img, scheme)
                times = []
                for _ in range(cfg.reps):
                    t0 = time.perf_counter()
                    forward(img, scheme)
                    times.append(time.perf_counter() - t0)
                mbps = n * n * 8 / statistics.median(times) / 1e6
                print(f"{kind.value},{w},{n}x{n},{mbps:.2f}", flush=True)
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, action="append")
    ap.add_argument("--wavelet", action="append", choices=WAVELET_NAMES)
    ap.add_argument("--reps", type=int, default=5)
    a = ap.parse_args()
    if a.reps < 1:
        ap.error("--reps must be at least 1")
    cfg = Config(reps=a.reps)
    if a.size:
        cfg.sizes = a.size
    if a.wavelet:
        cfg.wavelets = a.wavelet
    sys.exit(run(cfg))
