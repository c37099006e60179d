"""Bisect the Werner visibility at which the CHSH-setting table leaves the
local polytope, using the exact rational LP at every probe."""
import argparse
import math
import time
from fractions import Fraction

from bellcheck.werner import werner_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--width", type=float, default=1e-7, help="final bracket width")
    args = ap.parse_args()
    t0 = time.perf_counter()
    res = werner_threshold(Fraction(args.width))
    elapsed = time.perf_counter() - t0
    for v, local in res.probes:
        print(f"v = {float(v):.10f}  {'local' if local else 'nonlocal'}")
    est = float(res.estimate)
    print(f"threshold ~ {est:.10f}  (1/sqrt 2 = {1 / math.sqrt(2):.10f}, "
          f"error {abs(est - 1 / math.sqrt(2)):.2e})  {len(res.probes)} probes in {elapsed:.2f} s")


if __name__ == "__main__":
    main()
