#!/usr/bin/env python3
"""Water-path AoA change for a water-level change, swept over Tx-Rx distance.

    python3 scripts/aoa_study.py --setup setup1 --delta-w 1.0 --out aoa_study.csv
"""

import argparse

import numpy as np

from hydrosense.io import write_curve_csv
from hydrosense.scene import SETUPS, aoa_variation_study


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--setup", choices=sorted(SETUPS), default="setup1")
    ap.add_argument("--delta-w", type=float, default=1.0, help="water-level change (m)")
    ap.add_argument("--d-min", type=float, default=100.0)
    ap.add_argument("--d-max", type=float, default=1000.0)
    ap.add_argument("--d-step", type=float, default=10.0)
    ap.add_argument("--out")
    args = ap.parse_args()

    geom = SETUPS[args.setup]
    d, dv = aoa_variation_study(geom, args.delta_w, np.arange(args.d_min, args.d_max + 1e-9, args.d_step))
    for dist, change in zip(d[::10], dv[::10]):
        print(f"{dist:7.0f} m  {change:.4f} deg")
    _, own = aoa_variation_study(geom, args.delta_w, [geom.d_tr])
    print(f"at the deployed distance {geom.d_tr:.0f} m: {own[0]:.4f} deg")
    if args.out:
        write_curve_csv(args.out, d, dv)


if __name__ == "__main__":
    main()
