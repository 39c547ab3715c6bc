"""Detector probability with and without the scatterer, inside and outside |delta| < gamma2/2."""

import argparse
from pathlib import Path

import numpy as np

from photondelay import analytic
from photondelay.checks import reshaping_delay
from photondelay.cli import _header, packaged_config, write_table

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig4")
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.0, 0.25, 0.75, 1.5],
                    help="detunings in units of gamma2")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = packaged_config("fig4")
    t = np.linspace(0.5, 0.95, 181)
    for r in args.ratios:
        cfg = base.replace(delta=r * base.gamma2)
        rows = zip(t, np.abs(analytic.c3(cfg, t)) ** 2, np.abs(analytic.c3_free(cfg, t)) ** 2)
        path = write_table(out / f"fig4_delta{r:+.2f}.csv", _header("fig4", cfg), ["t", "p3", "p3_no_scatterer"], rows)
        print(f"{path}  COG shift {reshaping_delay(base, r):+.4g}")
