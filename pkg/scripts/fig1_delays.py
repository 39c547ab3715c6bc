"""Phase, group and detector delays against detuning (delay-curve figure)."""

import argparse

from photondelay.cli import JobSpec, packaged_config, run_sweep

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig1")
    ap.add_argument("--count", type=int, default=121)
    ap.add_argument("--jobs", type=int, default=None)
    args = ap.parse_args()
    cfg = packaged_config("fig1")
    spec = JobSpec("sweep", out_dir=args.out, delta_count=args.count, jobs=args.jobs, cfg=cfg).validate()
    for path in run_sweep(spec, stem="fig1_sweep"):
        print(path)
