"""Atomic excitation probabilities for the gamma = 4/64/1024 system at delta = 1.56 gamma2."""

import argparse

from photondelay.cli import JobSpec, packaged_config, run_evolve

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig3")
    ap.add_argument("--solver", choices=("analytic", "ode", "both"), default="both")
    ap.add_argument("--count", type=int, default=141)
    args = ap.parse_args()
    spec = JobSpec("evolve", out_dir=args.out, solver=args.solver, t_count=args.count,
                   cfg=packaged_config("fig3")).validate()
    for path in run_evolve(spec, stem="fig3"):
        print(path)
