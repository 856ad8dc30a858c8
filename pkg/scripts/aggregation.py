"""Per-step vs cumulative fits for same-model and drifting geometric steps."""
import argparse

import numpy as np

from rankfreq.infometrics import trajectory
from rankfreq.mixlab import cumulative_aggregate, geometric_steps


def show(title, steps):
    print(f"# {title}")
    print("step\tstep_geo_r2\tstep_zipf_r2\tcum_geo_r2\tcum_zipf_r2\tcum_preferred")
    for s in steps:
        print(f"{s.step}\t{s.step_report.geometric.r2:.4f}\t{s.step_report.zipf.r2:.4f}\t"
              f"{s.cumulative_report.geometric.r2:.4f}\t{s.cumulative_report.zipf.r2:.4f}\t"
              f"{s.cumulative_report.preferred}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=10)
    ap.add_argument("--tokens", type=int, default=10_000)
    ap.add_argument("--q", type=float, default=0.9, help="q of the same-model run")
    ap.add_argument("--rank-range", default="2:10000", help="expected-rank span of the drifting run")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    same = geometric_steps([args.q] * args.steps, args.tokens, args.seed, "shared")
    show(f"same model q={args.q}, shared labels", cumulative_aggregate(same))

    lo, hi = (float(x) for x in args.rank_range.split(":"))
    qs = 1 - 1 / np.geomspace(lo, hi, args.steps)
    show(f"drifting expected rank {lo:g}..{hi:g}, disjoint labels",
         cumulative_aggregate(geometric_steps(qs, args.tokens, args.seed + 1)))

    qs = np.linspace(0.80, 0.95, args.steps)
    print("# perplexity trajectory, q 0.80..0.95, shared labels")
    print("step\tpopulation\tentropy_bits\tperplexity")
    for p in trajectory(geometric_steps(qs, args.tokens, args.seed + 2, "shared")):
        print(f"{p.step}\t{p.population:.0f}\t{p.entropy_bits:.4f}\t{p.perplexity:.3f}")


if __name__ == "__main__":
    main()
