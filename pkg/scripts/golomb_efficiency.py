"""Golomb code efficiency across q, against the best m found by brute force."""
import argparse

import numpy as np

from rankfreq.golomb import GolombCode, best_m, code_stats, optimal_m
from rankfreq.models import GeometricModel, ZipfModel


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, nargs="*", default=[0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99])
    ap.add_argument("--m-max", type=int, default=512)
    args = ap.parse_args(argv)

    print("source\tm\tbrute_m\tentropy_bits\texpected_length_bits\tefficiency")
    for q in args.q:
        model = GeometricModel(q)
        s = code_stats(model)
        print(f"geometric q={q:g}\t{s.m}\t{best_m(model, args.m_max)}\t"
              f"{s.entropy:.5f}\t{s.expected_length:.5f}\t{s.efficiency:.5f}")
    for s_exp in (0.8, 1.0, 1.5):
        model = ZipfModel(s_exp, 100)
        m = best_m(model, args.m_max)
        s = code_stats(model, GolombCode(m))
        print(f"zipf s={s_exp:g} N=100\t{m}\t{m}\t{s.entropy:.5f}\t{s.expected_length:.5f}\t{s.efficiency:.5f}")


if __name__ == "__main__":
    main()
