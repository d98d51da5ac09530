#!/usr/bin/env python3
"""Monte Carlo oracle for residual frame loss under a 2-state Gilbert channel.

Independent of the C++ implementation: loss patterns are drawn as alternating
geometric good/bad runs with numpy, and residual losses are counted directly
from the flags.

  piggyback residual  = lost frames whose successor is also lost (or that end
                        the stream), divided by n
  repetition residual = lost frames / n

Prints the mean and the standard deviation of a single run for each quantity,
plus the standard error of a mean over `--seeds` runs. The acceptance suite
freezes these numbers.
"""
import argparse

import numpy as np


def gilbert_flags(rng, n, p_gb, p_bb):
    flags = np.zeros(n, dtype=bool)
    pos = rng.geometric(p_gb) - 1  # good frames before the first loss
    while pos < n:
        burst = rng.geometric(1.0 - p_bb)
        flags[pos:pos + burst] = True
        pos += burst + rng.geometric(p_gb)
    return flags


def residuals(flags):
    n = flags.size
    nxt = np.append(flags[1:], True)  # a trailing loss has no successor
    return np.count_nonzero(flags & nxt) / n, np.count_nonzero(flags) / n


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--flr", type=float, default=0.20)
    ap.add_argument("--p-bb", type=float, default=0.5)
    ap.add_argument("--frames", type=int, default=100_000)
    ap.add_argument("--replications", type=int, default=2000)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()

    p_gb = args.flr * (1.0 - args.p_bb) / (1.0 - args.flr)
    rng = np.random.default_rng(args.seed)
    pig, rep = [], []
    for _ in range(args.replications):
        a, b = residuals(gilbert_flags(rng, args.frames, p_gb, args.p_bb))
        pig.append(a)
        rep.append(b)
    pig, rep = np.array(pig), np.array(rep)
    k = np.sqrt(args.seeds)
    print(f"p_gb={p_gb:.6f}")
    print(f"piggyback  mean={pig.mean():.6f} sd_run={pig.std(ddof=1):.6f} "
          f"se_mean{args.seeds}={pig.std(ddof=1) / k:.6f}")
    print(f"repetition mean={rep.mean():.6f} sd_run={rep.std(ddof=1):.6f} "
          f"se_mean{args.seeds}={rep.std(ddof=1) / k:.6f}")


if __name__ == "__main__":
    main()
