"""Compare the closed-form minimum with multistart descent on random profiles.

For profiles admitting an eigenoperator-class minimizer the two agree; when
they do not, descent lands above the closed form (e.g. d=3, L=(1,2,1),
w^2=(1.5,1,0.5): closed form 5.375, best found 5.5).

    python scripts/irregularity_scan.py --n 30 --seed 0
"""

import argparse

import numpy as np

from framekit.core import DimProfile, ffp_lower_bound
from framekit.irregularity import fundamental_inequality, minimum_value, profile_N0
from framekit.optimizer import OptimizerConfig, multistart


def random_profile(rng):
    d = int(rng.integers(2, 6))
    K = int(rng.integers(2, 5))
    while True:
        dims = tuple(int(x) for x in rng.integers(1, d + 1, K))
        if sum(dims) >= d:
            break
    return DimProfile(d, dims, tuple(float(x) for x in rng.choice([0.5, 1.0, 2.0, 4.0], K)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--max-iters", type=int, default=2000)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed, max_iters=args.max_iters)

    print(f"{'d':>2} {'dims':>12} {'w^2':>20} {'N0':>3} {'FI':>5} {'bound':>9} {'closed':>9} {'descent':>12} {'class E':>7}")
    for _ in range(args.n):
        p = random_profile(rng)
        N0, _ = profile_N0(p)
        rep = multistart(p, cfg)
        in_E = rep.structure.in_class_E if rep.structure is not None else None
        print(
            f"{p.d:>2} {str(p.dims):>12} {str(p.weights2):>20} {N0:>3} {str(fundamental_inequality(p)):>5} "
            f"{ffp_lower_bound(p):9.4f} {minimum_value(p):9.4f} {rep.ffp:12.8f} {str(in_E):>7}"
        )


if __name__ == "__main__":
    main()
