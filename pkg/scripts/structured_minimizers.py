"""Build random frames in the orthogonal-prefix / tight-suffix shape, check
them against every structure clause, then break one clause at a time.

    python scripts/structured_minimizers.py --n 200 --seed 0
"""

import argparse
from collections import Counter

import numpy as np

from framekit.constructions import CORRUPTIONS, corrupt, structured_frame
from framekit.core import ffp
from framekit.irregularity import minimum_value
from framekit.optimizer import gradient_norm, riemannian_gradient
from framekit.verify import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--field", choices=("real", "complex"), default="real")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    fails, worst_gap, worst_grad = 0, 0.0, 0.0
    for _ in range(args.n):
        sf = structured_frame(rng, field=args.field)
        res = verify(sf.frame)
        fails += not res.passed
        worst_gap = max(worst_gap, abs(ffp(sf.frame) - minimum_value(sf.frame.profile)) / ffp(sf.frame))
        worst_grad = max(worst_grad, gradient_norm(riemannian_gradient(sf.frame)))
    print(f"structured frames: {args.n - fails}/{args.n} pass")
    print(f"  max relative |ffp - minimum_value|: {worst_gap:.2e}")
    print(f"  max gradient norm:                  {worst_grad:.2e}")

    named = Counter()
    for i in range(args.n):
        kind = CORRUPTIONS[i % len(CORRUPTIONS)]
        sf = structured_frame(rng, d=int(rng.integers(3, 9)), n_groups=int(rng.integers(1, 3)), field=args.field)
        named[(kind, verify(corrupt(sf, kind, rng)).first_failure)] += 1
    print("corruption -> first failing clause:")
    for (kind, got), count in sorted(named.items()):
        print(f"  {kind:>14} -> {got}: {count}")


if __name__ == "__main__":
    main()
