"""Two planes in R^3 with unit weights: the fundamental inequality holds, yet
no tight fusion frame exists and the best potential found is 6, not 16/3.

    python scripts/counterexample.py --restarts 20 --seed 7
"""

import argparse

import numpy as np

from framekit.core import DimProfile, ffp_lower_bound
from framekit.irregularity import fundamental_inequality
from framekit.optimizer import OptimizerConfig, multistart


def principal_angle_value(P1, P2):
    # tr(S^2) = tr P1 + tr P2 + 2 tr(P1 P2) = 4 + 2 sum cos^2(theta_i)
    return 4 + 2 * float(np.trace(P1 @ P2))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    p = DimProfile(3, (2, 2), (1.0, 1.0))
    rep = multistart(p, OptimizerConfig(restarts=args.restarts, seed=args.seed))
    P1, P2 = rep.frame.projections
    cosines = np.sqrt(np.clip(np.linalg.svd(rep.frame.subspaces[0].basis.T @ rep.frame.subspaces[1].basis, compute_uv=False), 0, 1) ** 2)

    print(f"fundamental inequality: {fundamental_inequality(p)}")
    print(f"lower bound:            {ffp_lower_bound(p):.12f}")
    print(f"best potential:         {rep.ffp:.12f}  (restart {rep.best_restart})")
    print(f"principal-angle check:  {principal_angle_value(P1, P2):.12f}")
    print(f"cosines of angles:      {np.round(cosines, 10)}")
    print(f"tight:                  {rep.tight_alpha is not None}")
    print(f"in eigenoperator class: {rep.structure.in_class_E}")
    print(f"spectrum of S:          {np.round(rep.structure.lambdas, 10)}")
    spread = max(rep.restart_values) - min(rep.restart_values)
    print(f"restart values spread:  {spread:.2e}")


if __name__ == "__main__":
    main()
