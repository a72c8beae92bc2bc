"""Acceptance criteria 1-7, each at its stated tolerance.

Every test records a one-line verdict in ``conftest.ACCEPTANCE``; the
terminal summary prints them after the run.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE
from framekit.constructions import CORRUPTIONS, corrupt, structured_frame, tight_frame
from framekit.core import DimProfile, FusionFrame, Subspace, ffp, ffp_lower_bound, frame_operator, is_tight, projection, random_frame
from framekit.irregularity import check_IJ_prediction, fundamental_inequality, irregularity, minimum_value
from framekit.optimizer import OptimizerConfig, PerturbationCurve, curve_jet, curve_point, multistart, random_curve
from framekit.verify import verify


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_profile(rng, field=None):
    d = int(rng.integers(1, 9))
    K = int(rng.integers(1, 7))
    dims = tuple(int(x) for x in rng.integers(1, d + 1, K))
    w2 = tuple(float(x) for x in rng.uniform(0.1, 4.0, K))
    return DimProfile(d, dims, w2, field or str(rng.choice(["real", "complex"])))


def compositions(n):
    for cuts in itertools.product([0, 1], repeat=n - 1):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        yield tuple(parts + [run])


def test_criterion_1_lower_bound_and_equality():
    rng = np.random.default_rng(101)
    worst_random = np.inf
    for _ in range(1000):
        F = random_frame(random_profile(rng), rng)
        worst_random = min(worst_random, ffp(F) - ffp_lower_bound(F.profile))
    tight_gap, tight_ok = 0.0, True
    for _ in range(50):
        F = tight_frame(rng, field=str(rng.choice(["real", "complex"]))).frame
        tight_gap = max(tight_gap, abs(ffp(F) - ffp_lower_bound(F.profile)))
        tight_ok &= is_tight(F) is not None
    loose_gap, loose_flagged = np.inf, False
    for _ in range(50):
        sf = structured_frame(rng, d=int(rng.integers(2, 9)), n_groups=1, field=str(rng.choice(["real", "complex"])))
        F = sf.frame
        loose_gap = min(loose_gap, ffp(F) - ffp_lower_bound(F.profile))
        loose_flagged |= is_tight(F) is not None
    ok = worst_random >= -1e-9 and tight_gap <= 1e-8 and tight_ok and loose_gap >= 1e-4 and not loose_flagged
    record(1, ok, f"min(ffp-bound) random={worst_random:.2e}, max tight gap={tight_gap:.2e}, min non-tight gap={loose_gap:.2e}")
    assert worst_random >= -1e-9
    assert tight_gap <= 1e-8 and tight_ok
    assert loose_gap >= 1e-4 and not loose_flagged


def test_criterion_2_curve_jets():
    rng = np.random.default_rng(202)
    worst1 = worst2 = 0.0
    for _ in range(200):
        d = int(rng.integers(2, 9))
        L = int(rng.integers(1, d))
        base = random_frame(DimProfile(d, (L,), (1.0,), str(rng.choice(["real", "complex"]))), rng).subspaces[0]
        c = random_curve(base, rng)
        jet = curve_jet(c)
        P = lambda t: projection(curve_point(c, t))
        fd1 = (P(1e-5) - P(-1e-5)) / 2e-5
        # the curve depends on t only through t * z, so scale the step to |z|
        h = min(0.5, 5e-4 / np.max(np.abs(c.coeffs)))
        fd2 = (P(h) - 2 * P(0.0) + P(-h)) / (h * h)
        worst1 = max(worst1, np.linalg.norm(fd1 - jet.dP) / np.linalg.norm(jet.dP))
        worst2 = max(worst2, np.linalg.norm(fd2 - jet.d2P) / np.linalg.norm(jet.d2P))
    simple = PerturbationCurve(Subspace(np.eye(2)[:, [0]]), np.array([0.5]), np.array([0.0, 1.0]))
    closed = np.max(np.abs(curve_jet(simple).d2P - np.diag([-0.5, 0.5])))
    ok = worst1 <= 1e-6 and worst2 <= 1e-4 and closed <= 1e-10
    record(2, ok, f"max rel err first={worst1:.2e}, second={worst2:.2e}, closed-form L=1 err={closed:.1e}")
    assert worst1 <= 1e-6 and worst2 <= 1e-4
    assert closed <= 1e-10


def test_criterion_3_counterexample():
    p = DimProfile(3, (2, 2), (1.0, 1.0))
    fi = fundamental_inequality(p)
    rep = multistart(p, OptimizerConfig(restarts=20, seed=7))
    bound = ffp_lower_bound(p)
    in_E = rep.structure is not None and rep.structure.in_class_E
    none_tight = all(v > bound + 1e-4 for v in rep.restart_values) and rep.tight_alpha is None
    ok = fi and abs(rep.ffp - 6.0) <= 1e-6 and rep.ffp > 16 / 3 and not in_E and none_tight
    record(3, ok, f"FI={fi}, best ffp={rep.ffp:.12f} (bound {bound:.6f}), in class E={in_E}, tight found={not none_tight}")
    assert fi
    assert rep.ffp == pytest.approx(6.0, abs=1e-6)
    assert bound == 16 / 3 and rep.ffp > bound
    assert not in_E
    assert none_tight


def test_criterion_4_tight_existence():
    rep = multistart(DimProfile(2, (1, 1, 1), (1.0, 1.0, 1.0)), OptimizerConfig(restarts=20, seed=0))
    alpha = rep.tight_alpha
    mb_ok = abs(rep.ffp - 4.5) <= 1e-8 and alpha is not None and abs(alpha - 1.5) <= 1e-8
    worst, count = 0.0, 0
    rng = np.random.default_rng(404)
    for d in range(1, 5):
        for dims in compositions(d):
            for w2 in ((1.0,) * len(dims), tuple(float(x) for x in rng.uniform(0.2, 3.0, len(dims)))):
                p = DimProfile(d, dims, w2)
                r = multistart(p, OptimizerConfig(restarts=4, seed=count))
                worst = max(worst, abs(r.ffp - minimum_value(p)))
                count += 1
    ok = mb_ok and worst <= 1e-8
    record(4, ok, f"three lines: ffp={rep.ffp:.12f}, alpha={alpha}; {count} orthogonal-sum profiles, max |ffp-min|={worst:.1e}")
    assert mb_ok
    assert worst <= 1e-8


def test_criterion_5_structure_theorems():
    rng = np.random.default_rng(505)
    worst, passed, ij = 0.0, 0, 0
    for i in range(100):
        sf = structured_frame(rng, field="complex" if i % 2 else "real")
        res = verify(sf.frame)
        passed += res.passed
        ij += check_IJ_prediction(sf.frame)
        if res.passed:
            c = res.report
            resid = [*c.containment_residuals, c.lambdaJ_identity_residual, *c.tight_residuals, *c.orthogonality_residuals]
            worst = max(worst, *resid, res.decomposition.complement_residual)
    named = 0
    misses = []
    for i in range(100):
        kind = CORRUPTIONS[i % len(CORRUPTIONS)]
        sf = structured_frame(rng, d=int(rng.integers(3, 9)), n_groups=int(rng.integers(1, 3)))
        got = verify(corrupt(sf, kind, rng)).first_failure
        named += got == kind
        if got != kind:
            misses.append((kind, got))
    ok = passed == 100 and ij == 100 and worst <= 1e-8 and named == 100
    record(5, ok, f"structured pass {passed}/100, IJ prediction {ij}/100, max residual {worst:.1e}, corruptions named {named}/100")
    assert passed == 100 and ij == 100
    assert worst <= 1e-8
    assert named == 100, misses[:5]


def test_criterion_6_irregularity_algebra():
    rng = np.random.default_rng(606)
    flips = equiv = minval = 0
    n = 10_000
    for _ in range(n):
        K = int(rng.integers(1, 9))
        L = [int(x) for x in rng.integers(1, 6, K)]
        d = int(rng.integers(1, sum(L) + 1))
        c = sorted((int(x) for x in rng.integers(1, 60, K)), reverse=True)
        res = irregularity(d, L, c)
        scan = [(d - sum(L[: j + 1])) * c[j] <= sum(a * b for a, b in zip(L[j + 1 :], c[j + 1 :])) for j in range(K)]
        N0 = res.N0
        flips += list(res.predicate_trace) == scan and not any(scan[: N0 - 1]) and all(scan[N0 - 1 :])
        p = DimProfile(d, tuple(L), tuple(float(x) for x in c))
        equiv += fundamental_inequality(p) == (N0 == 1)
        value, bound = minimum_value(p), ffp_lower_bound(p)
        head = sum(L[: N0 - 1])
        exact = sum(Fraction(ck) ** 2 * Lk for ck, Lk in zip(c[: N0 - 1], L[: N0 - 1])) + Fraction(
            sum(ck * Lk for ck, Lk in zip(c[N0 - 1 :], L[N0 - 1 :]))
        ) ** 2 / (d - head)
        good = value == pytest.approx(float(exact), rel=1e-12)
        good &= (value == bound) if N0 == 1 else (value > bound and exact > Fraction(sum(a * b for a, b in zip(c, L))) ** 2 / d)
        minval += good
    p411 = DimProfile(2, (1, 1, 1), (4.0, 1.0, 1.0))
    N0 = irregularity(2, (1, 1, 1), (4.0, 1.0, 1.0)).N0
    mv = minimum_value(p411)
    best = multistart(p411, OptimizerConfig(restarts=20, seed=6)).ffp
    ok = flips == n and equiv == n and minval == n and N0 == 2 and mv == 20.0 and abs(best - 20.0) <= 1e-6
    record(6, ok, f"single flip {flips}/{n}, FI<=>N0=1 {equiv}/{n}, min value {minval}/{n}; (4,1,1): N0={N0}, min={mv}, multistart={best:.12f}")
    assert flips == n and equiv == n and minval == n
    assert N0 == 2 and mv == 20.0
    assert best == pytest.approx(20.0, abs=1e-6)


def test_criterion_7_trace_identity():
    rng = np.random.default_rng(707)
    worst = 0.0
    frames = [random_frame(random_profile(rng), rng) for _ in range(1000)]
    frames += [structured_frame(rng).frame for _ in range(100)]
    for F in frames:
        total = float(np.sum(F.weights2 * np.asarray(F.dims)))
        worst = max(worst, abs(np.trace(frame_operator(F)).real - total) / total)
    ok = worst <= 1e-9
    record(7, ok, f"{len(frames)} frames, max relative trace error {worst:.1e}")
    assert ok
