"""Irregularity index, fundamental inequality and the closed-form minimum.

For a non-increasing positive sequence c (normally c = w^2) and dims L with
d <= sum(L), the predicate

    (d - sum_{k<=j} L_k) c_j <= sum_{k>j} L_k c_k

fails for j < N0 and holds for j >= N0. N0 - 1 is the (L, d)-irregularity.
Indices in this module are 1-based where they name N0 (to match the usual
statement of the result) and 0-based everywhere else.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from framekit.core import DimProfile, FusionFrame, ffp_lower_bound, frame_operator
from framekit.errors import (
    DimensionDeficit,
    InternalInvariantViolation,
    NotSorted,
    StructureMismatch,
)
from framekit.spectral import MEMBER_TOL, verify_minimizer_structure


@dataclass(frozen=True)
class IrregularityResult:
    N0: int  # 1-based
    predicate_trace: tuple[bool, ...]

    @property
    def irregularity(self) -> int:
        return self.N0 - 1


def irregularity(d: int, dims: Sequence[int], c: Sequence) -> IrregularityResult:
    """Scan the predicate for every j and return the flip index N0.

    Works with any ordered numeric type (float, int, Fraction); comparisons
    are exact in that type, ties count as the predicate holding.
    """
    dims = list(dims)
    c = list(c)
    if len(dims) != len(c) or not c:
        raise ValueError("dims and c must be non-empty and of equal length")
    if any(c[i] < c[i + 1] for i in range(len(c) - 1)):
        raise NotSorted("c must be non-increasing")
    if d > sum(dims):
        raise DimensionDeficit(f"d={d} exceeds sum of dims {sum(dims)}")

    K = len(c)
    # tail[j] = sum_{k>=j} L_k c_k (0-based), with the empty sum = 0
    tail = [0] * (K + 1)
    for k in range(K - 1, -1, -1):
        tail[k] = tail[k + 1] + dims[k] * c[k]
    trace = []
    head = 0
    for j in range(K):
        head += dims[j]
        trace.append((d - head) * c[j] <= tail[j + 1])
    N0 = trace.index(True) + 1  # the last index always satisfies the predicate
    return IrregularityResult(N0, tuple(trace))


def fundamental_inequality(p: DimProfile) -> bool:
    """max_k w_k^2 <= (1/d) sum_k w_k^2 L_k, evaluated as d*max <= sum.

    The comparison is exact on the stored doubles (rational arithmetic), so
    ties such as equal weights with sum(L) = d are never lost to rounding.
    """
    c = [Fraction(x) for x in p.weights2]
    return p.d * max(c) <= sum(ck * L for ck, L in zip(c, p.dims))


def sort_order(weights2: Sequence[float]) -> list[int]:
    """Stable permutation putting the squared weights in non-increasing order."""
    return sorted(range(len(weights2)), key=lambda k: -weights2[k])


def profile_N0(p: DimProfile) -> tuple[int, list[int]]:
    """N0 of the sorted profile, together with the sorting permutation."""
    order = sort_order(p.weights2)
    res = irregularity(p.d, [p.dims[k] for k in order], [Fraction(p.weights2[k]) for k in order])
    return res.N0, order


def minimum_value(p: DimProfile) -> float:
    """Closed-form minimum of the potential over eigenoperator-class minimizers:

        sum_{k<N0} w_k^4 L_k + (sum_{k>=N0} w_k^2 L_k)^2 / (d - sum_{k<N0} L_k)

    with weights sorted non-increasingly. Equals ffp_lower_bound when N0 = 1.
    """
    N0, order = profile_N0(p)
    if N0 == 1:
        return ffp_lower_bound(p)
    c = [p.weights2[k] for k in order]
    L = [p.dims[k] for k in order]
    head_dim = sum(L[: N0 - 1])
    room = p.d - head_dim
    if room < 1:
        raise InternalInvariantViolation(f"d - sum_(k<N0) L_k = {room} < 1 with N0={N0}")
    prefix = sum(c[k] ** 2 * L[k] for k in range(N0 - 1))
    suffix = sum(c[k] * L[k] for k in range(N0 - 1, len(c)))
    return prefix + suffix * suffix / room


def predicted_IJ(F: FusionFrame) -> list[int]:
    """Members (0-based, original order) expected in the smallest-eigenvalue set."""
    N0, order = profile_N0(F.profile)
    return sorted(order[N0 - 1 :])


def check_IJ_prediction(F: FusionFrame, tol: float = MEMBER_TOL) -> bool:
    """Does I_J equal the members from N0 onward (in sorted weight order)?

    Weights need not be sorted: the frame is sorted internally and the
    prediction is mapped back to the original member indices.
    """
    rep = verify_minimizer_structure(F, tol)
    return rep.partition.index_sets[-1] == predicted_IJ(F)


@dataclass(frozen=True)
class Decomposition:
    N0: int
    prefix: tuple[int, ...]  # original member indices, sorted weight order
    suffix: tuple[int, ...]
    alpha: float  # tight bound of the suffix on the complement of the prefix span
    prefix_orthogonality: float
    complement_residual: float


def decompose(F: FusionFrame, tol: float = MEMBER_TOL) -> Decomposition:
    """Split a structured minimizer into orthogonal prefix and tight suffix.

    The prefix (members before N0 in sorted weight order) must be mutually
    orthogonal; the suffix must be alpha-tight on the orthogonal complement of
    the prefix span, i.e. ||sum_{suffix} w_k^2 P_k - alpha Pi_c||_F <= tol.
    Raises StructureMismatch naming the failing clause.
    """
    rep = verify_minimizer_structure(F, tol)
    if rep.failures:
        raise StructureMismatch(rep.failures[0], "minimizer structure check failed")
    N0, order = profile_N0(F.profile)
    prefix, suffix = order[: N0 - 1], order[N0 - 1 :]
    if sorted(suffix) != rep.partition.index_sets[-1]:
        raise StructureMismatch("IJ_prediction", f"I_J = {rep.partition.index_sets[-1]}, expected {sorted(suffix)}")

    d = F.d
    orth = 0.0
    for a in range(len(prefix)):
        for b in range(a + 1, len(prefix)):
            Pa, Pb = F.subspaces[prefix[a]].projection, F.subspaces[prefix[b]].projection
            orth = max(orth, float(np.linalg.norm(Pa @ Pb)))
    if orth > tol:
        raise StructureMismatch("prefix_orthogonality", f"max ||P_a P_b|| = {orth:.3e}")

    Pi_prefix = sum((F.subspaces[k].projection for k in prefix), np.zeros((d, d)))
    Pi_c = np.eye(d) - Pi_prefix
    w2 = F.weights2
    Ssuf = sum((w2[k] * F.subspaces[k].projection for k in suffix), np.zeros((d, d)))
    room = d - sum(F.dims[k] for k in prefix)
    alpha = float(np.trace(Ssuf).real) / room
    resid = float(np.linalg.norm(Ssuf - alpha * Pi_c))
    if resid > tol * max(1.0, alpha) * np.sqrt(d):
        raise StructureMismatch("suffix_tight", f"residual {resid:.3e}")
    return Decomposition(N0, tuple(prefix), tuple(suffix), alpha, orth, resid)


def frame_report(F: FusionFrame) -> dict:
    """Irregularity summary of a frame's profile (no geometry involved)."""
    p = F.profile
    N0, _ = profile_N0(p)
    return {
        "N0": N0,
        "irregularity": N0 - 1,
        "fundamental_inequality": fundamental_inequality(p),
        "min_value": minimum_value(p),
        "lower_bound": ffp_lower_bound(p),
        "trace_S": float(np.trace(frame_operator(F)).real),
    }
