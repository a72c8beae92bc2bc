"""Eigenstructure of the frame operator and the eigenoperator class.

A frame is in the eigenoperator class when every projection P_k satisfies
S P_k = lambda_j P_k for one of the distinct eigenvalues lambda_j of S.
The index set I_j collects the members attached to lambda_j.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from framekit.core import FusionFrame, frame_operator
from framekit.errors import CriterionDisagreement, NotHermitian, NotInClassE

CLUSTER_TOL = 1e-8
MEMBER_TOL = 1e-8
ZERO_EIG_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Eigenstructure:
    lambdas: np.ndarray  # distinct eigenvalues, strictly decreasing
    eigenbases: tuple[np.ndarray, ...]
    cluster_tol: float
    min_gap: float  # smallest separation between consecutive clusters (inf if J == 1)

    @property
    def J(self) -> int:
        return len(self.lambdas)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(E.shape[1] for E in self.eigenbases)

    @property
    def near_degenerate(self) -> bool:
        """True when some eigen-gap is within 100x of the clustering threshold."""
        scale = max(1.0, float(self.lambdas[0]))
        return self.min_gap <= 100 * self.cluster_tol * scale

    def projector(self, j: int) -> np.ndarray:
        E = self.eigenbases[j]
        return E @ E.conj().T

    def reconstruct(self) -> np.ndarray:
        return sum(lam * self.projector(j) for j, lam in enumerate(self.lambdas))


def eigenstructure(S: np.ndarray, cluster_tol: float = CLUSTER_TOL) -> Eigenstructure:
    """Distinct eigenvalues and eigenspaces of a Hermitian matrix.

    Sorted eigenvalues are grouped by single linkage: a new cluster starts
    whenever the gap to the previous eigenvalue exceeds
    cluster_tol * max(1, lambda_max). Each cluster is represented by its mean.
    """
    S = np.asarray(S)
    norm = np.linalg.norm(S)
    if np.linalg.norm(S - S.conj().T) > 1e-10 * max(norm, np.finfo(float).tiny):
        raise NotHermitian("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh((S + S.conj().T) / 2)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    thresh = cluster_tol * max(1.0, float(vals[0]))

    groups = [[0]]
    for i in range(1, len(vals)):
        if vals[i - 1] - vals[i] > thresh:
            groups.append([i])
        else:
            groups[-1].append(i)

    lambdas = np.array([vals[g].mean() for g in groups])
    bases = []
    for g in groups:
        q, _ = scipy.linalg.qr(vecs[:, g], mode="economic")
        bases.append(q)
    gaps = [vals[groups[j][-1]] - vals[groups[j + 1][0]] for j in range(len(groups) - 1)]
    return Eigenstructure(lambdas, tuple(bases), cluster_tol, float(min(gaps)) if gaps else float("inf"))


@dataclass(frozen=True)
class IndexPartition:
    assignments: tuple[int | None, ...]  # 0-based eigen-cluster per member, None if unassigned
    J: int
    operator_residuals: np.ndarray  # K x J, ||S P_k - lambda_j P_k||_F
    containment_residuals: np.ndarray  # K x J, ||(I - Pi_{E_j}) basis_k||_F

    @property
    def in_class_E(self) -> bool:
        return all(a is not None for a in self.assignments)

    @property
    def index_sets(self) -> list[list[int]]:
        sets: list[list[int]] = [[] for _ in range(self.J)]
        for k, j in enumerate(self.assignments):
            if j is not None:
                sets[j].append(k)
        return sets

    @property
    def unassigned(self) -> list[int]:
        return [k for k, j in enumerate(self.assignments) if j is None]


def index_sets(
    F: FusionFrame,
    E: Eigenstructure | None = None,
    tol: float = MEMBER_TOL,
    cluster_tol: float = CLUSTER_TOL,
) -> IndexPartition:
    """Attach each member to the eigenvalue it is an eigenoperator for.

    Membership k in I_j is tested twice: via the operator identity
    ||S P_k - lambda_j P_k||_F <= tol * max(1, lambda_j) * sqrt(L_k), and via
    containment ||(I - Pi_{E_j}) basis_k||_F <= tol. The two must agree.
    """
    S = frame_operator(F)
    if E is None:
        E = eigenstructure(S, cluster_tol)
    K, J = F.K, E.J
    op = np.zeros((K, J))
    cont = np.zeros((K, J))
    assignments: list[int | None] = []
    for k, W in enumerate(F.subspaces):
        P = W.projection
        hit = None
        for j in range(J):
            lam = E.lambdas[j]
            Ej = E.eigenbases[j]
            op[k, j] = np.linalg.norm(S @ P - lam * P)
            cont[k, j] = np.linalg.norm(W.basis - Ej @ (Ej.conj().T @ W.basis))
            by_op = op[k, j] <= tol * max(1.0, lam) * np.sqrt(W.dim)
            by_cont = cont[k, j] <= tol
            if by_op != by_cont:
                raise CriterionDisagreement(
                    f"member {k}, eigenvalue {lam:.6g}: operator residual {op[k, j]:.3e}, "
                    f"containment residual {cont[k, j]:.3e} at tol={tol:g}"
                )
            if by_op and hit is None:
                hit = j
        assignments.append(hit)
    return IndexPartition(tuple(assignments), J, op, cont)


@dataclass
class StructureReport:
    """Clause-by-clause outcome of the structure checks on one frame."""

    partition: IndexPartition
    lambdas: np.ndarray
    multiplicities: tuple[int, ...]
    near_degenerate: bool = False
    partition_ok: bool | None = None
    containment_residuals: list[float] = field(default_factory=list)
    lambdaJ_identity_residual: float | None = None
    tight_residuals: list[float] = field(default_factory=list)
    zero_eigen_ok: bool | None = None
    direct_sum: list[bool] = field(default_factory=list)
    ofb: list[bool] = field(default_factory=list)
    orthogonality_residuals: list[float] = field(default_factory=list)
    weight_residuals: list[float] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def in_class_E(self) -> bool:
        return self.partition.in_class_E

    @property
    def passed(self) -> bool:
        return self.in_class_E and not self.failures

    def to_json(self) -> dict:
        return {
            "in_class_E": self.in_class_E,
            "J": int(self.partition.J),
            "lambdas": [float(x) for x in self.lambdas],
            "multiplicities": list(self.multiplicities),
            "index_sets": self.partition.index_sets,
            "unassigned": self.partition.unassigned,
            "near_degenerate": self.near_degenerate,
            "failures": list(self.failures),
            "clauses": {
                "partition": self.partition_ok,
                "containment_residuals": [float(x) for x in self.containment_residuals],
                "lambdaJ_identity_residual": self.lambdaJ_identity_residual,
                "tight_residuals": [float(x) for x in self.tight_residuals],
                "zero_eigenvalues": self.zero_eigen_ok,
                "direct_sum": [bool(x) for x in self.direct_sum],
                "ofb": [bool(x) for x in self.ofb],
            },
        }


def structure_report(F: FusionFrame, tol: float = MEMBER_TOL, cluster_tol: float = CLUSTER_TOL) -> StructureReport:
    """Partition-only report; works for frames outside the class too."""
    E = eigenstructure(frame_operator(F), cluster_tol)
    part = index_sets(F, E, tol)
    rep = StructureReport(part, E.lambdas, E.multiplicities, E.near_degenerate)
    if not part.in_class_E:
        rep.failures.append("class_E")
    return rep


def _theorem31(F: FusionFrame, E: Eigenstructure, part: IndexPartition, tol: float) -> StructureReport:
    rep = StructureReport(part, E.lambdas, E.multiplicities, E.near_degenerate)
    sets = part.index_sets
    J, K = E.J, F.K

    # partition: every member in exactly one I_j
    flat = sorted(k for s in sets for k in s)
    rep.partition_ok = flat == list(range(K))
    if not rep.partition_ok:
        rep.failures.append("partition")

    rep.containment_residuals = [float(part.containment_residuals[k, j]) for k, j in enumerate(part.assignments)]
    if max(rep.containment_residuals) > tol:
        rep.failures.append("containment")

    w2 = F.weights2
    dims = F.dims
    lamJ = float(E.lambdas[-1])
    rhs = sum(w2[k] * dims[k] for k in sets[-1])
    rep.lambdaJ_identity_residual = float(abs(lamJ * E.multiplicities[-1] - rhs) / E.multiplicities[-1])
    if rep.lambdaJ_identity_residual > tol * max(1.0, lamJ):
        rep.failures.append("lambdaJ_identity")

    for j in range(J):
        partial = np.zeros((F.d, F.d), dtype=complex)
        for k in sets[j]:
            partial = partial + w2[k] * F.subspaces[k].projection
        rep.tight_residuals.append(float(np.linalg.norm(partial - E.lambdas[j] * E.projector(j))))
    if max(rep.tight_residuals) > tol * max(1.0, float(E.lambdas[0])) * np.sqrt(F.d):
        rep.failures.append("tight")

    lam1 = float(E.lambdas[0])
    rep.zero_eigen_ok = all(
        (len(sets[j]) == 0) == (abs(E.lambdas[j]) <= ZERO_EIG_RTOL * max(lam1, np.finfo(float).tiny))
        for j in range(J)
    )
    if not rep.zero_eigen_ok:
        rep.failures.append("zero_eigenvalues")
    return rep


def verify_theorem31(F: FusionFrame, tol: float = MEMBER_TOL, cluster_tol: float = CLUSTER_TOL) -> StructureReport:
    """Check the index-set properties that every eigenoperator-class frame has.

    Clauses: the I_j partition {0..K-1}; W_k lies in E_j for k in I_j; the
    smallest eigenvalue equals sum_{I_J} w_k^2 L_k / dim(E_J); {W_k}_{I_j} is
    lambda_j-tight on E_j; I_j is empty exactly when lambda_j = 0.
    """
    E = eigenstructure(frame_operator(F), cluster_tol)
    part = index_sets(F, E, tol)
    if not part.in_class_E:
        raise NotInClassE(f"members {part.unassigned} are not eigenoperators of S")
    return _theorem31(F, E, part, tol)


def verify_minimizer_structure(
    F: FusionFrame, tol: float = MEMBER_TOL, cluster_tol: float = CLUSTER_TOL
) -> StructureReport:
    """Index-set clauses plus the shape local minimizers must have.

    For every eigenvalue above the smallest, the members of I_j must be an
    orthonormal fusion basis of E_j (pairwise orthogonal, dimensions adding up
    to dim E_j, w_k^2 = lambda_j). ``direct_sum`` records the dimension count,
    ``ofb`` the orthogonality and weight conditions.
    """
    E = eigenstructure(frame_operator(F), cluster_tol)
    part = index_sets(F, E, tol)
    if not part.in_class_E:
        raise NotInClassE(f"members {part.unassigned} are not eigenoperators of S")
    rep = _theorem31(F, E, part, tol)
    sets = part.index_sets
    w2 = F.weights2
    for j in range(E.J - 1):
        members = sets[j]
        lam = float(E.lambdas[j])
        orth = 0.0
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                Pa = F.subspaces[members[a]].projection
                Pb = F.subspaces[members[b]].projection
                orth = max(orth, float(np.linalg.norm(Pa @ Pb)))
        wres = max((abs(w2[k] - lam) for k in members), default=0.0)
        rep.orthogonality_residuals.append(orth)
        rep.weight_residuals.append(float(wres))
        rep.direct_sum.append(sum(F.dims[k] for k in members) == E.multiplicities[j])
        rep.ofb.append(bool(orth <= tol and wres <= tol * max(lam, 1.0)))
    if not all(rep.direct_sum):
        rep.failures.append("direct_sum")
    if not all(rep.ofb):
        rep.failures.append("ofb")
    return rep


@dataclass(frozen=True, eq=False)
class SynthesisOperator:
    T: np.ndarray  # d x sum(L_k); k-th block is w_k * basis_k
    blocks: tuple[slice, ...]

    def __call__(self, coeffs) -> np.ndarray:
        """T((f_k)_k) = sum_k w_k f_k, coefficients given in each member's basis."""
        return self.T @ np.asarray(coeffs)

    def adjoint(self, f) -> np.ndarray:
        return self.T.conj().T @ np.asarray(f)


def synthesis(F: FusionFrame) -> SynthesisOperator:
    blocks, cols, start = [], [], 0
    for W, w in zip(F.subspaces, F.weights):
        cols.append(w * W.basis)
        blocks.append(slice(start, start + W.dim))
        start += W.dim
    return SynthesisOperator(np.hstack(cols), tuple(blocks))
