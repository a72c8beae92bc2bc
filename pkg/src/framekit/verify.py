"""Run every structure check in sequence and name the first clause that fails.

Order: class membership -> index-set theorem -> minimizer shape ->
smallest-eigenvalue index set -> prefix/suffix decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from framekit.errors import CriterionDisagreement, DimensionDeficit, StructureMismatch
from framekit.irregularity import Decomposition, decompose, predicted_IJ
from framekit.spectral import (
    CLUSTER_TOL,
    MEMBER_TOL,
    StructureReport,
    structure_report,
    verify_minimizer_structure,
)


@dataclass
class VerificationResult:
    first_failure: str | None
    message: str = ""
    report: StructureReport | None = None
    predicted_IJ: list[int] | None = None
    decomposition: Decomposition | None = None
    stages: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.first_failure is None

    def to_json(self) -> dict:
        out = {
            "passed": self.passed,
            "first_failure": self.first_failure,
            "message": self.message,
            "stages": list(self.stages),
            "predicted_IJ": self.predicted_IJ,
        }
        if self.report is not None:
            out["structure"] = self.report.to_json()
        if self.decomposition is not None:
            dc = self.decomposition
            out["decomposition"] = {
                "N0": dc.N0,
                "prefix": list(dc.prefix),
                "suffix": list(dc.suffix),
                "alpha": dc.alpha,
                "prefix_orthogonality": dc.prefix_orthogonality,
                "complement_residual": dc.complement_residual,
            }
        return out


def verify(F, tol: float = MEMBER_TOL, cluster_tol: float = CLUSTER_TOL) -> VerificationResult:
    """Raises CriterionDisagreement if the tolerances cannot separate the spectrum."""
    res = VerificationResult(None)

    rep = structure_report(F, tol, cluster_tol)
    res.report = rep
    res.stages.append("index_sets")
    if not rep.in_class_E:
        res.first_failure = "class_E"
        res.message = f"members {rep.partition.unassigned} are not eigenoperators of the frame operator"
        return res

    rep = verify_minimizer_structure(F, tol, cluster_tol)
    res.report = rep
    res.stages += ["theorem31", "minimizer_structure"]
    if rep.failures:
        res.first_failure = rep.failures[0]
        res.message = f"failed clauses: {rep.failures}"
        return res

    res.stages.append("IJ_prediction")
    actual = rep.partition.index_sets[-1]
    try:
        res.predicted_IJ = predicted_IJ(F)
    except DimensionDeficit as exc:
        res.first_failure = "IJ_prediction"
        res.message = f"I_J = {actual}; no prediction: {exc}"
        return res
    if actual != res.predicted_IJ:
        res.first_failure = "IJ_prediction"
        res.message = f"I_J = {actual}, expected {res.predicted_IJ}"
        return res

    res.stages.append("decompose")
    try:
        res.decomposition = decompose(F, tol)
    except StructureMismatch as exc:
        res.first_failure = exc.clause
        res.message = str(exc)
    return res


__all__ = ["VerificationResult", "verify", "CriterionDisagreement"]
