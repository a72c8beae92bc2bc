"""Subspaces, fusion frames, the frame operator and the fusion frame potential.

Subspaces are stored as orthonormal basis matrices (d x L); projections are
formed on demand and cached on the subspace. Everything here is immutable.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Union

import numpy as np
import scipy.linalg

from framekit.errors import BadDims, NotTight, RankDeficient, ShapeMismatch

Field = Literal["real", "complex"]

ORTHONORMAL_TOL = 1e-12
RANK_RTOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_field_array(raw) -> np.ndarray:
    a = np.asarray(raw)
    if np.iscomplexobj(a):
        return a.astype(np.complex128)
    return a.astype(np.float64)


@dataclass(frozen=True, eq=False)
class Subspace:
    """An L-dimensional subspace of F^d, held as a d x L orthonormal basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = _as_field_array(self.basis)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2:
            raise BadDims(f"basis must be a d x L matrix, got shape {b.shape}")
        d, L = b.shape
        if not 1 <= L <= d:
            raise BadDims(f"need 1 <= L <= d, got d={d}, L={L}")
        gram = b.conj().T @ b
        err = np.max(np.abs(gram - np.eye(L)))
        if err > ORTHONORMAL_TOL:
            raise ValueError(
                f"basis columns are not orthonormal (max |B^H B - I| = {err:.3e}); "
                "use orthonormalize()"
            )
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def field(self) -> Field:
        return "complex" if np.iscomplexobj(self.basis) else "real"

    @cached_property
    def projection(self) -> np.ndarray:
        return _frozen(self.basis @ self.basis.conj().T)

    def transformed(self, U: np.ndarray) -> Subspace:
        """Image of the subspace under a unitary U."""
        return Subspace(np.asarray(U) @ self.basis)


def orthonormalize(raw) -> Subspace:
    """Orthonormal basis of the column space of ``raw``.

    Householder QR with column pivoting; full column rank is decided from the
    singular values (smallest > 1e-10 * largest).
    """
    a = _as_field_array(raw)
    if a.ndim == 1:
        a = a[:, None]
    d, L = a.shape
    if L == 0 or L > d:
        raise RankDeficient(f"cannot have rank {L} in dimension {d}")
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0 or s[-1] <= RANK_RTOL * s[0]:
        raise RankDeficient(
            f"columns are numerically dependent (sigma_min/sigma_max = "
            f"{(s[-1] / s[0]) if s[0] else 0.0:.3e})"
        )
    q, _, _ = scipy.linalg.qr(a, mode="economic", pivoting=True)
    return Subspace(q[:, :L])


def projection(W: Subspace) -> np.ndarray:
    """Orthogonal projection onto W (d x d, Hermitian, idempotent)."""
    return W.projection


@dataclass(frozen=True)
class DimProfile:
    """Ambient dimension, subspace dimensions and squared weights.

    The squared weights are the canonical data (most formulas only see w^2);
    use :meth:`from_weights` to build a profile from plain weights.
    """

    d: int
    dims: tuple[int, ...]
    weights2: tuple[float, ...]
    field: Field = "real"

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        w2 = tuple(float(x) for x in self.weights2)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "weights2", w2)
        if self.d < 1:
            raise BadDims("d must be positive")
        if len(dims) != len(w2) or not dims:
            raise BadDims("dims and weights must be non-empty and of equal length")
        if min(dims) < 1:
            raise BadDims("all dims must be >= 1")
        if not all(np.isfinite(w2)) or min(w2) <= 0:
            raise BadDims("all weights must be strictly positive")
        if self.field not in ("real", "complex"):
            raise BadDims(f"unknown field {self.field!r}")

    @classmethod
    def from_weights(cls, d: int, dims: Sequence[int], weights: Sequence[float], field: Field = "real"):
        w = np.asarray(weights, dtype=float)
        if np.any(w <= 0):
            raise BadDims("all weights must be strictly positive")
        return cls(d, tuple(dims), tuple(w**2), field)

    @property
    def K(self) -> int:
        return len(self.dims)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(float(np.sqrt(c)) for c in self.weights2)


@dataclass(frozen=True, eq=False)
class FusionFrame:
    """Weighted family of subspaces {(W_k, w_k)} of F^d."""

    subspaces: tuple[Subspace, ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        subs = tuple(self.subspaces)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if not subs:
            raise BadDims("a fusion frame needs at least one member")
        if len(subs) != len(w):
            raise BadDims(f"{len(subs)} subspaces but {len(w)} weights")
        d = subs[0].ambient_dim
        if any(W.ambient_dim != d for W in subs):
            raise ShapeMismatch("all subspaces must live in the same ambient space")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise BadDims("weights must be strictly positive")
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def from_bases(cls, bases: Sequence, weights: Sequence[float]) -> FusionFrame:
        """Build a frame from raw (not necessarily orthonormal) basis matrices."""
        return cls(tuple(orthonormalize(b) for b in bases), np.asarray(weights, dtype=float))

    @property
    def d(self) -> int:
        return self.subspaces[0].ambient_dim

    @property
    def K(self) -> int:
        return len(self.subspaces)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(W.dim for W in self.subspaces)

    @property
    def weights2(self) -> np.ndarray:
        return self.weights**2

    @property
    def members(self) -> list[tuple[Subspace, float]]:
        return list(zip(self.subspaces, (float(x) for x in self.weights)))

    @property
    def field(self) -> Field:
        return "complex" if any(W.field == "complex" for W in self.subspaces) else "real"

    @property
    def profile(self) -> DimProfile:
        return DimProfile(self.d, self.dims, tuple(self.weights2), self.field)

    @property
    def projections(self) -> list[np.ndarray]:
        return [W.projection for W in self.subspaces]

    def replace(self, k: int, W: Subspace) -> FusionFrame:
        subs = list(self.subspaces)
        subs[k] = W
        return FusionFrame(tuple(subs), self.weights)

    def select(self, indices: Sequence[int]) -> FusionFrame:
        idx = list(indices)
        return FusionFrame(tuple(self.subspaces[i] for i in idx), self.weights[idx])

    def transformed(self, U: np.ndarray) -> FusionFrame:
        """The frame U·F = {(U W_k, w_k)}."""
        return FusionFrame(tuple(W.transformed(U) for W in self.subspaces), self.weights)


FrameLike = Union[FusionFrame, Sequence[Subspace]]


def frame_operator(F: FusionFrame) -> np.ndarray:
    """S = sum_k w_k^2 P_k."""
    S = np.zeros((F.d, F.d), dtype=np.result_type(*(W.basis for W in F.subspaces)))
    for W, w2 in zip(F.subspaces, F.weights2):
        S += w2 * W.projection
    return S


def ffp(F: FusionFrame) -> float:
    """Fusion frame potential tr(S^2).

    S is Hermitian, so tr(S^2) is the squared Frobenius norm of S.
    """
    S = frame_operator(F)
    return float(np.sum(np.abs(S) ** 2))


def ffp_lower_bound(p: DimProfile) -> float:
    """(1/d) (sum_k w_k^2 L_k)^2; attained exactly by tight frames."""
    total = sum(c * L for c, L in zip(p.weights2, p.dims))
    return total * total / p.d


def is_tight(F: FusionFrame, tol: float = 1e-8) -> float | None:
    """Return alpha if S = alpha I (relative to max(1, ||S||_F)), else None."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    S = frame_operator(F)
    alpha = float(np.trace(S).real) / F.d
    resid = np.linalg.norm(S - alpha * np.eye(F.d))
    if resid <= tol * max(1.0, np.linalg.norm(S)):
        return alpha
    return None


def reconstruct(F: FusionFrame, alpha: float, f, tol: float = 1e-8) -> np.ndarray:
    """(1/alpha) sum_k w_k^2 P_k f, for an alpha-tight frame."""
    measured = is_tight(F, tol)
    if measured is None:
        raise NotTight("frame operator is not a multiple of the identity")
    if abs(measured - alpha) > tol * max(1.0, abs(alpha)):
        raise NotTight(f"frame is {measured}-tight, not {alpha}-tight")
    f = np.asarray(f)
    if f.shape != (F.d,):
        raise ShapeMismatch(f"vector of length {F.d} expected, got shape {f.shape}")
    out = sum(w2 * (W.projection @ f) for W, w2 in zip(F.subspaces, F.weights2))
    return out / alpha


def _subspaces(A: FrameLike) -> tuple[Subspace, ...]:
    return A.subspaces if isinstance(A, FusionFrame) else tuple(A)


def distance(A: FrameLike, B: FrameLike) -> float:
    """[sum_k ||P_{A_k} - P_{B_k}||_F^2]^(1/2)."""
    a, b = _subspaces(A), _subspaces(B)
    if len(a) != len(b):
        raise ShapeMismatch(f"K differs: {len(a)} vs {len(b)}")
    if a and a[0].ambient_dim != b[0].ambient_dim:
        raise ShapeMismatch("ambient dimensions differ")
    total = sum(float(np.sum(np.abs(U.projection - V.projection) ** 2)) for U, V in zip(a, b))
    return float(np.sqrt(total))


def _gaussian(rng: np.random.Generator, shape, field: Field) -> np.ndarray:
    if field == "complex":
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return rng.standard_normal(shape)


def random_frame(p: DimProfile, seed, field: Field | None = None) -> FusionFrame:
    """Frame with Gaussian-random subspaces of the given profile.

    ``seed`` is anything ``numpy.random.default_rng`` accepts.
    """
    if any(L > p.d for L in p.dims):
        raise BadDims(f"subspace dims {p.dims} exceed d={p.d}")
    field = field or p.field
    rng = np.random.default_rng(seed)
    subs = tuple(orthonormalize(_gaussian(rng, (p.d, L), field)) for L in p.dims)
    return FusionFrame(subs, np.sqrt(np.asarray(p.weights2)))


def random_unitary(d: int, seed=None, field: Field = "real") -> np.ndarray:
    """Haar-distributed orthogonal / unitary matrix."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(_gaussian(rng, (d, d), field))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
