"""Explicit frames with known structure: tight frames, structured minimizers,
and deliberately broken variants of the latter.

A structured minimizer is a frame whose members split into an orthogonal
prefix (each member carrying w_k^2 equal to its own eigenvalue, all larger
than alpha) and a suffix that is alpha-tight on the orthogonal complement of
the prefix span.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from framekit.core import Field, FusionFrame, Subspace, random_unitary


def mercedes_benz(weight: float = 1.0) -> FusionFrame:
    """Three lines in R^2 at 0, 120 and 240 degrees (3/2-tight for weight 1)."""
    angles = np.deg2rad([0.0, 120.0, 240.0])
    subs = tuple(Subspace(np.array([[np.cos(a)], [np.sin(a)]])) for a in angles)
    return FusionFrame(subs, np.full(3, weight))


def harmonic_lines(n: int, weight: float = 1.0) -> FusionFrame:
    """n >= 2 equally spaced lines in R^2; (n w^2 / 2)-tight."""
    angles = np.pi * np.arange(n) / n
    subs = tuple(Subspace(np.array([[np.cos(a)], [np.sin(a)]])) for a in angles)
    return FusionFrame(subs, np.full(n, weight))


def split_columns(Q: np.ndarray, dims: Sequence[int]) -> list[Subspace]:
    """Cut an orthonormal column set into consecutive blocks of the given sizes."""
    if sum(dims) != Q.shape[1]:
        raise ValueError("dims must add up to the number of columns")
    out, start = [], 0
    for L in dims:
        out.append(Subspace(Q[:, start : start + L]))
        start += L
    return out


def orthogonal_sum_frame(d: int, dims: Sequence[int], weights: Sequence[float], U: np.ndarray | None = None) -> FusionFrame:
    """Members spanning consecutive coordinate blocks (rotated by U if given)."""
    Q = np.eye(d)[:, : sum(dims)] if U is None else np.asarray(U)[:, : sum(dims)]
    return FusionFrame(tuple(split_columns(Q, dims)), np.asarray(weights, dtype=float))


def random_partition(rng: np.random.Generator, m: int, max_parts: int | None = None) -> list[int]:
    """Random composition of m into positive parts."""
    max_parts = max_parts or m
    parts = int(rng.integers(1, min(m, max_parts) + 1))
    cuts = sorted(rng.choice(np.arange(1, m), size=parts - 1, replace=False)) if parts > 1 else []
    edges = [0, *cuts, m]
    return [int(edges[i + 1] - edges[i]) for i in range(parts)]


@dataclass(frozen=True)
class StructuredFrame:
    frame: FusionFrame
    N0: int  # 1-based index of the first suffix member
    alpha: float  # tight bound of the suffix
    prefix_groups: tuple[tuple[int, ...], ...]  # member indices per prefix eigenvalue
    suffix_copies: tuple[tuple[int, ...], ...]  # member indices per orthonormal suffix copy
    basis: np.ndarray  # unitary whose columns order prefix groups, then the suffix space


def structured_frame(
    rng: np.random.Generator,
    d: int | None = None,
    n_groups: int | None = None,
    n_copies: int | None = None,
    field: Field = "real",
) -> StructuredFrame:
    """Random frame with the orthogonal-prefix / tight-suffix shape.

    Members are ordered by non-increasing weight (prefix first).
    """
    d = d if d is not None else int(rng.integers(2, 9))
    max_groups = min(2, d - 1)
    n_groups = n_groups if n_groups is not None else int(rng.integers(0, max_groups + 1))
    if n_groups > d - 1:
        raise ValueError(f"at most {d - 1} prefix groups fit in dimension {d}")
    # dimensions: n_groups prefix blocks and a non-empty suffix block
    sizes = random_partition(rng, d, n_groups + 1) if n_groups else [d]
    while len(sizes) < n_groups + 1:
        sizes = random_partition(rng, d, n_groups + 1)
    prefix_sizes, m_suffix = sizes[:-1], sizes[-1]
    n_copies = n_copies if n_copies is not None else int(rng.integers(1, 4))

    U = random_unitary(d, rng, field)
    offset = sum(prefix_sizes)
    suffix_space = U[:, offset:]

    copy_w2 = rng.uniform(0.3, 2.0, n_copies)
    alpha = float(copy_w2.sum())
    lambdas = np.sort(alpha * (1.0 + rng.uniform(0.2, 2.0, n_groups)))[::-1]

    subs: list[Subspace] = []
    w2: list[float] = []
    groups, copies = [], []
    start = 0
    for lam, m in zip(lambdas, prefix_sizes):
        block = U[:, start : start + m]
        start += m
        members = split_columns(block, random_partition(rng, m))
        groups.append(tuple(range(len(subs), len(subs) + len(members))))
        subs += members
        w2 += [float(lam)] * len(members)

    # suffix: rotated orthonormal bases of the complement, heaviest copy first
    for c in np.sort(copy_w2)[::-1]:
        R = random_unitary(m_suffix, rng, field)
        members = split_columns(suffix_space @ R, random_partition(rng, m_suffix))
        copies.append(tuple(range(len(subs), len(subs) + len(members))))
        subs += members
        w2 += [float(c)] * len(members)

    N0 = (groups[-1][-1] + 2) if groups else 1
    frame = FusionFrame(tuple(subs), np.sqrt(np.asarray(w2)))
    return StructuredFrame(frame, N0, alpha, tuple(groups), tuple(copies), U)


def tight_frame(rng: np.random.Generator, d: int | None = None, field: Field = "real") -> StructuredFrame:
    """Structured frame with an empty prefix, i.e. a tight fusion frame for F^d."""
    return structured_frame(rng, d=d, n_groups=0, field=field)


def _small_rotation(rng: np.random.Generator, d: int, field: Field, angle: float) -> np.ndarray:
    X = rng.standard_normal((d, d))
    if field == "complex":
        X = X + 1j * rng.standard_normal((d, d))
    A = X - X.conj().T
    return scipy.linalg.expm(A * (angle / np.linalg.norm(A, 2)))


CORRUPTIONS = ("class_E", "direct_sum", "IJ_prediction")


def corrupt(sf: StructuredFrame, kind: str, rng: np.random.Generator) -> FusionFrame:
    """Break one structural clause of a structured frame.

    class_E       -- tilt one member off its eigenspace by a small rotation.
    direct_sum    -- replace a prefix member by two copies of itself, each with
                     half the squared weight (operator unchanged, dims overlap).
    IJ_prediction -- keep a single suffix copy and drop one prefix member, so
                     the smallest eigenvalue is 0 with an empty index set.
    """
    F = sf.frame
    field = F.field
    if kind == "class_E":
        movable = [k for k, L in enumerate(F.dims) if L < F.d]
        if not movable:
            raise ValueError("every member is the whole space; nothing to tilt")
        k = int(rng.choice(movable))
        for _ in range(20):
            R = _small_rotation(rng, F.d, field, float(rng.uniform(0.1, 0.6)))
            W = Subspace(np.linalg.qr(R @ F.subspaces[k].basis)[0])
            if np.linalg.norm(W.projection - F.subspaces[k].projection) > 1e-3:
                return F.replace(k, W)
        raise RuntimeError("could not tilt member")
    if kind == "direct_sum":
        if not sf.prefix_groups:
            raise ValueError("direct_sum corruption needs a non-empty prefix")
        k = int(rng.choice([i for g in sf.prefix_groups for i in g]))
        subs = list(F.subspaces)
        w = list(F.weights)
        w_half = w[k] / np.sqrt(2)
        subs[k : k + 1] = [subs[k], subs[k]]
        w[k : k + 1] = [w_half, w_half]
        return FusionFrame(tuple(subs), np.asarray(w))
    if kind == "IJ_prediction":
        if not sf.prefix_groups:
            raise ValueError("IJ_prediction corruption needs a non-empty prefix")
        prefix = [i for g in sf.prefix_groups for i in g]
        drop = int(rng.choice(prefix))
        keep = [i for i in prefix if i != drop] + list(sf.suffix_copies[0])
        return F.select(keep)
    raise ValueError(f"unknown corruption {kind!r}")


def with_order(sf: StructuredFrame, order: Sequence[int]) -> StructuredFrame:
    """Same frame with members permuted (new member i is old member order[i])."""
    inv = {old: new for new, old in enumerate(order)}
    return replace(
        sf,
        frame=sf.frame.select(order),
        prefix_groups=tuple(tuple(inv[i] for i in g) for g in sf.prefix_groups),
        suffix_copies=tuple(tuple(inv[i] for i in c) for c in sf.suffix_copies),
    )
