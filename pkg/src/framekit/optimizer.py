"""Descent on products of Grassmannians for the fusion frame potential.

The perturbation curve used to probe second-order behaviour bends an
orthonormal set {f_l} towards a unit vector h orthogonal to all of them:

    A(t)[:, l] = sqrt(1 - t^2 |z_l|^2) f_l + t z_l h,   |z_l| <= 1/2.

Its projection pi(t) = A (A^H A)^{-1} A^H has closed-form first and second
derivatives at t = 0 (see :func:`curve_jet`).
"""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from framekit.core import (
    DimProfile,
    Field,
    FusionFrame,
    Subspace,
    ffp,
    ffp_lower_bound,
    frame_operator,
    is_tight,
    orthonormalize,
    random_frame,
)
from framekit.errors import BadDims, FrameError
from framekit.spectral import StructureReport, structure_report

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PerturbationCurve:
    base: Subspace
    coeffs: np.ndarray  # z_l, one per basis column
    direction: np.ndarray  # unit h, orthogonal to the base subspace

    def __post_init__(self):
        z = np.asarray(self.coeffs).reshape(-1)
        h = np.asarray(self.direction).reshape(-1)
        F = self.base.basis
        if z.shape[0] != F.shape[1]:
            raise BadDims(f"{F.shape[1]} coefficients expected, got {z.shape[0]}")
        if h.shape[0] != F.shape[0]:
            raise BadDims("direction has the wrong length")
        if np.max(np.abs(z)) > 0.5 + 1e-15 or not np.any(z != 0):
            raise ValueError("coefficients must satisfy |z_l| <= 1/2 and not all vanish")
        if abs(np.linalg.norm(h) - 1) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if np.max(np.abs(F.conj().T @ h)) > 1e-12:
            raise ValueError("direction must be orthogonal to the base subspace")
        object.__setattr__(self, "coeffs", z)
        object.__setattr__(self, "direction", h)

    @property
    def F(self) -> np.ndarray:
        return self.base.basis

    @property
    def H(self) -> np.ndarray:
        """H[:, l] = z_l h."""
        return np.outer(self.direction, self.coeffs)

    def matrix(self, t: float) -> np.ndarray:
        """A(t), before orthonormalization."""
        z = self.coeffs
        return self.F * np.sqrt(1 - t * t * np.abs(z) ** 2) + t * self.H


def random_curve(base: Subspace, seed=None, field: Field | None = None) -> PerturbationCurve:
    """Curve with random coefficients (|z_l| <= 1/2) and random admissible h."""
    rng = np.random.default_rng(seed)
    field = field or base.field
    d, L = base.basis.shape
    if L >= d:
        raise BadDims("no direction orthogonal to a full-dimensional subspace")
    if field == "complex":
        z = rng.uniform(0, 0.5, L) * np.exp(2j * np.pi * rng.uniform(size=L))
        g = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    else:
        z = rng.uniform(-0.5, 0.5, L)
        g = rng.standard_normal(d)
    F = base.basis
    h = g - F @ (F.conj().T @ g)
    h = h - F @ (F.conj().T @ h)
    return PerturbationCurve(base, z, h / np.linalg.norm(h))


def curve_point(c: PerturbationCurve, t: float) -> Subspace:
    """The subspace R(A(t)); always L-dimensional for |t| < 1."""
    if not abs(t) < 1:
        raise ValueError("t must lie in (-1, 1)")
    if t == 0:
        return c.base
    return orthonormalize(c.matrix(t))


@dataclass(frozen=True, eq=False)
class CurveJet:
    P0: np.ndarray
    dP: np.ndarray
    d2P: np.ndarray


def curve_jet(c: PerturbationCurve) -> CurveJet:
    """Projection and its first two t-derivatives at t = 0.

        dP  = H F^H + F H^H
        d2P = Ft F^H + 2 H H^H + F D F^H + F Ft^H

    with Ft[:, l] = -|z_l|^2 f_l and D = d^2/dt^2 (A^H A)^{-1} at 0. Since
    (A^H A)(l, l') = delta + (1 - delta) t^2 conj(z_l) z_l', D carries only
    off-diagonal entries: D(l, l') = -2 (1 - delta) conj(z_l) z_l'.
    """
    F, H, z = c.F, c.H, c.coeffs
    Ft = F * (-np.abs(z) ** 2)
    D = -2.0 * np.outer(z.conj(), z)
    np.fill_diagonal(D, 0)
    dP = H @ F.conj().T + F @ H.conj().T
    d2P = Ft @ F.conj().T + 2 * H @ H.conj().T + F @ D @ F.conj().T + F @ Ft.conj().T
    return CurveJet(c.base.projection, dP, d2P)


def joint_directional_derivatives(F: FusionFrame, curves: Mapping[int, PerturbationCurve]) -> tuple[float, float]:
    """d/dt and d^2/dt^2 at t=0 of the potential when members move along curves.

    With S(t) = S + sum_k w_k^2 (pi_k(t) - P_k): first = 2 tr(S S'),
    second = 2 tr(S'^2) + 2 tr(S S'').
    """
    S = frame_operator(F)
    dS = np.zeros_like(S, dtype=complex)
    d2S = np.zeros_like(S, dtype=complex)
    for k, c in curves.items():
        W = F.subspaces[k]
        if np.linalg.norm(W.projection - c.base.projection) > 1e-10:
            raise ValueError(f"curve base does not match member {k}")
        jet = curve_jet(c)
        w2 = F.weights2[k]
        dS += w2 * jet.dP
        d2S += w2 * jet.d2P
    first = 2 * np.trace(S @ dS).real
    second = 2 * np.trace(dS @ dS).real + 2 * np.trace(S @ d2S).real
    return float(first), float(second)


def ffp_directional_derivatives(F: FusionFrame, k: int, c: PerturbationCurve) -> tuple[float, float]:
    """Derivatives of the potential when only member k moves along ``c``."""
    return joint_directional_derivatives(F, {k: c})


def riemannian_gradient(F: FusionFrame, S: np.ndarray | None = None) -> list[np.ndarray]:
    """G_k = 4 w_k^2 (I - P_k) S basis_k, one d x L_k block per member.

    Pairing Re tr(G_k^H H) with the velocity H of a curve through member k
    gives exactly the first directional derivative of the potential.
    """
    if S is None:
        S = frame_operator(F)
    return _grads(S, [W.basis for W in F.subspaces], F.weights2)


def gradient_norm(grads) -> float:
    return float(np.sqrt(sum(np.sum(np.abs(G) ** 2) for G in grads)))


@dataclass
class OptimizerConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-10
    initial_step: float | None = None  # None -> 1 / (1 + lambda_max(S_start))
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    restarts: int = 20
    seed: int = 0
    field: Field = "real"
    max_backtracks: int = 60

    def __post_init__(self):
        if self.max_iters < 0 or self.restarts < 1 or self.grad_tol <= 0:
            raise ValueError("max_iters >= 0, restarts >= 1 and grad_tol > 0 required")
        if self.initial_step is not None and self.initial_step <= 0:
            raise ValueError("initial_step must be positive")
        if not 0 < self.armijo_c < 1 or not 0 < self.backtrack_factor < 1:
            raise ValueError("armijo_c and backtrack_factor must lie in (0, 1)")
        if self.field not in ("real", "complex"):
            raise ValueError(f"unknown field {self.field!r}")

    @classmethod
    def from_json(cls, obj: Mapping) -> OptimizerConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown optimizer options: {sorted(unknown)}")
        return cls(**obj)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class OptimizerReport:
    frame: FusionFrame
    ffp: float
    lower_bound: float
    iterations: int
    history: list[tuple[int, float, float]]  # (iter, ffp, grad_norm) per accepted iterate
    converged: bool
    status: str  # "converged" | "max_iters" | "roundoff"
    grad_norm: float
    structure: StructureReport | None = None
    structure_error: str | None = None
    tight_alpha: float | None = None
    restart_values: list[float] = field(default_factory=list)
    best_restart: int | None = None

    @property
    def gap(self) -> float:
        return self.ffp - self.lower_bound

    @property
    def ffp_history(self) -> list[float]:
        return [h[1] for h in self.history]

    def to_json(self) -> dict:
        from framekit.io import frame_to_json

        out = {
            "ffp": self.ffp,
            "lower_bound": self.lower_bound,
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
            "status": self.status,
            "grad_norm": self.grad_norm,
            "tight": self.tight_alpha is not None,
            "alpha": self.tight_alpha,
            "history": [[i, f, g] for i, f, g in self.history],
            "frame": frame_to_json(self.frame),
        }
        if self.structure is not None:
            out["structure"] = self.structure.to_json()
        if self.structure_error is not None:
            out["structure_error"] = self.structure_error
        if self.restart_values:
            out["restart_values"] = list(self.restart_values)
            out["best_restart"] = self.best_restart
        return out


def _polar_increment(Y: np.ndarray, G: np.ndarray, step: float) -> np.ndarray:
    """Delta with Y + Delta = (Y - step G)(I + step^2 G^H G)^{-1/2}.

    Y + Delta spans the same subspace as the QR orthonormalization of
    Y - step G (G is orthogonal to Y), but the increment is formed without
    cancellation, so potential differences stay accurate as G -> 0.
    """
    s2, V = np.linalg.eigh(G.conj().T @ G)
    s2 = np.clip(s2, 0, None)
    shrink = np.expm1(-0.5 * np.log1p(step * step * s2))  # (1 + t^2 s^2)^(-1/2) - 1
    C_minus_I = (V * shrink) @ V.conj().T
    C = C_minus_I + np.eye(Y.shape[1])
    return Y @ C_minus_I - step * (G @ C)


def _renormalize(Y: np.ndarray) -> np.ndarray:
    """One Newton-Schulz step towards orthonormal columns.

    The increment formula assumes Y^H Y = I; without this the rounding error
    in the column norms is amplified from one iteration to the next.
    """
    return Y @ (1.5 * np.eye(Y.shape[1]) - 0.5 * (Y.conj().T @ Y))


def _potential_change(S: np.ndarray, Ys, dYs, w2) -> tuple[float, np.ndarray]:
    """Exact-in-form change of tr(S^2) when each Y_k moves by dY_k."""
    dS = np.zeros_like(S, dtype=np.result_type(S, *dYs))
    for Y, dY, c in zip(Ys, dYs, w2):
        A = dY @ Y.conj().T
        dS += c * (A + A.conj().T + dY @ dY.conj().T)
    df = 2 * np.vdot(S, dS).real + np.sum(np.abs(dS) ** 2)
    return float(df), dS


def _operator(Ys, w2) -> np.ndarray:
    S = np.zeros((Ys[0].shape[0],) * 2, dtype=np.result_type(*Ys))
    for Y, c in zip(Ys, w2):
        S += c * (Y @ Y.conj().T)
    return S


def _grads(S, Ys, w2):
    out = []
    for Y, c in zip(Ys, w2):
        SY = S @ Y
        G = SY - Y @ (Y.conj().T @ SY)
        # second pass: the first leaves an O(eps * ||S||) component along Y
        G = G - Y @ (Y.conj().T @ G)
        out.append(4 * c * G)
    return out


def minimize(
    start: FusionFrame,
    cfg: OptimizerConfig | None = None,
    verify_tol: float = 1e-8,
    callback: Callable[[int, list[np.ndarray]], None] | None = None,
) -> OptimizerReport:
    """Riemannian steepest descent with Armijo backtracking.

    Trial points are the retraction of basis_k - step * G_k onto the
    Grassmannian (orthonormalized, so every iterate keeps its dimensions).
    Trial steps start from a Barzilai-Borwein estimate. The Armijo test runs
    on the potential change computed from the basis increments, which stays
    accurate far below the rounding level of the potential itself; the
    recorded history accumulates these changes and is therefore exactly
    non-increasing. If no step passes the test the run stops with status
    "roundoff" (decrease below noise) or "line_search_failed".

    ``callback(iteration, bases)`` is called on every accepted iterate.
    """
    cfg = cfg or OptimizerConfig()
    w2 = np.asarray(start.weights2)
    Ys = [np.array(W.basis) for W in start.subspaces]
    S = _operator(Ys, w2)
    f = float(np.sum(np.abs(S) ** 2))
    grads = _grads(S, Ys, w2)
    g = gradient_norm(grads)
    history = [(0, f, g)]
    step0 = cfg.initial_step or 1.0 / (1.0 + float(np.linalg.eigvalsh(S)[-1]))
    lo, hi = 1e-10 * step0, 1e4 * step0
    step = step0
    status = "max_iters"
    it = 0
    eps = np.finfo(float).eps
    prev = None  # (Ys, grads) of the previous iterate, for the BB step
    while True:
        if g <= cfg.grad_tol:
            status = "converged"
            break
        if it >= cfg.max_iters:
            break
        if prev is not None:
            s_num = sum(np.sum(np.abs(Y - Yp) ** 2) for Y, Yp in zip(Ys, prev[0]))
            s_den = sum(np.vdot(Y - Yp, Gn - Gp).real for Y, Yp, Gn, Gp in zip(Ys, prev[0], grads, prev[1]))
            if s_den > 0:
                step = float(np.clip(s_num / s_den, lo, hi))
        accepted = False
        trial = step
        for _ in range(cfg.max_backtracks):
            dYs = [_polar_increment(Y, G, trial) for Y, G in zip(Ys, grads)]
            df, _ = _potential_change(S, Ys, dYs, w2)
            if df <= -cfg.armijo_c * trial * g * g:
                accepted = True
                break
            trial *= cfg.backtrack_factor
        if not accepted:
            if cfg.armijo_c * step * g * g <= 1e3 * eps * max(1.0, f):
                status = "roundoff"
            else:
                status = "line_search_failed"
            break
        it += 1
        prev = (Ys, grads)
        Ys = [_renormalize(Y + dY) for Y, dY in zip(Ys, dYs)]
        f = f + df
        S = _operator(Ys, w2)
        grads = _grads(S, Ys, w2)
        g = gradient_norm(grads)
        history.append((it, f, g))
        if callback is not None:
            callback(it, Ys)
        step = min(trial / cfg.backtrack_factor, hi)

    F = FusionFrame(tuple(orthonormalize(Y) if it else W for Y, W in zip(Ys, start.subspaces)), start.weights)
    p = F.profile
    rep = OptimizerReport(
        frame=F,
        ffp=ffp(F),
        lower_bound=ffp_lower_bound(p),
        iterations=it,
        history=history,
        converged=status in ("converged", "roundoff"),
        status=status,
        grad_norm=g,
        tight_alpha=is_tight(F, 1e-6),
    )
    try:
        rep.structure = structure_report(F, verify_tol)
    except FrameError as exc:
        rep.structure_error = f"{type(exc).__name__}: {exc}"
    return rep


def _threads() -> int:
    env = os.environ.get("FRAMEKIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def restart_seeds(seed: int, restarts: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(restarts)


def multistart(p: DimProfile, cfg: OptimizerConfig | None = None) -> OptimizerReport:
    """Best of ``cfg.restarts`` independent descents from random frames.

    Restarts draw from independent child seeds of ``cfg.seed`` and may run in
    parallel (capped by FRAMEKIT_THREADS); the winner is the lowest final
    potential, ties going to the lowest restart index.
    """
    cfg = cfg or OptimizerConfig()
    if any(L > p.d for L in p.dims):
        raise BadDims(f"subspace dims {p.dims} exceed d={p.d}")

    def run(ss):
        return minimize(random_frame(p, ss, cfg.field), cfg)

    seeds = restart_seeds(cfg.seed, cfg.restarts)
    workers = min(_threads(), cfg.restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, seeds))
    else:
        reports = [run(s) for s in seeds]

    values = [r.ffp for r in reports]
    best = min(range(len(reports)), key=lambda i: (values[i], i))
    out = reports[best]
    out.restart_values = values
    out.best_restart = best
    log.info("multistart: best %.12g from restart %d of %d", out.ffp, best, len(values))
    return out
