"""JSON reading and writing of fusion frames.

File layout::

    {"field": "real" | "complex", "d": int,
     "members": [{"weight": float, "basis": [[...row-major...]]}]}

Complex entries are written as [re, im] pairs. Bases are orthonormalized on
load unless they are orthonormal already (which keeps round trips exact).
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from framekit.core import ORTHONORMAL_TOL, FusionFrame, Subspace, orthonormalize
from framekit.errors import FrameError, ParseError

log = logging.getLogger(__name__)

SPAN_TOL = 1e-8


def _encode_matrix(M: np.ndarray, field: str) -> list:
    if field == "complex":
        return [[[float(z.real), float(z.imag)] for z in row] for row in M]
    return [[float(x) for x in row] for row in np.real(M)]


def _decode_matrix(rows, field: str, d: int) -> np.ndarray:
    try:
        if field == "complex":
            a = np.asarray(rows, dtype=float)
            if a.ndim != 3 or a.shape[2] != 2:
                raise ParseError("complex basis entries must be [re, im] pairs")
            M = a[..., 0] + 1j * a[..., 1]
        else:
            M = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed basis: {exc}") from None
    if M.ndim != 2 or M.shape[0] != d:
        raise ParseError(f"basis must have {d} rows, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ParseError("basis contains non-finite entries")
    return M


def frame_to_json(F: FusionFrame) -> dict:
    field = F.field
    return {
        "field": field,
        "d": F.d,
        "members": [{"weight": float(w), "basis": _encode_matrix(W.basis, field)} for W, w in F.members],
    }


def frame_from_json(obj) -> tuple[FusionFrame, list[str]]:
    """Parse a frame, returning it with a list of warnings."""
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    field = obj.get("field", "real")
    if field not in ("real", "complex"):
        raise ParseError(f"field must be 'real' or 'complex', got {field!r}")
    d = obj.get("d")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParseError("'d' must be a positive integer")
    members = obj.get("members")
    if not isinstance(members, list) or not members:
        raise ParseError("'members' must be a non-empty list")

    warnings: list[str] = []
    subs, weights = [], []
    for k, m in enumerate(members):
        if not isinstance(m, dict) or "weight" not in m or "basis" not in m:
            raise ParseError(f"member {k} needs 'weight' and 'basis'")
        w = m["weight"]
        if not isinstance(w, (int, float)) or isinstance(w, bool) or not w > 0 or not np.isfinite(w):
            raise ParseError(f"member {k}: weight must be a positive number")
        raw = _decode_matrix(m["basis"], field, d)
        L = raw.shape[1]
        if L < 1 or L > d:
            raise ParseError(f"member {k}: basis must have between 1 and {d} columns")
        gram_err = np.max(np.abs(raw.conj().T @ raw - np.eye(L)))
        if gram_err <= ORTHONORMAL_TOL:
            W = Subspace(raw)
        else:
            try:
                W = orthonormalize(raw)
            except FrameError as exc:
                raise ParseError(f"member {k}: {exc}") from None
            lsq = raw @ np.linalg.lstsq(raw, np.eye(d), rcond=None)[0]
            drift = float(np.linalg.norm(W.projection - lsq))
            msg = f"member {k}: basis re-orthonormalized"
            if drift > SPAN_TOL:
                msg += f"; span check differs by {drift:.3e} (ill-conditioned input)"
            warnings.append(msg)
        subs.append(W)
        weights.append(float(w))
    for msg in warnings:
        log.warning(msg)
    return FusionFrame(tuple(subs), np.asarray(weights)), warnings


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_frame(path) -> FusionFrame:
    return read_frame(path)[0]


def read_frame(path) -> tuple[FusionFrame, list[str]]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return frame_from_json(obj)


def save_frame(F: FusionFrame, path) -> None:
    Path(path).write_text(dumps(frame_to_json(F)), encoding="utf-8")
