"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input or tolerance error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from framekit.core import DimProfile, ffp, ffp_lower_bound, frame_operator, is_tight, random_frame, reconstruct
from framekit.errors import (
    BadDims,
    CriterionDisagreement,
    DimensionDeficit,
    NotTight,
    ParseError,
    ToleranceError,
    VerificationFailed,
)
from framekit.io import dumps, frame_to_json, read_frame, save_frame
from framekit.irregularity import fundamental_inequality, irregularity, minimum_value, sort_order
from framekit.optimizer import OptimizerConfig, minimize, multistart
from framekit.verify import verify

log = logging.getLogger("framekit")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _check_tol(name: str, value: float) -> float:
    if not value > 0:
        raise ToleranceError(f"{name} must be positive, got {value}")
    return value


def _profile(args) -> tuple[DimProfile, list[str]]:
    """Profile from --input, or from --d/--dims/--weights(2)."""
    if getattr(args, "input", None):
        F, warnings = read_frame(args.input)
        return F.profile, warnings
    if args.d is None or args.dims is None:
        raise ParseError("give an input frame or --d and --dims")
    dims = _ints(args.dims)
    if args.weights is not None and args.weights2 is not None:
        raise ParseError("use either --weights or --weights2, not both")
    if args.weights2 is not None:
        w2 = _floats(args.weights2)
    elif args.weights is not None:
        w = _floats(args.weights)
        if any(x <= 0 for x in w):
            raise ParseError("weights must be positive")
        w2 = [x * x for x in w]
    else:
        w2 = [1.0] * len(dims)
    try:
        return DimProfile(args.d, tuple(dims), tuple(w2), args.field), []
    except BadDims as exc:
        raise ParseError(str(exc)) from None


def _echo(p: DimProfile) -> dict:
    return {"d": p.d, "dims": list(p.dims), "weights": list(p.weights), "weights2": list(p.weights2)}


def _need_input(args):
    if not args.input:
        raise ParseError(f"'{args.command}' needs an input frame file")
    return read_frame(args.input)


def cmd_potential(args) -> tuple[dict, int]:
    F, warnings = _need_input(args)
    f, lb = ffp(F), ffp_lower_bound(F.profile)
    return {"ffp": f, "lower_bound": lb, "gap": f - lb, **_echo(F.profile), "warnings": warnings}, 0


def cmd_bound(args) -> tuple[dict, int]:
    p, warnings = _profile(args)
    return {"lower_bound": ffp_lower_bound(p), **_echo(p), "warnings": warnings}, 0


def cmd_tight_check(args) -> tuple[dict, int]:
    F, warnings = _need_input(args)
    tol = _check_tol("--tol", args.tol)
    alpha = is_tight(F, tol)
    S = frame_operator(F)
    a = float(np.trace(S).real) / F.d
    out = {
        "tight": alpha is not None,
        "alpha": alpha,
        "residual": float(np.linalg.norm(S - a * np.eye(F.d))),
        "tol": tol,
        **_echo(F.profile),
        "warnings": warnings,
    }
    return out, 0 if alpha is not None else 1


def _irregularity_report(p: DimProfile) -> dict:
    order = sort_order(p.weights2)
    try:
        res = irregularity(p.d, [p.dims[k] for k in order], [Fraction(p.weights2[k]) for k in order])
    except DimensionDeficit as exc:
        raise ParseError(str(exc)) from None
    return {
        "N0": res.N0,
        "irregularity": res.irregularity,
        "predicate_trace": list(res.predicate_trace),
        "sorted_order": order,
        "fundamental_inequality": fundamental_inequality(p),
        "min_value": minimum_value(p),
        "lower_bound": ffp_lower_bound(p),
    }


def cmd_irregularity(args) -> tuple[dict, int]:
    p, warnings = _profile(args)
    return {**_irregularity_report(p), **_echo(p), "warnings": warnings}, 0


def cmd_min_value(args) -> tuple[dict, int]:
    p, warnings = _profile(args)
    rep = _irregularity_report(p)
    keep = ("min_value", "N0", "lower_bound", "fundamental_inequality")
    return {**{k: rep[k] for k in keep}, **_echo(p), "warnings": warnings}, 0


def _config(args) -> OptimizerConfig:
    opts = {}
    if args.config:
        try:
            opts = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config: {exc}") from None
        if not isinstance(opts, dict):
            raise ParseError("config must be a JSON object")
    for name in ("max_iters", "grad_tol", "initial_step", "restarts", "seed"):
        value = getattr(args, name)
        if value is not None:
            opts[name] = value
    if args.field is not None:
        opts["field"] = args.field
    try:
        return OptimizerConfig.from_json(opts)
    except (TypeError, ValueError) as exc:
        raise ToleranceError(f"bad optimizer configuration: {exc}") from None


def cmd_minimize(args) -> tuple[dict, int]:
    cfg = _config(args)
    if args.input:
        F, warnings = read_frame(args.input)
        rep = minimize(F, cfg)
    else:
        p, warnings = _profile(args)
        try:
            rep = multistart(p, cfg)
        except BadDims as exc:
            raise ParseError(str(exc)) from None
    p = rep.frame.profile
    out = rep.to_json()
    out.update(_echo(p))
    out["config"] = cfg.to_json()
    out["warnings"] = warnings
    try:
        out["min_value"] = minimum_value(p)
    except DimensionDeficit:
        out["min_value"] = None
    out["fundamental_inequality"] = fundamental_inequality(p)
    if args.frame_out:
        save_frame(rep.frame, args.frame_out)
    return out, 0


def cmd_verify(args) -> tuple[dict, int]:
    F, warnings = _need_input(args)
    tol = _check_tol("--tol", args.tol)
    cluster_tol = _check_tol("--cluster-tol", args.cluster_tol)
    try:
        res = verify(F, tol, cluster_tol)
    except CriterionDisagreement as exc:
        raise ToleranceError(str(exc)) from None
    out = {**res.to_json(), **_echo(F.profile), "warnings": warnings}
    if not res.passed:
        log.error("verification failed at %s: %s", res.first_failure, res.message)
    return out, 0 if res.passed else 1


def cmd_random(args) -> tuple[dict, int]:
    args.input = None
    p, _ = _profile(args)
    try:
        F = random_frame(p, args.seed, args.field)
    except BadDims as exc:
        raise ParseError(str(exc)) from None
    return frame_to_json(F), 0


def cmd_reconstruct_demo(args) -> tuple[dict, int]:
    F, warnings = _need_input(args)
    tol = _check_tol("--tol", args.tol)
    rng = np.random.default_rng(args.seed)
    f = rng.standard_normal(F.d)
    if F.field == "complex":
        f = f + 1j * rng.standard_normal(F.d)
    alpha = is_tight(F, tol)
    if alpha is None:
        raise VerificationFailed("tight", "frame is not tight; the reconstruction formula does not apply")
    try:
        g = reconstruct(F, alpha, f, tol)
    except NotTight as exc:
        raise VerificationFailed("tight", str(exc)) from None
    err = float(np.linalg.norm(g - f) / np.linalg.norm(f))
    ok = err <= 1e-9
    out = {"alpha": alpha, "relative_error": err, "passed": ok, **_echo(F.profile), "warnings": warnings}
    return out, 0 if ok else 1


COMMANDS = {
    "potential": (cmd_potential, "potential tr(S^2) of a frame, with the lower bound"),
    "bound": (cmd_bound, "lower bound (sum w^2 L)^2 / d for a profile"),
    "tight-check": (cmd_tight_check, "is the frame operator a multiple of I? (exit 1 if not)"),
    "irregularity": (cmd_irregularity, "irregularity index, fundamental inequality, minimum value"),
    "min-value": (cmd_min_value, "closed-form minimum of the potential for a profile"),
    "minimize": (cmd_minimize, "minimize the potential (multistart from a profile or from a frame)"),
    "verify": (cmd_verify, "run all structure checks; exit 1 at the first failing clause"),
    "random": (cmd_random, "random frame with a given profile"),
    "reconstruct-demo": (cmd_reconstruct_demo, "reconstruct a random vector with a tight frame"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="framekit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        if name != "random":
            p.add_argument("input", nargs="?", help="fusion frame JSON file")
        p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
        if name in ("bound", "irregularity", "min-value", "minimize", "random"):
            p.add_argument("--d", type=int)
            p.add_argument("--dims", help="comma-separated subspace dimensions")
            p.add_argument("--weights", help="comma-separated weights w_k")
            p.add_argument("--weights2", help="comma-separated squared weights w_k^2")
        if name in ("tight-check", "verify", "reconstruct-demo"):
            p.add_argument("--tol", type=float, default=1e-8)
        if name == "verify":
            p.add_argument("--cluster-tol", type=float, default=1e-8)
        if name in ("minimize", "random", "reconstruct-demo"):
            p.add_argument("--seed", type=int, default=None if name == "minimize" else 0)
        if name in ("bound", "irregularity", "min-value", "random"):
            p.add_argument("--field", choices=("real", "complex"), default="real")
        if name == "minimize":
            p.add_argument("--field", choices=("real", "complex"), default=None)
            p.add_argument("--restarts", type=int)
            p.add_argument("--max-iters", dest="max_iters", type=int)
            p.add_argument("--grad-tol", dest="grad_tol", type=float)
            p.add_argument("--initial-step", dest="initial_step", type=float)
            p.add_argument("--config", help="optimizer options as a JSON object")
            p.add_argument("--frame-out", help="also save the final frame here")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "minimize" and args.field is None and not args.input:
        args.field = "real"
    handler = COMMANDS[args.command][0]
    try:
        report, code = handler(args)
    except (ParseError, ToleranceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        report, code = {"passed": False, "first_failure": exc.clause, "message": str(exc)}, 1

    text = dumps(report)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
