"""Command-line front end.

Subcommands: realize, ring, verify, bmat, spectrum.  Every command reads
JSON, writes one JSON document (stdout by default), and exits with

    0   success
    1   input problem (unreadable file, bad schema, zero weight, bad index)
    2   numeric failure (no convergence, singular system, failed check)
    3   theory-precondition refusal (even-cell ring degeneracy)

Identical inputs produce byte-identical output; all tolerances and budgets
come from the problem file's "config" block unless overridden by flags.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dn_ring, realization, spectrum
from .errors import (
    BadIndex,
    BadParity,
    BoundaryRoot,
    BudgetExceeded,
    LeftDomain,
    NoConvergence,
    SearchExhausted,
    SingularB,
    SingularIB,
    SingularJacobian,
    TooManyRoots,
    ZeroAmplitude,
    ZeroWeight,
)
from .quasipoly import factor_from_dict
from .realization import FrequencyTarget, RealizationResult, RealizeConfig, WeightTable

SCHEMA = "spectra-forge/1"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_REFUSED = 3

_INPUT_ERRORS = (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError,
                 ZeroWeight, BadIndex, BadParity)
_NUMERIC_ERRORS = (SingularIB, ZeroAmplitude, SearchExhausted, NoConvergence,
                   LeftDomain, SingularJacobian, SingularB, BoundaryRoot,
                   TooManyRoots, BudgetExceeded)


class _Refusal(Exception):
    def __init__(self, payload: dict):
        self.payload = payload


def _dump(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _load(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a JSON object")
    schema = data.get("schema")
    if schema is not None and schema != SCHEMA:
        raise ValueError(f"{path}: unsupported schema {schema!r}, expected {SCHEMA!r}")
    return data


def _error_payload(exc: Exception) -> dict:
    return {"schema": SCHEMA, "error": {"type": type(exc).__name__, "message": str(exc)}}


def _config_from(problem: dict, args) -> RealizeConfig:
    # solver keys may sit inside the payload (flat form), in the config
    # block, or on the command line; later sources win
    merged: dict = {}
    payload = problem.get("payload")
    if isinstance(payload, dict):
        for key in ("tol", "epsilon_schedule", "budget", "seed"):
            if key in payload:
                merged[key] = payload[key]
    merged.update(problem.get("config") or {})
    if getattr(args, "tol", None) is not None:
        merged["tol"] = args.tol
    if getattr(args, "seed", None) is not None:
        merged["seed"] = args.seed
    return RealizeConfig.from_dict(merged)


def _problem_target_weights(problem: dict):
    """(target, weights, extras) for a scalar/multifactor/ring problem."""
    mode = problem.get("mode")
    payload = problem.get("payload")
    if not isinstance(payload, dict):
        raise ValueError("problem file needs a 'payload' object")
    if mode == "scalar":
        omegas = payload["omegas"]
        target = FrequencyTarget((tuple(omegas),))
        return target, WeightTable.ones(target.n), {}
    if mode == "multifactor":
        target = FrequencyTarget(tuple(tuple(g) for g in payload["groups"]))
        weights = WeightTable(np.array(payload["weights"], dtype=float))
        if weights.b.shape != (target.r, target.n):
            raise ValueError(
                f"weights shape {weights.b.shape} does not match "
                f"{target.r} groups of {target.n} total frequencies"
            )
        return target, weights, {}
    if mode == "ring":
        n = int(payload["n"])
        indices = tuple(int(i) for i in payload["indices"])
        groups = tuple(tuple(g) for g in payload["groups"])
        layout = payload.get("layout") or {}
        target = FrequencyTarget(groups)
        sizes = target.sizes
        roles = dn_ring._layout_roles(n, dn_ring._check_indices(n, indices), sizes, layout)
        rows = [
            [1.0 if d == 0 else dn_ring._cos_weight(n, d * i) for d in roles]
            for i in indices
        ]
        weights = WeightTable(np.array(rows))
        return target, weights, {"n": n, "indices": indices, "layout": layout}
    raise ValueError(f"unknown problem mode {mode!r}; expected scalar, multifactor, or ring")


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_realize(args) -> tuple[int, dict]:
    problem = _load(args.input)
    target, weights, _ = _problem_target_weights(problem)
    config = _config_from(problem, args)
    result = realization.realize(target, weights, config)
    return EXIT_OK, {
        "schema": SCHEMA,
        "mode": problem.get("mode"),
        "config": config.to_dict(),
        "result": result.to_dict(),
    }


def _cmd_ring(args) -> tuple[int, dict]:
    problem = _load(args.input)
    payload = problem.get("payload")
    if not isinstance(payload, dict):
        raise ValueError("problem file needs a 'payload' object")
    n = int(payload["n"])
    if n % 2 == 0:
        degeneracies = dn_ring.detect_even_degeneracy(n)
        raise _Refusal(
            {
                "schema": SCHEMA,
                "error": {
                    "type": "EvenDegeneracy",
                    "message": f"ring with {n} cells has vanishing factor weights",
                    "degeneracies": [list(d) for d in degeneracies],
                },
            }
        )
    indices = tuple(int(i) for i in payload["indices"])
    groups = tuple(tuple(g) for g in payload["groups"])
    layout = payload.get("layout") or {}
    config = _config_from(problem, args)
    ring, result = dn_ring.realize_ring(n, indices, groups, layout, config)
    return EXIT_OK, {
        "schema": SCHEMA,
        "mode": "ring",
        "config": config.to_dict(),
        "ring": dn_ring.ring_to_dict(ring),
        "result": result.to_dict(),
    }


def _cmd_verify(args) -> tuple[int, dict]:
    result_doc = _load(args.result)
    problem = _load(args.input)
    target, weights, _ = _problem_target_weights(problem)
    result_dict = result_doc.get("result", result_doc)
    result = RealizationResult.from_dict(result_dict)
    if len(result.taus) != target.n:
        raise ValueError(
            f"result has {len(result.taus)} delays but the problem "
            f"prescribes {target.n} frequencies"
        )
    tol = args.tol if args.tol is not None else RealizeConfig.from_dict(problem.get("config")).tol
    report = spectrum.verify_realization(result, target, weights, tol=tol)
    payload = {"schema": SCHEMA, "tol": tol, "report": report.to_dict()}
    return (EXIT_OK if report.passed else EXIT_NUMERIC), payload


def _cmd_bmat(args) -> tuple[int, dict]:
    indices = tuple(int(tok) for tok in args.indices.split(",") if tok != "")
    mat = dn_ring.build_B(args.n, indices, convention=args.convention)
    det = float(np.linalg.det(mat))
    hadamard = float(np.prod(np.linalg.norm(mat, axis=0)))
    singular = abs(det) <= 1e-9 * max(hadamard, 1e-300)
    return EXIT_OK, {
        "schema": SCHEMA,
        "n": args.n,
        "indices": list(indices),
        "convention": args.convention,
        "matrix": mat.tolist(),
        "det": det,
        "singular": singular,
    }


def _parse_interval(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"{flag} expects two comma-separated numbers, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    return lo, hi


def _cmd_spectrum(args) -> tuple[int, dict]:
    doc = _load(args.input)
    factor_dict = doc.get("factor", doc)
    factor = factor_from_dict(factor_dict)
    re_lo, re_hi = _parse_interval(args.re, "--re")
    im_lo, im_hi = _parse_interval(args.im, "--im")
    region = spectrum.Region(re_lo, re_hi, im_lo, im_hi)
    count = spectrum.count_roots(factor, region)
    roots = spectrum.locate_roots(factor, region, max_roots=args.max_roots)
    return EXIT_OK, {
        "schema": SCHEMA,
        "region": region.to_dict(),
        "count": count,
        "roots": [{"re": z.real, "im": z.imag} for z in roots],
    }


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectra-forge",
        description="Construct and verify delay equations with prescribed imaginary eigenvalues",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="problem file (JSON)")
        p.add_argument("--output", default="-", help="output path, '-' for stdout")

    p = sub.add_parser("realize", help="realize scalar or multifactor targets")
    io_flags(p)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("ring", help="realize targets inside an odd symmetric ring")
    io_flags(p)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("verify", help="verify a realization result file")
    p.add_argument("--result", required=True, help="realization result file (JSON)")
    io_flags(p)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("bmat", help="reduced leading-weight matrix for odd rings")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--indices", required=True, help="comma-separated factor indices")
    p.add_argument("--convention", type=float, default=4.0)
    p.add_argument("--output", default="-")

    p = sub.add_parser("spectrum", help="count and locate roots in a rectangle")
    io_flags(p)
    p.add_argument("--re", required=True, help="real-axis interval a,b")
    p.add_argument("--im", required=True, help="imaginary-axis interval c,d")
    p.add_argument("--max-roots", type=int, default=64)

    return parser


_COMMANDS = {
    "realize": _cmd_realize,
    "ring": _cmd_ring,
    "verify": _cmd_verify,
    "bmat": _cmd_bmat,
    "spectrum": _cmd_spectrum,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    output = getattr(args, "output", "-")
    try:
        code, payload = _COMMANDS[args.command](args)
    except _Refusal as refusal:
        _dump(refusal.payload, output)
        return EXIT_REFUSED
    except _NUMERIC_ERRORS as exc:
        _dump(_error_payload(exc), output)
        return EXIT_NUMERIC
    except _INPUT_ERRORS as exc:
        _dump(_error_payload(exc), output)
        return EXIT_INPUT
    _dump(payload, output)
    return code


if __name__ == "__main__":
    sys.exit(main())
