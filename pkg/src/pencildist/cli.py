"""Command-line front end.

Pencil files are JSON:

    {"n": 3, "m": 3,
     "A_re": [[...]], "A_im": [[...]],
     "B_re": [[...]], "B_im": [[...]]}

with row-major n x m arrays. Results are written as deterministic JSON
(fixed field order, no timestamps); pseudospectrum grids as CSV with header
"re,im,sigma_min".

Exit codes: 0 success, 1 internal failure, 2 ill-posed or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import numlin
from .distance import (
    BoxRegion,
    DistanceQuery,
    FiniteSet,
    LeftHalfPlane,
    WholePlane,
    compute_distance,
)
from .exceptions import ContractViolationError, IllPosedError
from .optimize import BfgsConfig, Box, DirectConfig
from .pencil import MatrixPencil
from .pseudospectra import GridSpec, compute_grid, write_csv

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2


class PencilFileError(ValueError):
    pass


def _field_array(payload: dict, key: str, n: int, m: int) -> np.ndarray:
    if key not in payload:
        raise PencilFileError(f"missing field '{key}'")
    arr = np.asarray(payload[key], dtype=float)
    if arr.shape != (n, m):
        raise PencilFileError(f"field '{key}' has shape {arr.shape}, expected ({n}, {m})")
    if not np.all(np.isfinite(arr)):
        raise PencilFileError(f"field '{key}' contains non-finite entries")
    return arr


def parse_pencil(path) -> MatrixPencil:
    """Read and validate a pencil JSON file."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise PencilFileError(f"pencil file not found: {path}")
    except json.JSONDecodeError as exc:
        raise PencilFileError(f"malformed JSON in {path}: {exc}")
    for key in ("n", "m"):
        if key not in payload or not isinstance(payload[key], int):
            raise PencilFileError(f"missing or non-integer field '{key}'")
    n, m = payload["n"], payload["m"]
    A = _field_array(payload, "A_re", n, m) + 1j * _field_array(payload, "A_im", n, m)
    B = _field_array(payload, "B_re", n, m) + 1j * _field_array(payload, "B_im", n, m)
    try:
        return MatrixPencil(A, B)
    except ContractViolationError as exc:
        raise PencilFileError(str(exc))


def write_pencil(pencil: MatrixPencil, path) -> None:
    payload = {
        "n": pencil.n,
        "m": pencil.m,
        "A_re": pencil.A.real.tolist(),
        "A_im": pencil.A.imag.tolist(),
        "B_re": pencil.B.real.tolist(),
        "B_im": pencil.B.imag.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def parse_complex_list(text: str) -> list[complex]:
    """Parse 'a+bi,c-di,...' into complex numbers; accepts i or j suffix."""
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace("i", "j")
        if not tok:
            continue
        try:
            out.append(complex(tok))
        except ValueError:
            raise ContractViolationError(f"cannot parse complex number '{tok}'")
    if not out:
        raise ContractViolationError("empty target list")
    return out


def _matrix_payload(M: np.ndarray) -> dict:
    return {"re": M.real.tolist(), "im": M.imag.tolist()}


def _result_payload(result) -> dict:
    return {
        "tau": float(result.tau),
        "mu_star_re": [z.real for z in result.mu_star],
        "mu_star_im": [z.imag for z in result.mu_star],
        "gamma_star_re": [z.real for z in result.gamma_star],
        "gamma_star_im": [z.imag for z in result.gamma_star],
        "delta_A": _matrix_payload(result.delta_A),
        "kappa": float(result.kappa),
        "mult_ok": bool(result.mult_ok),
        "li_ok": bool(result.li_ok),
        "verification": {
            "all_ok": bool(result.verification.all_ok),
            "rank_defect_ok": bool(result.verification.rank_defect_ok),
            "region_ok": bool(result.verification.region_ok),
            "eigenvalue_matches": [
                {
                    "target_re": t.real,
                    "target_im": t.imag,
                    "achieved_re": a.real,
                    "achieved_im": a.imag,
                    "residual": res,
                }
                for t, a, res in result.verification.eigenvalue_matches
            ],
        },
        "diagnostics": {k: _json_safe(v) for k, v in sorted(result.diagnostics.items())},
    }


def _json_safe(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _parse_box(text: str) -> Box:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ContractViolationError("--box expects re0,re1,im0,im1")
    re0, re1, im0, im1 = parts
    return Box(np.array([re0, im0]), np.array([re1, im1]))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pencildist",
        description="Distance from a matrix pencil to the nearest pencil with prescribed eigenvalues.",
    )
    p.add_argument("--pencil", required=True, help="path to a pencil JSON file")
    p.add_argument(
        "--mode",
        required=True,
        choices=["set", "region-box", "region-lhp", "complete", "pseudospectra"],
    )
    p.add_argument("--r", type=int, default=1, help="number of prescribed eigenvalues")
    p.add_argument("--targets", help="comma-separated complex targets for mode=set, e.g. '5,1' or '0.7-1i'")
    p.add_argument("--box", help="search/region box as re0,re1,im0,im1")
    p.add_argument("--grid", help="pseudospectra resolution as NX,NY", default="200,200")
    p.add_argument("--max-evals", type=int, default=2000, help="outer DIRECT evaluation budget")
    p.add_argument("--tol", type=float, default=1e-6, help="verification tolerance")
    p.add_argument("--no-polish", action="store_true", help="skip local refinement after DIRECT")
    p.add_argument("--out", required=True, help="output path (JSON result or CSV grid)")
    return p


def run_pseudospectra(pencil: MatrixPencil, args) -> int:
    if args.box is None:
        raise ContractViolationError("mode=pseudospectra requires --box")
    nx, ny = (int(t) for t in args.grid.split(","))
    spec = GridSpec(box=_parse_box(args.box), nx=nx, ny=ny)
    grid = compute_grid(pencil, spec)
    write_csv(grid, args.out)
    return EXIT_OK


def run_job(pencil: MatrixPencil, args) -> int:
    if args.mode == "set":
        if not args.targets:
            raise ContractViolationError("mode=set requires --targets")
        region = FiniteSet(tuple(parse_complex_list(args.targets)))
    elif args.mode == "region-box":
        if args.box is None:
            raise ContractViolationError("mode=region-box requires --box")
        region = BoxRegion(_parse_box(args.box))
    elif args.mode == "region-lhp":
        if args.box is None:
            raise ContractViolationError("mode=region-lhp requires --box")
        region = LeftHalfPlane(_parse_box(args.box))
    else:
        region = WholePlane(_parse_box(args.box) if args.box else None)

    query = DistanceQuery(
        pencil=pencil,
        r=args.r,
        region=region,
        outer_cfg=DirectConfig(max_evals=args.max_evals),
        verification_tol=args.tol,
        polish=not args.no_polish,
    )
    result = compute_distance(query)
    with open(args.out, "w") as fh:
        json.dump(_result_payload(result), fh, indent=1)
        fh.write("\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pencil = parse_pencil(args.pencil)
        if args.mode == "pseudospectra":
            return run_pseudospectra(pencil, args)
        return run_job(pencil, args)
    except (PencilFileError, ContractViolationError, IllPosedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
