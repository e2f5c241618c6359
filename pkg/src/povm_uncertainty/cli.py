"""Command-line front end.

Exit codes: 0 success, 1 domain or validation failure, 2 unparseable input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, catalog, scan
from .entropy import (
    bound_max_eigenvalue,
    bound_pair_naimark,
    bound_pair_rank1,
    bound_pvm_mixture,
    bound_single_naimark,
    min_entropy_over_states,
)
from .errors import DimensionError, DomainError, NumericError
from .io import SCHEMA_VERSION, DocumentError, dumps, loads_document, parse_matrix, parse_vector, povm_to_document
from .linalg import VALIDATION_TOL
from .naimark import align, extend
from .optimize import OptimizerConfig
from .povm import QuantumState, ValuedPovm, validate
from .uncertainty import property_report, uncertainty_operator, variance

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 1, 2


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def _load(path: str):
    return loads_document(_read_text(path))


def _parse_state(text: str | None, dim: int) -> QuantumState | None:
    if text is None:
        return None
    if not text.lstrip().startswith(("[", "{")):
        text = _read_text(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"--state is not valid JSON: {exc}") from exc
    if isinstance(obj, dict) and "bloch" in obj:
        st = QuantumState.from_bloch(obj["bloch"])
    else:
        arr = np.asarray(obj, dtype=object)
        if arr.ndim == 2:
            st = QuantumState.pure(parse_vector(obj, "--state"))
        elif arr.ndim == 3:
            st = QuantumState.mixed(parse_matrix(obj, "--state"))
        else:
            raise DocumentError("--state must be a vector or matrix of [re, im] pairs, or {\"bloch\": [x, y, z]}")
    if st.dim != dim:
        raise DimensionError(f"state dim {st.dim} does not match POVM dim {dim}")
    return st


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(seed=args.seed, starts=args.starts)


def _report(command: str, inputs: dict, results: dict, settings: dict) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "results": results,
        "settings": settings,
        "versions": {"artifact": __version__, "schema": SCHEMA_VERSION},
    }


def _emit(report: dict) -> None:
    sys.stdout.write(dumps(report))


def cmd_validate(args) -> int:
    povm, values, _ = _load(args.file)
    rep = validate(povm, args.tol)
    _emit(_report("validate", {"file": args.file}, rep.to_dict(), {"tol": args.tol}))
    return EXIT_OK if rep.ok else EXIT_DOMAIN


def _valued(povm, values: dict, name: str | None) -> tuple[ValuedPovm, str]:
    if not values:
        raise DomainError("document has no value maps")
    key = name or next(iter(values))
    if key not in values:
        raise DomainError(f"unknown value map {key!r}; available: {', '.join(values)}")
    return ValuedPovm(povm, values[key]), key


def _require_valid(povm, tol):
    rep = validate(povm, tol)
    if not rep.ok:
        raise DomainError("invalid POVM: " + ", ".join(c.name for c in rep.failures()))


def cmd_analyze(args) -> int:
    povm, values, _ = _load(args.file)
    _require_valid(povm, args.tol)
    vp, key = _valued(povm, values, args.values)
    state = _parse_state(args.state, povm.dim)
    results = {
        "uncertainty": uncertainty_operator(vp).to_dict(),
        "properties": property_report(vp, args.tol).to_dict(),
    }
    if state is not None:
        results["variance"] = variance(vp, state).to_dict()
    inputs = {"file": args.file, "values": key, "state": args.state}
    _emit(_report("analyze", inputs, results, {"tol": args.tol}))
    return EXIT_OK


def cmd_entropy(args) -> int:
    povm, _, _ = _load(args.file)
    _require_valid(povm, args.tol)
    config = _config(args)
    other = None
    if args.bound in ("pair", "naimark", "mixture"):
        if args.with_file is None:
            raise DomainError(f"--bound {args.bound} needs a second POVM via --with")
        other, _, _ = _load(args.with_file)
        _require_valid(other, args.tol)
    if args.bound == "hm1":
        rep = bound_max_eigenvalue(povm)
    elif args.bound == "pair":
        rep = bound_pair_rank1(povm, other, args.convention)
    elif args.bound == "naimark":
        rep = bound_pair_naimark(povm, other, args.convention, config)
    elif args.bound == "single":
        rep = bound_single_naimark(povm, args.convention, config)
    else:
        rep = bound_pvm_mixture(povm, other)
    results = {"bound": rep.to_dict()}
    if args.minimize_states:
        state, h = min_entropy_over_states(povm, config)
        results["min_entropy"] = {"value_bits": h, "state": state}
    inputs = {"file": args.file, "with": args.with_file, "bound": args.bound}
    settings = {"tol": args.tol, "convention": args.convention, "seed": args.seed, "starts": args.starts}
    _emit(_report("entropy", inputs, results, settings))
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.family not in scan.FAMILIES:
        raise DomainError(f"unknown family {args.family!r}; known: {', '.join(scan.FAMILIES)}")
    if args.param not in scan.FAMILIES[args.family]:
        raise DomainError(f"family {args.family} has no parameter {args.param!r}")
    if args.steps < 1:
        raise DomainError("--steps must be at least 1")
    rows = scan.scan_mzx(args.start, args.stop, args.steps, _config(args))
    text = scan.format_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    inputs = {"family": args.family, "param": args.param, "from": args.start, "to": args.stop,
              "steps": args.steps, "csv": args.csv}
    settings = {"seed": args.seed, "starts": args.starts, "convention": 2}
    _emit(_report("scan", inputs, {"rows": rows}, settings))
    return EXIT_OK


def cmd_naimark(args) -> int:
    povm, _, doc = _load(args.file)
    _require_valid(povm, args.tol)
    ext = extend(povm)
    results = {
        "system_dim": ext.system_dim,
        "ext_dim": ext.ext_dim,
        "labels": list(ext.labels),
        "basis": [row for row in ext.basis],
        "orthonormality_residual": ext.orthonormality_residual(),
        "restriction_residual": ext.restriction_residual(povm),
    }
    meta = doc.get("catalog")
    if isinstance(meta, dict) and meta.get("name") in catalog.names():
        item = catalog.build(meta["name"], **meta.get("parameters", {}))
        if item.reference_extension is not None:
            a = align(item.reference_extension, ext)
            results["reference_alignment"] = {
                "catalog_entry": meta["name"],
                "residual": a.residual,
                "ancilla_unitary": a.ancilla_unitary,
                "phases": a.phases,
            }
    _emit(_report("naimark", {"file": args.file}, results, {"tol": args.tol}))
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        entries = [{"name": n, "parameters": list(catalog.parameters(n))} for n in catalog.names()]
        _emit(_report("catalog list", {}, {"entries": entries}, {}))
        return EXIT_OK
    if args.name is None:
        raise DomainError("catalog dump needs an entry name")
    item = catalog.build(args.name, theta=args.theta)
    sys.stdout.write(dumps(povm_to_document(item.povm, item.values, item.meta())))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="povm-uncertainty", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, optimizer=False):
        p.add_argument("--tol", type=float, default=VALIDATION_TOL)
        if optimizer:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--starts", type=int, default=32)

    p = sub.add_parser("validate", help="check positivity and completeness of a POVM document")
    p.add_argument("file", help="POVM JSON document, or - for stdin")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="uncertainty operator, properties and variance")
    p.add_argument("file")
    p.add_argument("--values", help="name of the value map to use (default: first)")
    p.add_argument("--state", help="JSON state: vector or matrix of [re, im] pairs, or {\"bloch\": [x, y, z]}")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("entropy", help="entropic lower bounds")
    p.add_argument("file")
    p.add_argument("--bound", choices=["hm1", "pair", "naimark", "single", "mixture"], default="hm1")
    p.add_argument("--with", dest="with_file", help="second POVM document for pair, naimark and mixture bounds")
    p.add_argument("--convention", type=int, choices=[1, 2], default=2)
    p.add_argument("--minimize-states", action="store_true")
    common(p, optimizer=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("scan", help="scan a catalog family and write a CSV table")
    p.add_argument("--family", default="mzx")
    p.add_argument("--param", default="theta")
    p.add_argument("--from", dest="start", type=float, default=0.0)
    p.add_argument("--to", dest="stop", type=float, default=math.pi / 4)
    p.add_argument("--steps", type=int, default=9)
    p.add_argument("--csv", help="path of the CSV table to write")
    common(p, optimizer=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("naimark", help="minimal Naimark extension of a POVM document")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_naimark)

    p = sub.add_parser("catalog", help="list or dump built-in measurements")
    p.add_argument("action", choices=["list", "dump"])
    p.add_argument("name", nargs="?")
    p.add_argument("--theta", type=float, help="angle in radians (mzx)")
    p.set_defaults(func=cmd_catalog)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, DimensionError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
