"""Command-line front end.

Subcommands: intercepts, gk, wyner, trace, slice, rate-bound, oracle,
catalog.  Inputs come either from the built-in catalog (``--catalog NAME``
with entry parameters) or from a JSON file (``--file PATH``).  All runs are
seeded (default 0) and identical command lines produce byte-identical
output files.

Exit codes: 0 success, 2 invalid input, 3 refusal (a bound whose soundness
cannot be established), 4 results carry a non-convergence flag.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .catalog import catalog_names, catalog_region, from_file, get_entry
from .derived import wyner_common_information
from .errors import BudgetExceededError, RefusalError, TensionkitError, ValidationError
from .optimize import (
    DirectionWeights,
    OptimizerConfig,
    fibonacci_directions,
    slice_z,
    trace_region,
)
from .oracle import GridSpec, brute_force_slice_min, brute_force_support
from .prob import joint_to_dict, mutual_information
from .ratebound import rate_upper_bound
from .structure import gk_common_information, intercepts_exact, is_perfectly_resolvable

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_REFUSAL = 3
EXIT_FLAGGED = 4


def _fmt(v: float) -> str:
    """CSV numbers: 12 significant digits, '.' decimal, no locale."""
    return format(float(v), ".12g")


def _json_default(o):
    raise TypeError(f"not serializable: {o!r}")


def _dump_json(obj, path: str) -> None:
    # allow_nan=False enforces the no-NaN output invariant; infinities are
    # mapped to the explicit "inf" token before serialization
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_json_default)
    _write(text + "\n", path)


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _finite(v: float):
    if math.isnan(v):
        raise ValidationError("refusing to serialize NaN")
    if math.isinf(v):
        return "inf"
    return float(v)


# ---------------------------------------------------------------------------
# input plumbing
# ---------------------------------------------------------------------------


def _add_input_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--catalog", help=f"catalog entry ({', '.join(catalog_names())})")
    sp.add_argument("--file", help="joint distribution JSON file")
    sp.add_argument("--L", type=int, help="string length (string-ot)")
    sp.add_argument("--p", type=float, help="edge mass (z-source)")
    sp.add_argument("--delta", type=float, help="cross-block mass (connected)")
    sp.add_argument("--k", type=int, help="common alphabet size (uniform-common)")
    sp.add_argument("--x-extra", type=int, help="private x alphabet size (uniform-common)")
    sp.add_argument("--y-extra", type=int, help="private y alphabet size (uniform-common)")


def _entry_from_args(args) -> "CatalogEntry":
    if bool(args.catalog) == bool(args.file):
        raise ValidationError("exactly one of --catalog or --file is required")
    if args.file:
        return from_file(args.file)
    params = {}
    for key, attr in (("L", "L"), ("p", "p"), ("delta", "delta"), ("k", "k")):
        v = getattr(args, attr)
        if v is not None:
            params[key] = v
    if args.x_extra is not None:
        params["x_extra"] = args.x_extra
    if args.y_extra is not None:
        params["y_extra"] = args.y_extra
    return get_entry(args.catalog, **params)


def _entry_from_spec(spec: str) -> "CatalogEntry":
    """Parse 'name', 'name:key=value,key=value' or 'file:path'."""
    if spec.startswith("file:"):
        return from_file(spec[len("file:") :])
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ValidationError(f"malformed parameter {item!r} in spec {spec!r}")
            params[key] = int(value) if key in ("L", "k", "x_extra", "y_extra") else float(value)
    return get_entry(name, **params)


def _add_optimizer_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    sp.add_argument("--q-cardinality", type=int, default=None)
    sp.add_argument("--restarts", type=int, default=32)
    sp.add_argument("--max-iterations", type=int, default=2000)
    sp.add_argument("--workers", type=int, default=1,
                    help="parallel workers (output is independent of this)")


def _cfg_from_args(args) -> OptimizerConfig:
    return OptimizerConfig(
        q_cardinality=args.q_cardinality,
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        seed=args.seed,
    )


def _input_descriptor(args) -> dict:
    if args.file:
        return {"file": args.file}
    entry = {"catalog": args.catalog}
    for key in ("L", "p", "delta", "k"):
        v = getattr(args, key, None)
        if v is not None:
            entry[key] = v
    return entry


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_intercepts(args) -> int:
    entry = _entry_from_args(args)
    ints = intercepts_exact(entry.joint)
    resolvable, cp = is_perfectly_resolvable(entry.joint)
    report = {
        "input": _input_descriptor(args),
        "intercepts": {"tx": ints.tx, "ty": ints.ty, "tz": ints.tz},
        "gk_common_information": cp.entropy_bits,
        "mutual_information": mutual_information(entry.joint),
        "perfectly_resolvable": resolvable,
        "n_components": cp.graph.n_components,
    }
    _dump_json(report, args.output)
    return EXIT_OK


def _cmd_gk(args) -> int:
    entry = _entry_from_args(args)
    resolvable, cp = is_perfectly_resolvable(entry.joint)
    report = {
        "input": _input_descriptor(args),
        "gk_common_information": gk_common_information(entry.joint),
        "n_components": cp.graph.n_components,
        "perfectly_resolvable": resolvable,
        "mutual_information": mutual_information(entry.joint),
    }
    _dump_json(report, args.output)
    return EXIT_OK


def _cmd_wyner(args) -> int:
    entry = _entry_from_args(args)
    result = wyner_common_information(entry.joint, _cfg_from_args(args))
    report = {
        "input": _input_descriptor(args),
        "wyner_common_information": result.value,
        "slice_sum": result.slice_sum,
        "residual": result.residual,
        "feasible_at_tolerance": result.feasible,
        "mutual_information": mutual_information(entry.joint),
        "seed": args.seed,
    }
    _dump_json(report, args.output)
    return EXIT_OK if result.feasible else EXIT_FLAGGED


def _cmd_trace(args) -> int:
    entry = _entry_from_args(args)
    directions = fibonacci_directions(args.directions)
    cfg = _cfg_from_args(args)
    region = trace_region(
        entry.joint, directions, cfg, workers=args.workers, label=entry.name
    )
    region = region.with_certified(entry.certified_facts)
    report = {
        "input": _input_descriptor(args),
        "seed": args.seed,
        "n_directions": args.directions,
        "region": region.to_dict(),
    }
    _dump_json(report, args.output)
    return EXIT_FLAGGED if any("non-convergence" in f for f in region.flags) else EXIT_OK


def _cmd_slice(args) -> int:
    entry = _entry_from_args(args)
    cfg = _cfg_from_args(args)
    points = slice_z(entry.joint, args.grid, cfg)
    flagged = any(not sp.feasible for sp in points)
    if args.format == "csv":
        lines = ["alpha,r1,r2,residual,caveat"]
        for sp in points:
            caveat = "" if sp.feasible else "infeasible-at-tolerance"
            lines.append(
                f"{_fmt(sp.alpha)},{_fmt(sp.r1)},{_fmt(sp.r2)},{_fmt(sp.residual)},{caveat}"
            )
        _write("\n".join(lines) + "\n", args.output)
    else:
        report = {
            "input": _input_descriptor(args),
            "seed": args.seed,
            "points": [
                {
                    "alpha": sp.alpha,
                    "r1": sp.r1,
                    "r2": sp.r2,
                    "residual": sp.residual,
                    "penalty_weight": sp.penalty_weight,
                    "feasible": sp.feasible,
                }
                for sp in points
            ],
            "min_rate_sum": min(sp.rate_sum for sp in points),
        }
        _dump_json(report, args.output)
    return EXIT_FLAGGED if flagged else EXIT_OK


def _cmd_rate_bound(args) -> int:
    setup_entry = _entry_from_spec(args.setup)
    target_entry = _entry_from_spec(args.target)
    setup_region = catalog_region(setup_entry)
    target_region = catalog_region(target_entry)
    report = rate_upper_bound(setup_region, target_region)
    out = report.to_dict()
    out["setup"] = args.setup
    out["target"] = args.target
    _dump_json(out, args.output)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    entry = _entry_from_args(args)
    grid = GridSpec(q_cardinality=args.q, steps=args.steps)
    if args.slice_min:
        bound = brute_force_slice_min(entry.joint, grid, z_tol=args.z_tol)
        report = {
            "input": _input_descriptor(args),
            "slice_min": _finite(bound.value),
            "z_tol": args.z_tol,
            "resolution": bound.resolution,
            "n_channels": bound.n_channels,
        }
    else:
        lam = (args.l1, args.l2, args.l3)
        if sum(lam) <= 0:
            raise ValidationError("oracle direction must have a positive component")
        bound = brute_force_support(entry.joint, lam, grid)
        report = {
            "input": _input_descriptor(args),
            "lambda": list(lam),
            "support_lower_at_resolution": _finite(bound.value),
            "resolution": bound.resolution,
            "n_channels": bound.n_channels,
        }
    _dump_json(report, args.output)
    return EXIT_OK


def _cmd_catalog(args) -> int:
    if args.action == "list":
        _dump_json({"entries": catalog_names()}, args.output)
        return EXIT_OK
    entry = _entry_from_args(args)
    report = entry.describe()
    if args.with_joint:
        report["joint"] = joint_to_dict(entry.joint)
    _dump_json(report, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensionkit",
        description="Tension-region calculus for finite correlated pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(name: str, help_text: str, optimizer: bool = False):
        sp = sub.add_parser(name, help=help_text)
        _add_input_flags(sp)
        sp.add_argument("--output", default="-", help="output path (default stdout)")
        if optimizer:
            _add_optimizer_flags(sp)
        return sp

    common("intercepts", "exact axis intercepts, GK value and resolvability")
    common("gk", "Gacs-Korner common information (connected components)")
    common("wyner", "Wyner common information via the z=0 slice", optimizer=True)

    sp = common("trace", "trace the region over a direction sweep", optimizer=True)
    sp.add_argument("--directions", type=int, default=64,
                    help="number of octant directions (default 64)")

    sp = common("slice", "trace the z=0 slice curve", optimizer=True)
    sp.add_argument("--grid", type=int, default=21, help="mixing-weight grid size")
    sp.add_argument("--format", choices=("json", "csv"), default="csv")

    sp = sub.add_parser("rate-bound", help="sound upper bound on secure-sampling rate")
    sp.add_argument("--setup", required=True,
                    help="setup pair spec, e.g. string-ot:L=2 or file:joint.json")
    sp.add_argument("--target", required=True,
                    help="target pair spec, e.g. two-bit-ot")
    sp.add_argument("--output", default="-")

    sp = common("oracle", "exhaustive grid enumeration on tiny instances")
    sp.add_argument("--q", type=int, default=4, help="grid channel cardinality")
    sp.add_argument("--steps", type=int, default=8, help="mass quanta per row")
    sp.add_argument("--l1", type=float, default=1.0)
    sp.add_argument("--l2", type=float, default=1.0)
    sp.add_argument("--l3", type=float, default=1.0)
    sp.add_argument("--slice-min", action="store_true",
                    help="minimize r1+r2 subject to r3 <= z-tol instead")
    sp.add_argument("--z-tol", type=float, default=0.01)

    sp = sub.add_parser("catalog", help="list or show built-in distributions")
    sp.add_argument("action", choices=("list", "show"))
    _add_input_flags(sp)
    sp.add_argument("--with-joint", action="store_true", help="include the pmf")
    sp.add_argument("--output", default="-")
    return parser


_DISPATCH = {
    "intercepts": _cmd_intercepts,
    "gk": _cmd_gk,
    "wyner": _cmd_wyner,
    "trace": _cmd_trace,
    "slice": _cmd_slice,
    "rate-bound": _cmd_rate_bound,
    "oracle": _cmd_oracle,
    "catalog": _cmd_catalog,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except (ValidationError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except TensionkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
