"""Command-line entry point.

Reads a system description from JSON, runs one of the subcommands, and
emits machine-readable reports (JSON, or CSV for sweeps).  Reports embed
the resolved configuration and the library version so identical invocations
produce byte-identical output.

Exit codes: 0 success, 1 validation or input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, hausdorff, higher_order, measures, minkowski, oracle
from .core import InvalidSystemError, NumericalError, load_system
from .lattice import decompose, empirical_census


def thread_cap() -> int:
    """Worker count from AFFDIM_THREADS (0 or unset = single-threaded)."""
    raw = os.environ.get("AFFDIM_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise InvalidSystemError(f"AFFDIM_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise InvalidSystemError(f"AFFDIM_THREADS must be >= 0, got {value}")
    return value


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def _config(args: argparse.Namespace, **extra) -> dict:
    cfg = {"version": __version__, "system": extra.pop("system_dict", None)}
    for key in ("kind", "tol", "n", "seed", "samples", "max_n", "format"):
        if hasattr(args, key.replace("-", "_")):
            cfg[key] = getattr(args, key.replace("-", "_"))
    cfg.update(extra)
    return {k: v for k, v in cfg.items() if v is not None}


def _parse_grid(text: str) -> list[int]:
    grid = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        value = float(part)
        if value < 1 or value != int(value):
            raise InvalidSystemError(f"grid entries must be positive integers, got {part!r}")
        grid.append(int(value))
    if not grid:
        raise InvalidSystemError("empty size grid")
    return grid


def cmd_dim(args) -> None:
    system = load_system(args.system)
    results = {}
    if args.kind in ("minkowski", "both"):
        results["minkowski"] = minkowski.dimension(system, args.tol).to_dict()
    if args.kind in ("hausdorff", "both"):
        report = hausdorff.dimension(system, args.tol)
        results["hausdorff"] = report.to_dict()
    config = _config(args, system_dict=system.to_json_dict())
    if args.format == "csv":
        print("# affdim", __version__, "dim", json.dumps(config, sort_keys=True))
        print("kind,value,case,truncation_index,tail_bound,tolerance")
        for kind, rep in results.items():
            print(
                f"{kind},{rep['value']!r},{rep['case']},{rep['truncation_index']},"
                f"{rep['tail_bound']!r},{rep['tolerance']!r}"
            )
        return
    _emit({"command": "dim", "config": config, "results": results})


def cmd_decompose(args) -> None:
    system = load_system(args.system)
    dec = decompose(args.n, system)
    for chain in dec.chains:
        _emit(
            {
                "start": chain.start,
                "positions": list(chain.positions),
                "full_length": "truncated" if chain.truncated else chain.full_length,
            }
        )
    census = dec.census()
    _emit(
        {
            "command": "decompose",
            "config": _config(args, system_dict=system.to_json_dict()),
            "census": {
                "L": sorted([i, j, c] for (i, j), c in census.L.items()),
                "D": sorted([j, c] for j, c in census.D.items()),
                "truncated": sorted([j, c] for j, c in census.truncated.items()),
            },
        }
    )


def cmd_count(args) -> None:
    system = load_system(args.system)
    census = empirical_census(args.n, system)
    count = minkowski.pattern_count_exact(args.n, system, census)
    _emit(
        {
            "command": "count",
            "config": _config(args, system_dict=system.to_json_dict()),
            "count": count,
            "log_m_count_over_n": minkowski.empirical_dimension(args.n, system, census),
        }
    )


def cmd_verify(args) -> None:
    system = load_system(args.system)
    oracle_counts = oracle.brute_force_counts_upto(args.max_n, system)
    rows = []
    all_equal = True
    for n in range(1, args.max_n + 1):
        formula = minkowski.pattern_count_exact(n, system)
        equal = formula == oracle_counts[n - 1]
        all_equal = all_equal and equal
        rows.append(
            {
                "n": n,
                "oracle_count": oracle_counts[n - 1],
                "formula_count": formula,
                "equal": equal,
            }
        )
    _emit(
        {
            "command": "verify",
            "config": _config(args, system_dict=system.to_json_dict()),
            "rows": rows,
            "all_equal": all_equal,
        }
    )
    if not all_equal:
        raise NumericalError("pattern-count formula disagrees with enumeration")


def cmd_sample(args) -> None:
    system = load_system(args.system)
    pm = measures.PrefixMeasure(system, args.n)
    letters, neg_log2 = pm.sample(np.random.default_rng(args.seed))
    print("".join(str(int(v)) for v in letters))
    _emit(
        {
            "command": "sample",
            "config": _config(args, system_dict=system.to_json_dict()),
            "neg_log_prob_per_n": neg_log2 / (args.n * float(np.log2(system.m))),
        }
    )


def cmd_billingsley(args) -> None:
    system = load_system(args.system)
    mean, stderr = measures.empirical_local_dimension(system, args.n, args.seed, args.samples)
    _emit(
        {
            "command": "billingsley",
            "config": _config(args, system_dict=system.to_json_dict()),
            "mean": mean,
            "stderr": stderr,
        }
    )


def cmd_sweep(args) -> None:
    system = load_system(args.system)
    grid = _parse_grid(args.n_grid)
    if args.kind == "hausdorff":
        raise InvalidSystemError(
            "sweep compares empirical pattern counts, which estimate the "
            "Minkowski dimension; use --kind minkowski"
        )
    closed = minkowski.dimension(system, args.tol).value

    def point(n: int) -> tuple[int, float]:
        return n, minkowski.empirical_dimension(n, system)

    workers = thread_cap()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, grid))
    else:
        results = [point(n) for n in grid]
    config = _config(args, system_dict=system.to_json_dict())
    if args.format == "json":
        _emit(
            {
                "command": "sweep",
                "config": config,
                "rows": [
                    {"n": n, "empirical": emp, "closed_form": closed, "gap": abs(emp - closed)}
                    for n, emp in results
                ],
            }
        )
        return
    print("# affdim", __version__, "sweep", json.dumps(config, sort_keys=True))
    print("n,empirical,closed_form,gap")
    for n, emp in results:
        print(f"{n},{emp!r},{closed!r},{abs(emp - closed)!r}")


def cmd_higher_order(args) -> None:
    system = load_system(args.system)
    with open(args.forbidden, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "words" not in data:
        raise InvalidSystemError('forbidden-word file must be {"words": [...]} ')
    words = frozenset(tuple(int(ch) for ch in str(w)) for w in data["words"])
    maps = tuple(higher_order.parse_growth(text) for text in args.f or [])
    hos = higher_order.HigherOrderSystem(base=system, forbidden=words, growth_maps=maps)
    grid = _parse_grid(args.n_grid)
    print("# affdim", __version__, "higher-order", json.dumps(_config(args, system_dict=system.to_json_dict()), sort_keys=True))
    print("n,measured,bound,empirical_gap")
    for n in grid:
        measured, bound = higher_order.affected_density(n, hos)
        if n <= args.max_enumeration:
            gap = repr(higher_order.dim_gap_empirical(n, hos))
        else:
            gap = ""
        print(f"{n},{measured!r},{bound!r},{gap}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affdim",
        description="Minkowski and Hausdorff dimensions of affine multiplicative subshifts",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("system", help="JSON system description")
        return p

    p = add("dim", cmd_dim, help="dimension report")
    p.add_argument("--kind", choices=("minkowski", "hausdorff", "both"), default="both")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("decompose", cmd_decompose, help="chain decomposition as JSON lines")
    p.add_argument("--n", type=int, required=True)

    p = add("count", cmd_count, help="exact window pattern count")
    p.add_argument("--n", type=int, required=True)

    p = add("verify", cmd_verify, help="enumeration vs formula for all small windows")
    p.add_argument("--max-n", dest="max_n", type=int, default=14)

    p = add("sample", cmd_sample, help="draw an admissible prefix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("billingsley", cmd_billingsley, help="Monte Carlo local dimension")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)

    p = add("sweep", cmd_sweep, help="empirical vs closed form over window sizes (CSV)")
    p.add_argument("--kind", choices=("minkowski", "hausdorff"), default="minkowski")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--n-grid", dest="n_grid", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = add("higher-order", cmd_higher_order, help="vanishing-density table (CSV)")
    p.add_argument("--f", action="append", help="growth map such as k^2 (repeatable)")
    p.add_argument("--forbidden", required=True, help='JSON file {"words": ["110", ...]}')
    p.add_argument("--n-grid", dest="n_grid", required=True)
    p.add_argument(
        "--max-enumeration",
        dest="max_enumeration",
        type=int,
        default=20,
        help="largest n for which the exact count gap is computed",
    )

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except (InvalidSystemError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
