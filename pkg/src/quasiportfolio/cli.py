"""Command-line interface for generation, solving, profiling, and portfolios.

Subcommands: gen, solve, profile, portfolio, frontier, phase.  Every
command is a deterministic function of its flags: rerunning with the
same arguments reproduces output files byte for byte, and any file-
writing command leaves a manifest (JSON, sorted keys, no timestamps)
recording the exact parameters that produced its outputs.

Exit codes:
    0   success (for ``solve``: the instance is completable)
    10  solve: proven uncompletable
    11  solve: backtrack cutoff reached before a verdict
    2   usage error (bad flags; raised by argparse)
    3   data error (unparsable/invalid input, censored distributions,
        failed generation)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .distributions import (
    CensoredDataError,
    dominates,
    load as load_distribution,
    save as save_distribution,
)
from .latin import (
    GeneratorSpec,
    ParseError,
    PlacementExhaustedError,
    generate,
    parse,
    serialize,
)
from .portfolio import (
    PortfolioSpec,
    enumerate_portfolios,
    portfolio_pmf,
    stats,
    write_allocations_csv,
    efficient_frontier,
)
from .profiles import (
    collect,
    derive_run_seeds,
    save_runset,
    to_distribution,
    phase_sweep,
    write_phase_csv,
)
from .solver import STRATEGY_NAMES, HeuristicConfig

EXIT_OK = 0
EXIT_UNSAT = 10
EXIT_CUTOFF = 11
EXIT_USAGE = 2
EXIT_DATA = 3

DEFAULT_CUTOFF = 10**6

_TOOL_NAME = "quasiportfolio"


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _write_manifest(path: Path, command: str, parameters: dict, outputs: list[str]) -> None:
    _write_json(
        path,
        {
            "command": command,
            "parameters": parameters,
            "tool": _TOOL_NAME,
            "version": __version__,
            "outputs": sorted(outputs),
        },
    )


def _heuristic_list(raw: str) -> list[str]:
    names = [part.strip() for part in raw.split(",") if part.strip()]
    if not names:
        raise argparse.ArgumentTypeError("empty heuristic list")
    for name in names:
        if name not in STRATEGY_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown heuristic {name!r}; choose from {', '.join(sorted(STRATEGY_NAMES))}"
            )
    return names


def _component_arg(raw: str) -> tuple[str, int]:
    """Parse a PATH:COUNT portfolio component argument."""
    path, sep, count = raw.rpartition(":")
    if not sep or not path:
        raise argparse.ArgumentTypeError(
            f"expected PATH:COUNT, got {raw!r}"
        )
    try:
        n = int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"processor count {count!r} is not an integer")
    if n < 1:
        raise argparse.ArgumentTypeError("processor count must be >= 1")
    return path, n


def _load_uncensored(path: str):
    dist = load_distribution(path)
    if dist.censored_mass > 1e-12:
        raise CensoredDataError(
            f"{path}: censored_mass={dist.censored_mass:.6g}; portfolio "
            "computations need censoring-free distributions"
        )
    return dist


def cmd_gen(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(args.count - 1)))
    written: list[str] = []
    failed: list[int] = []
    for i in range(args.count):
        generator_seed, _ = derive_run_seeds(args.seed, i)
        spec = GeneratorSpec(order=args.order, fill_fraction=args.fill, seed=generator_seed)
        try:
            square = generate(spec)
        except PlacementExhaustedError as exc:
            print(f"instance {i}: generation failed: {exc}", file=sys.stderr)
            failed.append(i)
            continue
        name = f"instance_{i:0{width}d}.txt"
        (out_dir / name).write_text(serialize(square), encoding="utf-8")
        written.append(name)
    _write_manifest(
        out_dir / "manifest.json",
        "gen",
        {
            "order": args.order,
            "fill": args.fill,
            "count": args.count,
            "seed": args.seed,
            "failed_indices": failed,
        },
        written,
    )
    if not written:
        print("error: all instances failed to generate", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    from .solver import solve

    square = parse(Path(args.instance).read_text(encoding="utf-8"))
    config = HeuristicConfig.from_name(args.heuristic, seed=args.seed, cutoff=args.cutoff)
    result = solve(square, config)
    print(f"outcome: {result.outcome}")
    print(f"backtracks: {result.backtracks}")
    if result.outcome == "sat":
        print(serialize(result.completion), end="")
        return EXIT_OK
    if result.outcome == "unsat":
        return EXIT_UNSAT
    return EXIT_CUTOFF


def cmd_profile(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.instance is not None:
        source = parse(Path(args.instance).read_text(encoding="utf-8"))
        source_desc = {"instance": args.instance}
    else:
        source = GeneratorSpec(order=args.order, fill_fraction=args.fill, seed=0)
        source_desc = {"order": args.order, "fill": args.fill}
    outputs: list[str] = []
    dists = {}
    for name in args.heuristics:
        config = HeuristicConfig.from_name(name, seed=0, cutoff=args.cutoff)
        runs = collect(source, config, args.runs, args.seed, jobs=args.jobs)
        dist = to_distribution(runs, sat_only=args.sat_only)
        dists[name] = dist
        for suffix, writer in (
            (".runs.json", lambda p: save_runset(runs, p)),
            (".dist.json", lambda p: save_distribution(dist, p)),
            (".cdf.csv", dist.to_csv),
        ):
            file_name = name + suffix
            writer(out_dir / file_name)
            outputs.append(file_name)
    report_rows = []
    for a in args.heuristics:
        for b in args.heuristics:
            if a == b:
                continue
            try:
                verdict = "1" if dominates(
                    dists[a], dists[b], censored_threshold=args.censored_threshold
                ) else "0"
            except CensoredDataError:
                verdict = "censored"
            report_rows.append((a, b, verdict))
    with open(out_dir / "dominance.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("a,b,dominates\n")
        for a, b, verdict in report_rows:
            fh.write(f"{a},{b},{verdict}\n")
    outputs.append("dominance.csv")
    _write_manifest(
        out_dir / "manifest.json",
        "profile",
        {
            "source": source_desc,
            "heuristics": list(args.heuristics),
            "runs": args.runs,
            "seed": args.seed,
            "cutoff": args.cutoff,
            "sat_only": args.sat_only,
            "censored_threshold": args.censored_threshold,
            "jobs": args.jobs,
        },
        outputs,
    )
    return EXIT_OK


def cmd_portfolio(args: argparse.Namespace) -> int:
    components = tuple(
        (_load_uncensored(path), count) for path, count in args.component
    )
    law = portfolio_pmf(PortfolioSpec(components=components))
    st = stats(law)
    print(f"processors: {sum(n for _, n in components)}")
    print(f"mean: {st.mean!r}")
    print(f"std: {st.std!r}")
    print("x,pmf,cdf")
    acc = 0.0
    for x, p in zip(law.support, law.pmf):
        acc += p
        print(f"{x},{p!r},{acc!r}")
    if args.out is not None:
        json_path = Path(str(args.out) + ".json")
        csv_path = Path(str(args.out) + ".csv")
        save_distribution(law, json_path)
        law.to_csv(csv_path)
        _write_manifest(
            Path(str(args.out) + ".manifest.json"),
            "portfolio",
            {
                "components": [[path, count] for path, count in args.component],
            },
            [json_path.name, csv_path.name],
        )
    return EXIT_OK


def cmd_frontier(args: argparse.Namespace) -> int:
    dists = [_load_uncensored(path) for path in args.distributions]
    portfolios = enumerate_portfolios(dists, args.processors)
    out = Path(args.out)
    if args.format == "csv":
        write_allocations_csv(portfolios, out)
    else:
        frontier = {alloc for alloc, _ in efficient_frontier(portfolios)}
        payload = [
            {
                "allocation": list(alloc),
                "mean": st.mean,
                "std": st.std,
                "on_frontier": alloc in frontier,
            }
            for alloc, st in portfolios
        ]
        out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _write_manifest(
        Path(str(out) + ".manifest.json"),
        "frontier",
        {
            "distributions": list(args.distributions),
            "processors": args.processors,
            "format": args.format,
        },
        [out.name],
    )
    return EXIT_OK


def cmd_phase(args: argparse.Namespace) -> int:
    fills = []
    k = 0
    while True:
        fill = round(args.fill_min + k * args.fill_step, 9)
        if fill > args.fill_max + 1e-9:
            break
        fills.append(fill)
        k += 1
    if not fills:
        print("error: empty fill range", file=sys.stderr)
        return EXIT_USAGE
    config = HeuristicConfig.from_name(args.heuristic, seed=0, cutoff=args.cutoff)
    rows = phase_sweep(
        args.order,
        fills,
        args.instances,
        config,
        cutoff=args.cutoff,
        master_seed=args.seed,
        jobs=args.jobs,
    )
    out = Path(args.out)
    if args.format == "csv":
        write_phase_csv(rows, out)
    else:
        payload = [
            {
                "fill": r.fill,
                "median_backtracks": r.median_backtracks,
                "mean_backtracks": r.mean_backtracks,
                "fraction_sat": r.fraction_sat,
                "fraction_cutoff": r.fraction_cutoff,
            }
            for r in rows
        ]
        out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _write_manifest(
        Path(str(out) + ".manifest.json"),
        "phase",
        {
            "order": args.order,
            "fill_min": args.fill_min,
            "fill_max": args.fill_max,
            "fill_step": args.fill_step,
            "instances": args.instances,
            "heuristic": args.heuristic,
            "cutoff": args.cutoff,
            "seed": args.seed,
            "format": args.format,
            "jobs": args.jobs,
        },
        [out.name],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcp",
        description="Quasigroup completion: generate, solve, profile, and combine strategies.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate partial Latin square instances")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--fill", type=float, default=0.0, help="fraction of cells pre-assigned")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve one instance file")
    p.add_argument("instance")
    p.add_argument("--heuristic", choices=sorted(STRATEGY_NAMES), default="r-brelaz-r")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("profile", help="empirical backtrack distributions over many runs")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--instance", help="fixed instance file profiled on every run")
    source.add_argument("--order", type=int, help="generate a fresh instance per run")
    p.add_argument("--fill", type=float, default=0.0)
    p.add_argument(
        "--heuristics",
        type=_heuristic_list,
        default=list(STRATEGY_NAMES),
        help="comma-separated strategy names",
    )
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.add_argument("--sat-only", action="store_true", help="drop unsat runs from distributions")
    p.add_argument("--censored-threshold", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("portfolio", help="exact law of the best of several parallel runs")
    p.add_argument(
        "component",
        nargs="+",
        type=_component_arg,
        metavar="DIST:COUNT",
        help="distribution file and processor count",
    )
    p.add_argument("--out", help="output prefix for pmf files")
    p.set_defaults(func=cmd_portfolio)

    p = sub.add_parser("frontier", help="mean/std frontier over all allocations")
    p.add_argument("distributions", nargs="+", metavar="DIST")
    p.add_argument("--processors", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("phase", help="cost/satisfiability sweep over fill fractions")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--fill-min", type=float, required=True)
    p.add_argument("--fill-max", type=float, required=True)
    p.add_argument("--fill-step", type=float, default=0.05)
    p.add_argument("--instances", type=int, required=True)
    p.add_argument("--heuristic", choices=sorted(STRATEGY_NAMES), default="r-brelaz-r")
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_phase)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, CensoredDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
