"""Batches of seeded solver runs and their empirical cost profiles.

A profile is built by solving the same instance (or a fresh random
instance per run) many times under one heuristic, recording the
backtrack count of every run.  Per-run seeds are derived from
``(master_seed, run_index)`` with numpy's SeedSequence, so a batch is
reproducible run-by-run and can be split across worker processes
without changing the result: record i is the same no matter which
worker computed it.

Two batch designs are supported: ``collect`` on a fixed instance
profiles one problem repeatedly, while ``collect`` on a GeneratorSpec
draws a fresh instance for every run.  ``phase_sweep`` repeats the
fresh-instance design across a range of fill fractions.
"""

from __future__ import annotations

import csv
import json
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .distributions import EmpiricalDistribution, from_counts
from .latin import (
    GeneratorSpec,
    PartialLatinSquare,
    PlacementExhaustedError,
    generate,
    validate,
    to_json_dict as square_to_json_dict,
    from_json_dict as square_from_json_dict,
)
from .solver import HeuristicConfig, solve

SCHEMA_RUNSET = "runset@1"

OUTCOME_SAT = "sat"
OUTCOME_UNSAT = "unsat"
OUTCOME_CUTOFF = "cutoff"
OUTCOME_GENERATION_FAILED = "generation_failed"

_RECORD_FIELDS = ("run_index", "seed", "outcome", "backtracks")
_OUTCOMES = frozenset(
    (OUTCOME_SAT, OUTCOME_UNSAT, OUTCOME_CUTOFF, OUTCOME_GENERATION_FAILED)
)


def derive_run_seeds(master_seed: int, run_index: int) -> tuple[int, int]:
    """Derive (generator_seed, solver_seed) for one run.

    Mixing function: ``SeedSequence([master_seed, run_index])`` expanded
    to two 64-bit words.  The first seeds instance generation (unused in
    fixed-instance mode), the second seeds the solver's tie-breaking.
    """
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    if run_index < 0:
        raise ValueError("run_index must be non-negative")
    words = np.random.SeedSequence([master_seed, run_index]).generate_state(
        2, dtype=np.uint64
    )
    return int(words[0]), int(words[1])


@dataclass(frozen=True)
class RunRecord:
    run_index: int
    seed: int
    outcome: str
    backtracks: int

    def __post_init__(self) -> None:
        if self.outcome not in _OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.backtracks < 0:
            raise ValueError("backtracks must be non-negative")


@dataclass(frozen=True)
class RunSet:
    """An ordered batch of runs sharing one source and heuristic."""

    metadata: dict
    records: tuple[RunRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        for i, record in enumerate(self.records):
            if record.run_index != i:
                raise ValueError(
                    f"record {i} has run_index {record.run_index}; "
                    "indices must be contiguous from 0"
                )

    def __len__(self) -> int:
        return len(self.records)

    def outcome_counts(self) -> Counter:
        return Counter(record.outcome for record in self.records)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_RUNSET,
            "metadata": self.metadata,
            "record_fields": list(_RECORD_FIELDS),
            "records": [
                [r.run_index, r.seed, r.outcome, r.backtracks] for r in self.records
            ],
        }


def runset_from_json_dict(payload: dict) -> RunSet:
    schema = payload.get("schema")
    if schema != SCHEMA_RUNSET:
        raise ValueError(f"expected schema {SCHEMA_RUNSET!r}, got {schema!r}")
    if tuple(payload.get("record_fields", ())) != _RECORD_FIELDS:
        raise ValueError("unexpected record field layout")
    records = tuple(
        RunRecord(run_index=row[0], seed=row[1], outcome=row[2], backtracks=row[3])
        for row in payload["records"]
    )
    return RunSet(metadata=payload.get("metadata", {}), records=records)


def save_runset(runs: RunSet, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(runs.to_json_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load_runset(path: str | Path) -> RunSet:
    return runset_from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _execute_runs(
    source: PartialLatinSquare | GeneratorSpec,
    heuristic: HeuristicConfig,
    master_seed: int,
    lo: int,
    hi: int,
) -> list[RunRecord]:
    """Run indices [lo, hi) sequentially; used directly and by workers."""
    records = []
    for i in range(lo, hi):
        generator_seed, solver_seed = derive_run_seeds(master_seed, i)
        if isinstance(source, GeneratorSpec):
            spec = GeneratorSpec(
                order=source.order,
                fill_fraction=source.fill_fraction,
                seed=generator_seed,
            )
            try:
                instance = generate(spec)
            except PlacementExhaustedError:
                records.append(
                    RunRecord(i, solver_seed, OUTCOME_GENERATION_FAILED, 0)
                )
                continue
        else:
            instance = source
        config = HeuristicConfig(
            tie_break=heuristic.tie_break,
            value_order=heuristic.value_order,
            seed=solver_seed,
            cutoff=heuristic.cutoff,
        )
        result = solve(instance, config)
        records.append(RunRecord(i, solver_seed, result.outcome, result.backtracks))
    return records


def _worker(args: tuple) -> list[RunRecord]:
    return _execute_runs(*args)


def _source_metadata(source: PartialLatinSquare | GeneratorSpec) -> dict:
    if isinstance(source, GeneratorSpec):
        return {
            "kind": "generator",
            "order": source.order,
            "fill_fraction": source.fill_fraction,
        }
    return {"kind": "instance", "square": square_to_json_dict(source)}


def source_from_metadata(payload: dict) -> PartialLatinSquare | GeneratorSpec:
    kind = payload.get("kind")
    if kind == "generator":
        return GeneratorSpec(
            order=payload["order"], fill_fraction=payload["fill_fraction"], seed=0
        )
    if kind == "instance":
        square, _ = square_from_json_dict(payload["square"])
        return square
    raise ValueError(f"unknown source kind {kind!r}")


def collect(
    source: PartialLatinSquare | GeneratorSpec,
    heuristic: HeuristicConfig,
    runs: int,
    master_seed: int,
    jobs: int = 1,
) -> RunSet:
    """Solve ``runs`` seeded runs and collect their outcomes.

    ``heuristic`` is a template: its seed field is ignored and replaced
    by the per-run derived seed.  With a GeneratorSpec source, the
    spec's own seed is likewise ignored; instance i is generated from
    the seed derived for run i, so every run sees a fresh instance.

    ``jobs`` > 1 splits the index range across worker processes; the
    result is identical to a sequential run because each record depends
    only on its index.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if isinstance(source, PartialLatinSquare):
        problems = validate(source)
        if problems:
            raise ValueError("invalid instance: " + "; ".join(problems))
    if jobs == 1 or runs == 1:
        records = _execute_runs(source, heuristic, master_seed, 0, runs)
    else:
        jobs = min(jobs, runs)
        bounds = [round(k * runs / jobs) for k in range(jobs + 1)]
        payloads = [
            (source, heuristic, master_seed, bounds[k], bounds[k + 1])
            for k in range(jobs)
            if bounds[k] < bounds[k + 1]
        ]
        records = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_worker, payloads):
                records.extend(chunk)
    metadata = {
        "source": _source_metadata(source),
        "strategy": heuristic.strategy_name,
        "cutoff": heuristic.cutoff,
        "runs": runs,
        "master_seed": master_seed,
    }
    return RunSet(metadata=metadata, records=tuple(records))


def to_distribution(runs: RunSet, sat_only: bool = False) -> EmpiricalDistribution:
    """Empirical backtrack distribution of a RunSet.

    Completed runs (sat and unsat alike — inconsistency proofs cost
    backtracks too) contribute their counts to the pmf; cutoff runs
    become censored mass.  ``sat_only`` drops unsat runs first, which
    renormalizes over the remaining runs.  Generation failures have no
    cost at all and are rejected rather than silently skipped.
    """
    if not runs.records:
        raise ValueError("cannot build a distribution from an empty RunSet")
    kept = list(runs.records)
    if any(r.outcome == OUTCOME_GENERATION_FAILED for r in kept):
        raise ValueError(
            "RunSet contains generation failures; profile a feasible "
            "generator spec or filter the records first"
        )
    if sat_only:
        kept = [r for r in kept if r.outcome != OUTCOME_UNSAT]
        if not kept:
            raise ValueError("no sat or cutoff runs remain after filtering")
    counts: Counter = Counter()
    censored = 0
    for record in kept:
        if record.outcome == OUTCOME_CUTOFF:
            censored += 1
        else:
            counts[record.backtracks] += 1
    metadata = dict(runs.metadata)
    metadata["sat_only"] = sat_only
    metadata["runs_used"] = len(kept)
    return from_counts(counts, censored=censored, metadata=metadata)


@dataclass(frozen=True)
class PhaseRow:
    """One fill fraction's aggregate solve statistics."""

    fill: float
    median_backtracks: float
    mean_backtracks: float
    fraction_sat: float
    fraction_cutoff: float


def phase_sweep(
    order: int,
    fill_fractions: Sequence[float],
    instances_per_point: int,
    heuristic: HeuristicConfig,
    cutoff: int,
    master_seed: int,
    jobs: int = 1,
) -> list[PhaseRow]:
    """Cost and satisfiability against pre-assignment density.

    Each fill fraction gets ``instances_per_point`` fresh instances,
    solved once each; point k's runs are seeded from
    ``SeedSequence([master_seed, k])`` so the sweep is deterministic.
    Cutoff runs contribute their censored backtrack count (the cutoff
    itself) to the medians and means; generation failures contribute
    nothing and only lower the sat fraction.
    """
    if instances_per_point < 1:
        raise ValueError("instances_per_point must be >= 1")
    if not fill_fractions:
        raise ValueError("fill_fractions must be non-empty")
    template = HeuristicConfig(
        tie_break=heuristic.tie_break,
        value_order=heuristic.value_order,
        seed=0,
        cutoff=cutoff,
    )
    rows = []
    for k, fill in enumerate(fill_fractions):
        point_seed = int(
            np.random.SeedSequence([master_seed, k]).generate_state(1, np.uint64)[0]
        )
        spec = GeneratorSpec(order=order, fill_fraction=fill, seed=0)
        batch = collect(spec, template, instances_per_point, point_seed, jobs=jobs)
        costs = [
            r.backtracks
            for r in batch.records
            if r.outcome != OUTCOME_GENERATION_FAILED
        ]
        outcomes = batch.outcome_counts()
        rows.append(
            PhaseRow(
                fill=float(fill),
                median_backtracks=float(statistics.median(costs))
                if costs
                else float("nan"),
                mean_backtracks=float(statistics.fmean(costs))
                if costs
                else float("nan"),
                fraction_sat=outcomes[OUTCOME_SAT] / instances_per_point,
                fraction_cutoff=outcomes[OUTCOME_CUTOFF] / instances_per_point,
            )
        )
    return rows


def write_phase_csv(rows: Sequence[PhaseRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "fill",
                "median_backtracks",
                "mean_backtracks",
                "fraction_sat",
                "fraction_cutoff",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    repr(row.fill),
                    repr(row.median_backtracks),
                    repr(row.mean_backtracks),
                    repr(row.fraction_sat),
                    repr(row.fraction_cutoff),
                ]
            )
