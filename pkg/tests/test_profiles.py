"""Tests for seeded run collection and phase sweeps."""

import math
import statistics

import pytest

from quasiportfolio.latin import GeneratorSpec, PartialLatinSquare, new_empty
from quasiportfolio.profiles import (
    OUTCOME_CUTOFF,
    OUTCOME_GENERATION_FAILED,
    OUTCOME_SAT,
    OUTCOME_UNSAT,
    PhaseRow,
    RunRecord,
    RunSet,
    collect,
    derive_run_seeds,
    load_runset,
    phase_sweep,
    save_runset,
    source_from_metadata,
    to_distribution,
    write_phase_csv,
)
from quasiportfolio.solver import HeuristicConfig, solve

CONFIG = HeuristicConfig.from_name("brelaz-s", seed=0, cutoff=10**6)


def synthetic_runset(rows, metadata=None):
    """Build a RunSet from (outcome, backtracks) pairs."""
    records = tuple(
        RunRecord(run_index=i, seed=100 + i, outcome=outcome, backtracks=bt)
        for i, (outcome, bt) in enumerate(rows)
    )
    return RunSet(metadata=metadata or {"runs": len(records)}, records=records)


class TestSeeds:
    def test_deterministic(self):
        assert derive_run_seeds(7, 3) == derive_run_seeds(7, 3)

    def test_distinct_across_indices_and_masters(self):
        seen = {derive_run_seeds(m, i) for m in range(4) for i in range(50)}
        assert len(seen) == 200

    def test_generator_and_solver_seeds_differ(self):
        gen, solver = derive_run_seeds(0, 0)
        assert gen != solver


class TestCollect:
    def test_single_run_matches_direct_solve(self):
        square = new_empty(5)
        runs = collect(square, CONFIG, runs=1, master_seed=42)
        record = runs.records[0]
        _, solver_seed = derive_run_seeds(42, 0)
        direct = solve(square, HeuristicConfig.from_name("brelaz-s", seed=solver_seed))
        assert record.seed == solver_seed
        assert record.outcome == direct.outcome
        assert record.backtracks == direct.backtracks

    def test_template_seed_is_ignored(self):
        square = new_empty(5)
        a = collect(square, HeuristicConfig.from_name("brelaz-r", seed=1), 4, 9)
        b = collect(square, HeuristicConfig.from_name("brelaz-r", seed=999), 4, 9)
        assert a.records == b.records

    def test_deterministic(self):
        square = new_empty(6)
        a = collect(square, CONFIG, runs=5, master_seed=1)
        b = collect(square, CONFIG, runs=5, master_seed=1)
        assert a == b

    def test_jobs_do_not_change_records(self):
        square = new_empty(6)
        config = HeuristicConfig.from_name("r-brelaz-r", seed=0)
        sequential = collect(square, config, runs=7, master_seed=3, jobs=1)
        parallel = collect(square, config, runs=7, master_seed=3, jobs=3)
        assert sequential.records == parallel.records

    def test_metadata_round_trips_source(self):
        square = new_empty(4).with_cell(0, 0, 2)
        runs = collect(square, CONFIG, runs=2, master_seed=0)
        assert runs.metadata["strategy"] == "brelaz-s"
        assert runs.metadata["cutoff"] == 10**6
        assert runs.metadata["runs"] == 2
        assert runs.metadata["master_seed"] == 0
        assert source_from_metadata(runs.metadata["source"]) == square

        spec = GeneratorSpec(order=5, fill_fraction=0.4, seed=77)
        gen_runs = collect(spec, CONFIG, runs=2, master_seed=0)
        rebuilt = source_from_metadata(gen_runs.metadata["source"])
        assert isinstance(rebuilt, GeneratorSpec)
        assert (rebuilt.order, rebuilt.fill_fraction) == (5, 0.4)

    def test_invalid_instance_rejected(self):
        bad = PartialLatinSquare(order=2, cells=((0, 0), (None, None)))
        with pytest.raises(ValueError, match="invalid instance"):
            collect(bad, CONFIG, runs=1, master_seed=0)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            collect(new_empty(3), CONFIG, runs=0, master_seed=0)
        with pytest.raises(ValueError):
            collect(new_empty(3), CONFIG, runs=1, master_seed=0, jobs=0)

    def test_generator_source_draws_fresh_instances(self):
        spec = GeneratorSpec(order=6, fill_fraction=0.5, seed=0)
        runs = collect(spec, CONFIG, runs=12, master_seed=5)
        # Different instances at half fill cannot all cost the same.
        assert len({r.backtracks for r in runs.records}) > 1

    def test_generation_failure_recorded(self):
        # A full-fill generator spec fails whenever the greedy placement
        # paints itself into a corner, which is common at order 6.
        spec = GeneratorSpec(order=6, fill_fraction=1.0, seed=0)
        for master_seed in range(30):
            runs = collect(spec, CONFIG, runs=6, master_seed=master_seed)
            failed = [
                r
                for r in runs.records
                if r.outcome == OUTCOME_GENERATION_FAILED
            ]
            if failed:
                assert all(r.backtracks == 0 for r in failed)
                with pytest.raises(ValueError, match="generation failures"):
                    to_distribution(runs)
                return
        pytest.fail("no generation failure in 180 full-fill attempts")


class TestToDistribution:
    def test_counts(self):
        runs = synthetic_runset(
            [(OUTCOME_SAT, 0), (OUTCOME_SAT, 0), (OUTCOME_UNSAT, 5)]
        )
        d = to_distribution(runs)
        assert d.support == (0, 5)
        assert d.pmf == (pytest.approx(2 / 3), pytest.approx(1 / 3))
        assert d.censored_mass == 0.0
        assert d.metadata["runs_used"] == 3

    def test_sat_only_renormalizes(self):
        runs = synthetic_runset(
            [(OUTCOME_SAT, 0), (OUTCOME_SAT, 2), (OUTCOME_UNSAT, 5)]
        )
        d = to_distribution(runs, sat_only=True)
        assert d.support == (0, 2)
        assert d.pmf == (0.5, 0.5)
        assert d.metadata["runs_used"] == 2

    def test_cutoff_becomes_censored_mass(self):
        runs = synthetic_runset(
            [(OUTCOME_SAT, 1), (OUTCOME_CUTOFF, 50), (OUTCOME_CUTOFF, 50)]
        )
        d = to_distribution(runs)
        assert d.support == (1,)
        assert d.censored_mass == pytest.approx(2 / 3)

    def test_all_censored(self):
        runs = synthetic_runset([(OUTCOME_CUTOFF, 9), (OUTCOME_CUTOFF, 9)])
        d = to_distribution(runs)
        assert d.support == ()
        assert d.censored_mass == 1.0
        assert d.cdf(10**9) == 0.0

    def test_collected_mean_is_sample_average(self):
        runs = collect(new_empty(6), CONFIG, runs=20, master_seed=11)
        d = to_distribution(runs)
        assert d.censored_mass == 0.0
        sample = [r.backtracks for r in runs.records]
        assert math.isclose(d.mean(), statistics.fmean(sample))
        assert d.cdf(max(sample)) == pytest.approx(1.0)


class TestRunSetFormat:
    def test_round_trip(self, tmp_path):
        runs = collect(new_empty(5), CONFIG, runs=4, master_seed=2)
        path = tmp_path / "runs.json"
        save_runset(runs, path)
        assert load_runset(path) == runs

    def test_contiguous_indices_required(self):
        records = (RunRecord(1, 0, OUTCOME_SAT, 0),)
        with pytest.raises(ValueError, match="contiguous"):
            RunSet(metadata={}, records=records)

    def test_unknown_outcome_rejected(self):
        with pytest.raises(ValueError, match="outcome"):
            RunRecord(0, 0, "maybe", 0)


class TestPhaseSweep:
    def test_rows_and_determinism(self):
        fills = [0.0, 0.3, 0.6]
        rows = phase_sweep(
            order=5,
            fill_fractions=fills,
            instances_per_point=8,
            heuristic=CONFIG,
            cutoff=10**5,
            master_seed=9,
        )
        again = phase_sweep(
            order=5,
            fill_fractions=fills,
            instances_per_point=8,
            heuristic=CONFIG,
            cutoff=10**5,
            master_seed=9,
        )
        assert rows == again
        assert [r.fill for r in rows] == fills
        for row in rows:
            assert 0.0 <= row.fraction_sat <= 1.0
            assert 0.0 <= row.fraction_cutoff <= 1.0
            assert row.median_backtracks >= 0.0
        # An empty order-5 square always completes.
        assert rows[0].fraction_sat == 1.0

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            phase_sweep(5, [], 4, CONFIG, 10, 0)
        with pytest.raises(ValueError):
            phase_sweep(5, [0.2], 0, CONFIG, 10, 0)

    def test_csv_format(self, tmp_path):
        rows = [
            PhaseRow(
                fill=0.25,
                median_backtracks=2.0,
                mean_backtracks=3.5,
                fraction_sat=1.0,
                fraction_cutoff=0.0,
            )
        ]
        path = tmp_path / "phase.csv"
        write_phase_csv(rows, path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode().splitlines()
        assert lines[0] == (
            "fill,median_backtracks,mean_backtracks,fraction_sat,fraction_cutoff"
        )
        assert lines[1] == "0.25,2.0,3.5,1.0,0.0"
