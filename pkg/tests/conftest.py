"""Shared fixtures, including the cached order-20 profile batches.

The acceptance checks on order-20 profiles need 10,000 runs per
strategy, which takes several minutes per strategy on one core.  The
run sets are therefore cached on disk under ``tests/.cache`` keyed by
their exact parameters; delete the directory to force a rebuild.

Per-strategy cutoffs: the brelaz strategies have a far heavier
backtrack tail than the reverse strategies (a trapped run can exceed
any affordable cutoff), so they are profiled at a lower cutoff to keep
the batch runtime bounded.  The cdf below each cutoff is exact either
way; the censored fraction is carried explicitly by the distributions.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from quasiportfolio.latin import new_empty
from quasiportfolio.profiles import (
    RunSet,
    collect,
    load_runset,
    save_runset,
    to_distribution,
)
from quasiportfolio.solver import HeuristicConfig

CACHE_DIR = Path(__file__).parent / ".cache"

PROFILE_ORDER = 20
PROFILE_RUNS = 10_000
PROFILE_MASTER_SEED = 20260823
PROFILE_CUTOFFS = {
    "brelaz-s": 10**4,
    "brelaz-r": 10**4,
    "r-brelaz-s": 10**5,
    "r-brelaz-r": 10**5,
}


def profile_runset(strategy: str) -> RunSet:
    """Load or compute the order-20 empty-square batch for one strategy."""
    cutoff = PROFILE_CUTOFFS[strategy]
    cache_file = (
        CACHE_DIR
        / f"order{PROFILE_ORDER}_{strategy}_r{PROFILE_RUNS}_c{cutoff}_s{PROFILE_MASTER_SEED}.runs.json"
    )
    if cache_file.exists():
        runs = load_runset(cache_file)
        meta = runs.metadata
        if (
            meta.get("strategy") == strategy
            and meta.get("cutoff") == cutoff
            and meta.get("runs") == PROFILE_RUNS
            and meta.get("master_seed") == PROFILE_MASTER_SEED
        ):
            return runs
    config = HeuristicConfig.from_name(strategy, seed=0, cutoff=cutoff)
    runs = collect(
        new_empty(PROFILE_ORDER),
        config,
        PROFILE_RUNS,
        PROFILE_MASTER_SEED,
    )
    CACHE_DIR.mkdir(exist_ok=True)
    save_runset(runs, cache_file)
    return runs


def build_profile_cache() -> None:
    """Precompute every strategy's batch (used by a warm-up script)."""
    for strategy in PROFILE_CUTOFFS:
        profile_runset(strategy)


@pytest.fixture(scope="session")
def order20_distributions():
    """Empirical backtrack distributions for all four strategies."""
    return {
        strategy: to_distribution(profile_runset(strategy))
        for strategy in PROFILE_CUTOFFS
    }
