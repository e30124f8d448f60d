"""Quasigroup completion: instances, search strategies, and portfolios.

The package splits into five layers: ``latin`` (partial Latin squares,
generation, text and JSON formats), ``solver`` (backtracking search
with forward checking under four tie-breaking strategies),
``distributions`` (empirical backtrack-count laws), ``profiles``
(seeded batch runs and phase sweeps), and ``portfolio`` (the exact law
of the minimum across parallel runs, with allocation enumeration and
the mean/std efficient frontier).  ``cli`` ties them into the ``qcp``
command.
"""

__version__ = "0.1.0"

from .latin import (
    GeneratorSpec,
    ParseError,
    PartialLatinSquare,
    PlacementExhaustedError,
    generate,
    new_empty,
    parse,
    serialize,
    validate,
)
from .solver import STRATEGY_NAMES, HeuristicConfig, SolveResult, solve
from .distributions import (
    CensoredDataError,
    EmpiricalDistribution,
    dominates,
    from_counts,
)
from .profiles import (
    RunRecord,
    RunSet,
    collect,
    derive_run_seeds,
    phase_sweep,
    to_distribution,
)
from .portfolio import (
    PortfolioSpec,
    PortfolioStats,
    efficient_frontier,
    enumerate_portfolios,
    portfolio_dominates,
    portfolio_pmf,
    portfolio_pmf_binomial,
    portfolio_pmf_single,
    stats,
)

__all__ = [
    "__version__",
    "GeneratorSpec",
    "ParseError",
    "PartialLatinSquare",
    "PlacementExhaustedError",
    "generate",
    "new_empty",
    "parse",
    "serialize",
    "validate",
    "STRATEGY_NAMES",
    "HeuristicConfig",
    "SolveResult",
    "solve",
    "CensoredDataError",
    "EmpiricalDistribution",
    "dominates",
    "from_counts",
    "RunRecord",
    "RunSet",
    "collect",
    "derive_run_seeds",
    "phase_sweep",
    "to_distribution",
    "PortfolioSpec",
    "PortfolioStats",
    "efficient_frontier",
    "enumerate_portfolios",
    "portfolio_dominates",
    "portfolio_pmf",
    "portfolio_pmf_binomial",
    "portfolio_pmf_single",
    "stats",
]
