"""Exact runtime law of a portfolio of independent solver runs.

A portfolio runs n_1 copies of strategy A_1, ..., n_M copies of A_M in
parallel and stops when the first copy finishes, so its cost X is the
minimum of N = sum(n_i) independent draws.  Two equivalent computations
are provided:

* ``portfolio_pmf`` — the survival-product form
  P[X > x] = prod_i P[A_i > x]^{n_i}, differenced over the union
  support.  This is the default path.
* ``portfolio_pmf_binomial`` — the binomial expansion summing, for each
  x, over how many copies of each strategy finish exactly at x (at
  least one overall) while the rest take longer.  Kept as an
  independent cross-check; the two agree to ~1e-12.

All component distributions must be censoring-free: a censored tail
makes the law of the minimum (and its mean) undefined.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np

from .distributions import (
    CensoredDataError,
    EmpiricalDistribution,
    dominates,
    union_support,
)

_PROB_EPSILON = 1e-12


@dataclass(frozen=True)
class PortfolioSpec:
    """Components (distribution, processor count) of one portfolio."""

    components: tuple[tuple[EmpiricalDistribution, int], ...]

    def __post_init__(self) -> None:
        components = tuple((d, int(n)) for d, n in self.components)
        object.__setattr__(self, "components", components)
        if not components:
            raise ValueError("a portfolio needs at least one component")
        for k, (dist, n) in enumerate(components):
            if n < 1:
                raise ValueError(f"component {k} has non-positive processors {n}")
            if dist.censored_mass > _PROB_EPSILON:
                raise CensoredDataError(
                    f"component {k} has censored_mass="
                    f"{dist.censored_mass:.6g}; portfolio laws need full "
                    "distributions"
                )

    @property
    def total_processors(self) -> int:
        return sum(n for _, n in self.components)


@dataclass(frozen=True)
class PortfolioStats:
    pmf: EmpiricalDistribution
    mean: float
    std: float


def _survival_matrix(
    spec: PortfolioSpec, xs: Sequence[int]
) -> np.ndarray:
    """Rows: components; columns: P[A_i > x] at each union support point."""
    xs_arr = np.asarray(xs)
    rows = []
    for dist, _ in spec.components:
        support = np.asarray(dist.support)
        cdf = np.concatenate(([0.0], np.asarray(dist.cdf_values())))
        idx = np.searchsorted(support, xs_arr, side="right")
        rows.append(1.0 - cdf[idx])
    return np.vstack(rows)


def portfolio_pmf(spec: PortfolioSpec) -> EmpiricalDistribution:
    """Law of the minimum across all processors (survival-product form)."""
    xs = union_support(d for d, _ in spec.components)
    survival = _survival_matrix(spec, xs)
    powers = np.array([n for _, n in spec.components], dtype=float)
    joint_survival = np.prod(survival ** powers[:, None], axis=0)
    upper = np.concatenate(([1.0], joint_survival[:-1]))
    pmf = upper - joint_survival
    return EmpiricalDistribution(
        support=xs,
        pmf=tuple(float(p) for p in pmf),
        censored_mass=0.0,
        metadata={"allocation": [n for _, n in spec.components]},
    )


def portfolio_pmf_single(dist: EmpiricalDistribution, processors: int) -> EmpiricalDistribution:
    """Law of the minimum of ``processors`` copies of one strategy."""
    if processors < 1:
        raise ValueError("processors must be >= 1")
    return portfolio_pmf(PortfolioSpec(components=((dist, processors),)))


def _point_mass_terms(dist: EmpiricalDistribution, x: int) -> tuple[float, float]:
    """(P[A = x], P[A > x]) for one component at one support point."""
    p_eq = 0.0
    for s, p in zip(dist.support, dist.pmf):
        if s == x:
            p_eq = p
            break
        if s > x:
            break
    return p_eq, dist.survival(x)


def portfolio_pmf_binomial(spec: PortfolioSpec) -> EmpiricalDistribution:
    """Binomial-expansion form of the portfolio law.

    For one component this is the single sum over i = 1..N of
    C(N, i) * P[A=x]^i * P[A>x]^(N-i); for two components the double sum
    over i and i' with i'' = i - i' (terms with i'' outside 0..n2 are
    zero); for M components the sum over all per-strategy finish counts
    with at least one finisher.  Binomial coefficients are exact
    integers; only the final products are floating point.
    """
    xs = union_support(d for d, _ in spec.components)
    dists = [d for d, _ in spec.components]
    counts = [n for _, n in spec.components]
    pmf = []
    for x in xs:
        terms = [_point_mass_terms(d, x) for d in dists]
        if len(counts) == 1:
            (p_eq, p_gt), n = terms[0], counts[0]
            prob = math.fsum(
                math.comb(n, i) * p_eq**i * p_gt ** (n - i)
                for i in range(1, n + 1)
            )
        elif len(counts) == 2:
            (p1, s1), (p2, s2) = terms
            n1, n2 = counts
            total = n1 + n2
            parts = []
            for i in range(1, total + 1):
                for i_prime in range(0, i + 1):
                    i_second = i - i_prime
                    if i_prime > n1 or i_second < 0 or i_second > n2:
                        continue
                    parts.append(
                        math.comb(n1, i_prime)
                        * p1**i_prime
                        * s1 ** (n1 - i_prime)
                        * math.comb(n2, i_second)
                        * p2**i_second
                        * s2 ** (n2 - i_second)
                    )
            prob = math.fsum(parts)
        else:
            parts = []
            for finishes in product(*(range(n + 1) for n in counts)):
                if sum(finishes) < 1:
                    continue
                term = 1.0
                for (p_eq, p_gt), n, i in zip(terms, counts, finishes):
                    term *= math.comb(n, i) * p_eq**i * p_gt ** (n - i)
                parts.append(term)
            prob = math.fsum(parts)
        pmf.append(prob)
    return EmpiricalDistribution(
        support=xs,
        pmf=tuple(pmf),
        censored_mass=0.0,
        metadata={"allocation": list(counts)},
    )


def stats(pmf: EmpiricalDistribution) -> PortfolioStats:
    """Mean and population standard deviation of a portfolio law."""
    return PortfolioStats(pmf=pmf, mean=pmf.mean(), std=pmf.std())


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``, lex order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def enumerate_portfolios(
    dists: Sequence[EmpiricalDistribution], processors: int
) -> list[tuple[tuple[int, ...], PortfolioStats]]:
    """Evaluate every allocation of ``processors`` across ``dists``.

    Returns C(N+M-1, M-1) entries (allocation, stats) in lexicographic
    allocation order.
    """
    if not dists:
        raise ValueError("need at least one distribution")
    if processors < 1:
        raise ValueError("processors must be >= 1")
    out = []
    for allocation in _compositions(processors, len(dists)):
        components = tuple(
            (dist, n) for dist, n in zip(dists, allocation) if n > 0
        )
        law = portfolio_pmf(PortfolioSpec(components=components))
        law = EmpiricalDistribution(
            support=law.support,
            pmf=law.pmf,
            censored_mass=0.0,
            metadata={"allocation": list(allocation)},
        )
        out.append((allocation, stats(law)))
    return out


def efficient_frontier(
    portfolios: Sequence[tuple[tuple[int, ...], PortfolioStats]],
) -> list[tuple[tuple[int, ...], PortfolioStats]]:
    """Allocations not coordinate-wise dominated in (mean, std).

    q dominates p when mean(q) <= mean(p) and std(q) <= std(p) with at
    least one strict inequality; exact (mean, std) ties are all kept.
    """
    if not portfolios:
        raise ValueError("portfolio list is empty")
    out = []
    for alloc_p, stats_p in portfolios:
        dominated = False
        for alloc_q, stats_q in portfolios:
            if alloc_q == alloc_p:
                continue
            if (
                stats_q.mean <= stats_p.mean
                and stats_q.std <= stats_p.std
                and (stats_q.mean < stats_p.mean or stats_q.std < stats_p.std)
            ):
                dominated = True
                break
        if not dominated:
            out.append((alloc_p, stats_p))
    return out


def portfolio_dominates(
    a: EmpiricalDistribution,
    b: EmpiricalDistribution,
    censored_threshold: float = 0.0,
) -> bool:
    """Stochastic dominance between two portfolio laws."""
    return dominates(a, b, censored_threshold=censored_threshold)


def write_allocations_csv(
    portfolios: Sequence[tuple[tuple[int, ...], PortfolioStats]],
    path: str | Path,
) -> None:
    """CSV of every allocation with its stats and frontier membership."""
    if not portfolios:
        raise ValueError("portfolio list is empty")
    frontier = {alloc for alloc, _ in efficient_frontier(portfolios)}
    width = len(portfolios[0][0])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [f"n{k + 1}" for k in range(width)] + ["mean", "std", "on_frontier"]
        )
        for alloc, st in portfolios:
            writer.writerow(
                list(alloc)
                + [repr(st.mean), repr(st.std), 1 if alloc in frontier else 0]
            )
