"""Empirical distributions of backtrack counts.

A distribution is a finite probability mass function over non-negative
integer backtrack counts, plus an explicit ``censored_mass`` holding the
probability of runs that exceeded their cutoff.  Censored mass lives in
the survival tail: the cdf below the cutoff is exact, but nothing is
known about where the censored runs would have landed.  Operations that
need the full law (mean, std, strict dominance) therefore refuse
censored input instead of guessing.

Quantiles use inverse-cdf lower interpolation: ``quantile(q)`` is the
smallest support point whose cdf reaches ``q``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

SCHEMA_DISTRIBUTION = "distribution@1"

_MASS_TOLERANCE = 1e-9
_PROB_EPSILON = 1e-12


class CensoredDataError(ValueError):
    """An operation required more of the distribution than was observed."""


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Probability mass on integer backtrack counts, with censoring.

    support entries are strictly ascending non-negative integers; pmf is
    aligned with support; ``sum(pmf) + censored_mass == 1`` within 1e-9.
    An empty support is only allowed when everything was censored.
    """

    support: tuple[int, ...]
    pmf: tuple[float, ...]
    censored_mass: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        support = tuple(int(x) for x in self.support)
        pmf = tuple(float(p) for p in self.pmf)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "censored_mass", float(self.censored_mass))
        if len(support) != len(pmf):
            raise ValueError(
                f"support has {len(support)} points but pmf has {len(pmf)}"
            )
        for x in support:
            if x < 0:
                raise ValueError(f"negative support point {x}")
        for a, b in zip(support, support[1:]):
            if a >= b:
                raise ValueError("support must be strictly ascending")
        for p in pmf:
            if p < -_PROB_EPSILON:
                raise ValueError(f"negative pmf entry {p}")
        if not -_PROB_EPSILON <= self.censored_mass <= 1 + _PROB_EPSILON:
            raise ValueError(f"censored_mass {self.censored_mass} outside [0, 1]")
        total = math.fsum(pmf) + self.censored_mass
        if abs(total - 1.0) > _MASS_TOLERANCE:
            raise ValueError(f"total mass {total} is not 1 within {_MASS_TOLERANCE}")
        if not support and self.censored_mass < 1 - _MASS_TOLERANCE:
            raise ValueError("empty support requires censored_mass == 1")

    @property
    def is_censored(self) -> bool:
        return self.censored_mass > _PROB_EPSILON

    def cdf(self, x: int) -> float:
        """P[X <= x]."""
        if x < 0:
            raise ValueError("backtrack counts are non-negative")
        total = 0.0
        for s, p in zip(self.support, self.pmf):
            if s > x:
                break
            total += p
        return total

    def survival(self, x: int) -> float:
        """P[X > x]; censored mass always counts as 'greater'."""
        return 1.0 - self.cdf(x)

    def cdf_values(self) -> tuple[float, ...]:
        """Cumulative probabilities aligned with the support."""
        out = []
        acc = 0.0
        for p in self.pmf:
            acc += p
            out.append(acc)
        return tuple(out)

    def mean(self) -> float:
        if self.is_censored:
            raise CensoredDataError(
                f"mean undefined with censored_mass={self.censored_mass:.6g}"
            )
        return math.fsum(x * p for x, p in zip(self.support, self.pmf))

    def std(self) -> float:
        """Population standard deviation."""
        m = self.mean()
        var = math.fsum(p * (x - m) ** 2 for x, p in zip(self.support, self.pmf))
        return math.sqrt(max(var, 0.0))

    def quantile(self, q: float) -> int:
        """Smallest support point x with cdf(x) >= q (lower interpolation)."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile level {q} outside [0, 1]")
        if q > 1.0 - self.censored_mass + _MASS_TOLERANCE:
            raise CensoredDataError(
                f"quantile {q} lies in the censored tail "
                f"(censored_mass={self.censored_mass:.6g})"
            )
        acc = 0.0
        for x, p in zip(self.support, self.pmf):
            acc += p
            if acc >= q - _MASS_TOLERANCE:
                return x
        return self.support[-1]

    def median(self) -> int:
        if self.censored_mass >= 0.5:
            raise CensoredDataError(
                f"median undefined with censored_mass={self.censored_mass:.6g}"
            )
        return self.quantile(0.5)

    def summary(self) -> dict:
        """Descriptive statistics; mean/std are omitted under censoring."""
        out: dict = {}
        if not self.is_censored:
            out["mean"] = self.mean()
            out["std"] = self.std()
        if self.censored_mass < 0.5:
            out["median"] = self.median()
            out["quantiles"] = {
                q: self.quantile(q)
                for q in (0.25, 0.5, 0.75, 0.9, 0.99)
                if q <= 1.0 - self.censored_mass + _MASS_TOLERANCE
            }
        out["censored_mass"] = self.censored_mass
        return out

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_DISTRIBUTION,
            "support": list(self.support),
            "pmf": list(self.pmf),
            "censored_mass": self.censored_mass,
            "metadata": self.metadata,
        }

    def to_csv(self, path: str | Path) -> None:
        """Write x, pmf, cdf rows for plotting."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "pmf", "cdf"])
            acc = 0.0
            for x, p in zip(self.support, self.pmf):
                acc += p
                writer.writerow([x, repr(p), repr(acc)])


def from_counts(
    counts: Mapping[int, int],
    censored: int = 0,
    metadata: dict | None = None,
) -> EmpiricalDistribution:
    """Build a distribution from observed backtrack counts.

    ``counts`` maps backtrack count -> number of runs; ``censored`` is the
    number of runs that hit the cutoff.
    """
    total = sum(counts.values()) + censored
    if total <= 0:
        raise ValueError("cannot build a distribution from zero runs")
    support = tuple(sorted(counts))
    pmf = tuple(counts[x] / total for x in support)
    return EmpiricalDistribution(
        support=support,
        pmf=pmf,
        censored_mass=censored / total,
        metadata=metadata or {},
    )


def from_json_dict(payload: dict) -> EmpiricalDistribution:
    schema = payload.get("schema")
    if schema != SCHEMA_DISTRIBUTION:
        raise ValueError(f"expected schema {SCHEMA_DISTRIBUTION!r}, got {schema!r}")
    return EmpiricalDistribution(
        support=tuple(payload["support"]),
        pmf=tuple(payload["pmf"]),
        censored_mass=payload.get("censored_mass", 0.0),
        metadata=payload.get("metadata", {}),
    )


def save(dist: EmpiricalDistribution, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(dist.to_json_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load(path: str | Path) -> EmpiricalDistribution:
    return from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def union_support(dists: Iterable[EmpiricalDistribution]) -> tuple[int, ...]:
    points: set[int] = set()
    for d in dists:
        points.update(d.support)
    return tuple(sorted(points))


def dominates(
    a: EmpiricalDistribution,
    b: EmpiricalDistribution,
    censored_threshold: float = 0.0,
) -> bool:
    """First-order stochastic dominance of a over b (smaller cost is better).

    True iff cdf_a(x) >= cdf_b(x) at every x in the union of supports and
    the inequality is strict somewhere.  Censored mass above the threshold
    makes the comparison unverifiable and raises CensoredDataError.
    """
    for name, d in (("first", a), ("second", b)):
        if d.censored_mass > censored_threshold + _PROB_EPSILON:
            raise CensoredDataError(
                f"{name} distribution has censored_mass="
                f"{d.censored_mass:.6g} above threshold {censored_threshold}"
            )
    strict = False
    for x in union_support((a, b)):
        ca, cb = a.cdf(x), b.cdf(x)
        if ca < cb - _PROB_EPSILON:
            return False
        if ca > cb + _PROB_EPSILON:
            strict = True
    return strict
