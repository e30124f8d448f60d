"""Partial Latin squares: the problem instances.

A partial Latin square of order N is an N x N grid whose cells are either
empty or hold a value from {0, ..., N-1}, with no value repeated within a
row or a column.  Completing such a grid to a full Latin square is the
search problem the rest of this package studies.

Two interchange formats are supported:

* a plain text format (``serialize`` / ``parse``)::

      order 3
      0 . 2
      . . .
      2 . 1

  Line 1 is ``order N``; then N rows of N whitespace-separated tokens,
  each a decimal value in ``[0, N-1]`` or ``.`` for an empty cell.

* a JSON object format (``to_json_dict`` / ``from_json_dict``) carrying
  the same grid plus, optionally, the generator spec it came from.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA_SQUARE = "latin-square@1"

# Fill fractions given as floats are snapped to the nearest rational with
# denominator <= 10**6 before computing the target cell count, so that e.g.
# fill 0.43 at order 10 targets exactly 43 cells rather than ceil(43.0000...04).
_FILL_DENOMINATOR_LIMIT = 10**6


class PlacementExhaustedError(RuntimeError):
    """Raised when generation runs out of placeable cells before the target."""


class ParseError(ValueError):
    """Raised for malformed instance text; message includes a line number."""


@dataclass(frozen=True)
class PartialLatinSquare:
    """An order-N grid; each cell is a value in {0,...,N-1} or None (empty).

    Construction rejects malformed dimensions and non-integer entries.
    Row/column duplicates and out-of-range values are reported by
    :func:`validate` rather than rejected here, so that invalid grids can
    be inspected and diagnosed.
    """

    order: int
    cells: tuple[tuple[int | None, ...], ...]

    def __post_init__(self) -> None:
        if not isinstance(self.order, int) or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        if len(self.cells) != self.order:
            raise ValueError(
                f"expected {self.order} rows, got {len(self.cells)}"
            )
        rows = []
        for r, row in enumerate(self.cells):
            if len(row) != self.order:
                raise ValueError(
                    f"row {r}: expected {self.order} cells, got {len(row)}"
                )
            rows.append(
                tuple(None if v is None else int(v) for v in row)
            )
        object.__setattr__(self, "cells", tuple(rows))

    @property
    def filled_count(self) -> int:
        return sum(v is not None for row in self.cells for v in row)

    def is_complete(self) -> bool:
        return self.filled_count == self.order * self.order

    def with_cell(self, row: int, col: int, value: int | None) -> "PartialLatinSquare":
        """Return a copy with one cell replaced."""
        cells = [list(r) for r in self.cells]
        cells[row][col] = value
        return PartialLatinSquare(self.order, tuple(tuple(r) for r in cells))


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for random instance generation.

    ``fill_fraction`` is the fraction of the N^2 cells to pre-assign; the
    target count is ceil(fill_fraction * N^2).  Generation is a pure
    function of (order, fill_fraction, seed).
    """

    order: int
    fill_fraction: float
    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.order, int) or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        frac = float(self.fill_fraction)
        if not 0.0 <= frac <= 1.0:
            raise ValueError(f"fill_fraction must lie in [0, 1], got {frac}")
        object.__setattr__(self, "fill_fraction", frac)
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")

    @property
    def target_filled(self) -> int:
        frac = Fraction(self.fill_fraction).limit_denominator(_FILL_DENOMINATOR_LIMIT)
        return math.ceil(frac * self.order * self.order)


def new_empty(order: int) -> PartialLatinSquare:
    """Return an order x order square with every cell empty."""
    if not isinstance(order, int) or order < 1:
        raise ValueError(f"order must be a positive integer, got {order!r}")
    row = (None,) * order
    return PartialLatinSquare(order, (row,) * order)


def validate(square: PartialLatinSquare) -> list[str]:
    """Return a list of constraint violations; empty iff the square is valid.

    Each violation names the offending row or column and the duplicated
    value, or the cell holding an out-of-range value.
    """
    n = square.order
    violations: list[str] = []
    for r, row in enumerate(square.cells):
        for c, v in enumerate(row):
            if v is not None and not 0 <= v < n:
                violations.append(f"cell ({r},{c}): value {v} out of range [0,{n - 1}]")
    for r, row in enumerate(square.cells):
        seen: dict[int, int] = {}
        for v in row:
            if v is not None:
                seen[v] = seen.get(v, 0) + 1
        for v, k in sorted(seen.items()):
            if k > 1:
                violations.append(f"row {r}: value {v} appears {k} times")
    for c in range(n):
        seen = {}
        for r in range(n):
            v = square.cells[r][c]
            if v is not None:
                seen[v] = seen.get(v, 0) + 1
        for v, k in sorted(seen.items()):
            if k > 1:
                violations.append(f"column {c}: value {v} appears {k} times")
    return violations


def generate(spec: GeneratorSpec) -> PartialLatinSquare:
    """Generate a random valid partial Latin square from ``spec``.

    Repeatedly picks a uniformly random cell from the pool of candidate
    cells, then a uniformly random value among those consistent with the
    cell's row and column.  A cell with no consistent value is dropped
    from the pool and the draw repeated.  Raises
    :class:`PlacementExhaustedError` if the pool empties before the
    target count is reached (possible at high fill fractions).

    No completability filter is applied: the output may or may not extend
    to a full Latin square.
    """
    n = spec.order
    target = spec.target_filled
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    grid: list[list[int | None]] = [[None] * n for _ in range(n)]
    row_used: list[set[int]] = [set() for _ in range(n)]
    col_used: list[set[int]] = [set() for _ in range(n)]
    pool = [(r, c) for r in range(n) for c in range(n)]
    placed = 0
    while placed < target:
        if not pool:
            raise PlacementExhaustedError(
                f"placed {placed} of {target} cells before running out of "
                f"consistent placements (order {n}, fill {spec.fill_fraction})"
            )
        idx = int(rng.integers(len(pool)))
        r, c = pool[idx]
        candidates = [v for v in range(n) if v not in row_used[r] and v not in col_used[c]]
        if not candidates:
            pool[idx] = pool[-1]
            pool.pop()
            continue
        v = candidates[int(rng.integers(len(candidates)))]
        grid[r][c] = v
        row_used[r].add(v)
        col_used[c].add(v)
        pool[idx] = pool[-1]
        pool.pop()
        placed += 1
    return PartialLatinSquare(n, tuple(tuple(row) for row in grid))


def serialize(square: PartialLatinSquare) -> str:
    """Render the text format; single spaces between tokens, trailing newline."""
    lines = [f"order {square.order}"]
    for row in square.cells:
        lines.append(" ".join("." if v is None else str(v) for v in row))
    return "\n".join(lines) + "\n"


def parse(text: str) -> PartialLatinSquare:
    """Parse the text format back into a square.

    Rejects malformed headers, wrong token counts, out-of-range values,
    and grids that violate row/column uniqueness.  Error messages carry
    1-based line numbers.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError("line 1: empty input, expected 'order N' header")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "order":
        raise ParseError(f"line 1: expected 'order N' header, got {lines[0]!r}")
    try:
        n = int(header[1])
    except ValueError:
        raise ParseError(f"line 1: order {header[1]!r} is not an integer") from None
    if n < 1:
        raise ParseError(f"line 1: order must be positive, got {n}")
    if len(lines) < 1 + n:
        raise ParseError(
            f"line {len(lines) + 1}: expected {n} grid rows, found {len(lines) - 1}"
        )
    extra = [i for i in range(1 + n, len(lines)) if lines[i].strip()]
    if extra:
        raise ParseError(f"line {extra[0] + 1}: unexpected content after grid")
    rows: list[tuple[int | None, ...]] = []
    for r in range(n):
        lineno = r + 2
        tokens = lines[r + 1].split()
        if len(tokens) != n:
            raise ParseError(
                f"line {lineno}: expected {n} tokens, got {len(tokens)}"
            )
        row: list[int | None] = []
        for tok in tokens:
            if tok == ".":
                row.append(None)
                continue
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(
                    f"line {lineno}: token {tok!r} is neither a value nor '.'"
                ) from None
            if not 0 <= v < n:
                raise ParseError(
                    f"line {lineno}: value {v} out of range [0,{n - 1}]"
                )
            row.append(v)
        rows.append(tuple(row))
    square = PartialLatinSquare(n, tuple(rows))
    violations = validate(square)
    if violations:
        raise ParseError("grid violates uniqueness: " + "; ".join(violations))
    return square


def to_json_dict(
    square: PartialLatinSquare, generator: GeneratorSpec | None = None
) -> dict:
    """JSON-ready dict with the grid and, optionally, its generator spec."""
    doc: dict = {
        "schema": SCHEMA_SQUARE,
        "order": square.order,
        "cells": [list(row) for row in square.cells],
    }
    if generator is not None:
        doc["generator"] = {
            "order": generator.order,
            "fill_fraction": generator.fill_fraction,
            "seed": generator.seed,
        }
    return doc


def from_json_dict(doc: dict) -> tuple[PartialLatinSquare, GeneratorSpec | None]:
    if doc.get("schema") != SCHEMA_SQUARE:
        raise ValueError(f"unexpected schema {doc.get('schema')!r}")
    cells = tuple(
        tuple(None if v is None else int(v) for v in row) for row in doc["cells"]
    )
    square = PartialLatinSquare(int(doc["order"]), cells)
    violations = validate(square)
    if violations:
        raise ValueError("grid violates uniqueness: " + "; ".join(violations))
    gen = None
    if doc.get("generator") is not None:
        g = doc["generator"]
        gen = GeneratorSpec(int(g["order"]), float(g["fill_fraction"]), int(g["seed"]))
    return square, gen


def save(path: str | Path, square: PartialLatinSquare,
         generator: GeneratorSpec | None = None) -> None:
    Path(path).write_text(
        json.dumps(to_json_dict(square, generator), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load(path: str | Path) -> tuple[PartialLatinSquare, GeneratorSpec | None]:
    return from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))
