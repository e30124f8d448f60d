"""Complete backtracking search for quasigroup completion.

The search assigns one cell at a time, propagates by forward checking
(the assigned value is removed from the remaining domain of every
unassigned cell in the same row and column), and retracts on domain
wipeout.  Variable selection is First-Fail (smallest remaining domain)
with a degree-based tie-break; value selection is either ascending or a
seeded random permutation.  The four strategy names combine the two
tie-break rules with the two value orders:

    brelaz-s    prefer the tied cell sharing constraints with the MOST
                unassigned cells; try values in ascending order
    brelaz-r    same tie-break; random value order
    r-brelaz-s  prefer the tied cell sharing constraints with the FEWEST
                unassigned cells; ascending values
    r-brelaz-r  same tie-break; random value order

Ties that survive the degree rule are broken uniformly at random with
the run's seeded generator.  Randomness enters nowhere else, so a run is
a deterministic function of (square, config).

Cost accounting: ``backtracks`` counts each time a cell's candidate
values are exhausted (every value either wiped out a domain or led to a
failed subtree) and the search retracts the previous assignment.  A run
whose search never retreats costs 0 backtracks; exhausting the first
chosen cell proves infeasibility without counting a further retraction.
``nodes`` counts attempted assignments and is diagnostic only.

The RNG is consumed in a fixed order: at each new search node, first the
variable tie-break draw (only when more than one cell remains tied),
then the value shuffle (only for value_order="random").
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .latin import PartialLatinSquare, validate

TIE_BREAKS = ("brelaz", "reverse_brelaz")
VALUE_ORDERS = ("systematic", "random")

#: command-line strategy name -> (tie_break, value_order)
STRATEGY_NAMES: dict[str, tuple[str, str]] = {
    "brelaz-s": ("brelaz", "systematic"),
    "brelaz-r": ("brelaz", "random"),
    "r-brelaz-s": ("reverse_brelaz", "systematic"),
    "r-brelaz-r": ("reverse_brelaz", "random"),
}


@dataclass(frozen=True)
class HeuristicConfig:
    """One strategy instance: tie-break rule, value order, seed, cutoff.

    ``cutoff`` is the maximum number of backtracks (None = unbounded).
    A cutoff of 0 censors any run that is not decided before search
    starts.
    """

    tie_break: str = "brelaz"
    value_order: str = "systematic"
    seed: int = 0
    cutoff: int | None = None

    def __post_init__(self) -> None:
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {self.tie_break!r}")
        if self.value_order not in VALUE_ORDERS:
            raise ValueError(
                f"value_order must be one of {VALUE_ORDERS}, got {self.value_order!r}"
            )
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.cutoff is not None and (not isinstance(self.cutoff, int) or self.cutoff < 0):
            raise ValueError(f"cutoff must be None or a non-negative integer, got {self.cutoff!r}")

    @property
    def strategy_name(self) -> str:
        for name, (tb, vo) in STRATEGY_NAMES.items():
            if (tb, vo) == (self.tie_break, self.value_order):
                return name
        raise AssertionError("unreachable")

    @classmethod
    def from_name(cls, name: str, seed: int = 0, cutoff: int | None = None) -> "HeuristicConfig":
        try:
            tie_break, value_order = STRATEGY_NAMES[name]
        except KeyError:
            raise ValueError(
                f"unknown strategy {name!r}; expected one of {sorted(STRATEGY_NAMES)}"
            ) from None
        return cls(tie_break=tie_break, value_order=value_order, seed=seed, cutoff=cutoff)


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one run: sat/unsat/cutoff plus exact cost counters."""

    outcome: str  # "sat" | "unsat" | "cutoff"
    completion: PartialLatinSquare | None
    backtracks: int
    nodes: int


class SearchState:
    """Mutable search state over a flat cell indexing (cell = row*N + col).

    Remaining domains are tracked through per-row/per-column value
    bitmasks; a cell's domain is the complement of the union of its row
    and column masks.  Domain sizes are maintained incrementally, with
    cells bucketed by size (one bitset of cells per size) so First-Fail
    selection never scans the whole grid.  ``assign`` records an undo
    trail; ``undo`` must be called in LIFO order.
    """

    __slots__ = (
        "order", "full_mask", "grid", "row_mask", "col_mask",
        "row_free", "col_free", "sizes", "buckets", "unassigned_count",
        "_trail",
    )

    def __init__(self, square: PartialLatinSquare):
        n = square.order
        self.order = n
        self.full_mask = (1 << n) - 1
        self.grid = [-1] * (n * n)
        self.row_mask = [0] * n
        self.col_mask = [0] * n
        self.row_free = [n] * n
        self.col_free = [n] * n
        for r, row in enumerate(square.cells):
            for c, v in enumerate(row):
                if v is not None:
                    self.grid[r * n + c] = v
                    self.row_mask[r] |= 1 << v
                    self.col_mask[c] |= 1 << v
                    self.row_free[r] -= 1
                    self.col_free[c] -= 1
        self.sizes = [0] * (n * n)
        self.buckets = [0] * (n + 1)
        self.unassigned_count = 0
        for i in range(n * n):
            if self.grid[i] < 0:
                free = self.full_mask & ~(self.row_mask[i // n] | self.col_mask[i % n])
                s = free.bit_count()
                self.sizes[i] = s
                self.buckets[s] |= 1 << i
                self.unassigned_count += 1
        self._trail: list[tuple[int, int, list[int]]] = []

    def domain_mask(self, row: int, col: int) -> int:
        return self.full_mask & ~(self.row_mask[row] | self.col_mask[col])

    def domain_values(self, row: int, col: int) -> list[int]:
        """Remaining values for an unassigned cell, ascending."""
        m = self.domain_mask(row, col)
        values = []
        while m:
            b = m & -m
            m ^= b
            values.append(b.bit_length() - 1)
        return values

    def has_empty_domain(self) -> bool:
        return self.buckets[0] != 0

    def assign(self, row: int, col: int, value: int) -> bool:
        """Assign and forward-check; returns True iff a domain wiped out.

        The peers losing ``value`` are recorded on the trail, so a
        wipeout can be retracted with :meth:`undo` exactly like a
        completed assignment.
        """
        n = self.order
        grid = self.grid
        sizes = self.sizes
        buckets = self.buckets
        col_mask = self.col_mask
        row_mask = self.row_mask
        i0 = row * n + col
        buckets[sizes[i0]] ^= 1 << i0
        grid[i0] = value
        bit = 1 << value
        row_mask[row] |= bit
        col_mask[col] |= bit
        self.row_free[row] -= 1
        self.col_free[col] -= 1
        self.unassigned_count -= 1
        changed: list[int] = []
        wiped = False
        base = row * n
        for c2 in range(n):
            i = base + c2
            if grid[i] < 0 and not (col_mask[c2] >> value) & 1:
                s = sizes[i]
                m = 1 << i
                buckets[s] ^= m
                buckets[s - 1] |= m
                sizes[i] = s - 1
                changed.append(i)
                if s == 1:
                    wiped = True
                    break
        if not wiped:
            for r2 in range(n):
                i = r2 * n + col
                if grid[i] < 0 and not (row_mask[r2] >> value) & 1:
                    s = sizes[i]
                    m = 1 << i
                    buckets[s] ^= m
                    buckets[s - 1] |= m
                    sizes[i] = s - 1
                    changed.append(i)
                    if s == 1:
                        wiped = True
                        break
        self._trail.append((i0, value, changed))
        return wiped

    def undo(self) -> None:
        """Retract the most recent assignment (LIFO)."""
        i0, value, changed = self._trail.pop()
        n = self.order
        sizes = self.sizes
        buckets = self.buckets
        row, col = divmod(i0, n)
        bit = 1 << value
        self.row_mask[row] ^= bit
        self.col_mask[col] ^= bit
        self.row_free[row] += 1
        self.col_free[col] += 1
        self.grid[i0] = -1
        self.unassigned_count += 1
        for i in changed:
            s = sizes[i]
            m = 1 << i
            buckets[s] ^= m
            buckets[s + 1] |= m
            sizes[i] = s + 1
        buckets[sizes[i0]] |= 1 << i0

    def to_square(self) -> PartialLatinSquare:
        n = self.order
        return PartialLatinSquare(
            n,
            tuple(
                tuple(v if v >= 0 else None for v in self.grid[r * n:(r + 1) * n])
                for r in range(n)
            ),
        )


def select_variable(state: SearchState, tie_break: str, rng: random.Random) -> tuple[int, int]:
    """Pick the next cell: smallest remaining domain, degree tie-break.

    Among cells of minimal domain size, "brelaz" keeps those sharing
    constraints with the most unassigned cells (unassigned cells in the
    same row or column), "reverse_brelaz" with the fewest.  Remaining
    ties are broken uniformly at random.
    """
    n = state.order
    buckets = state.buckets
    s = 1
    while buckets[s] == 0:
        s += 1
    m = buckets[s]
    if m & (m - 1) == 0:
        i = m.bit_length() - 1
        return divmod(i, n)
    row_free = state.row_free
    col_free = state.col_free
    ties: list[int] = []
    if tie_break == "brelaz":
        best = -1
        while m:
            b = m & -m
            m ^= b
            i = b.bit_length() - 1
            d = row_free[i // n] + col_free[i % n]
            if d > best:
                best = d
                ties = [i]
            elif d == best:
                ties.append(i)
    else:
        best = 1 << 30
        while m:
            b = m & -m
            m ^= b
            i = b.bit_length() - 1
            d = row_free[i // n] + col_free[i % n]
            if d < best:
                best = d
                ties = [i]
            elif d == best:
                ties.append(i)
    if len(ties) > 1:
        i = ties[rng.randrange(len(ties))]
    else:
        i = ties[0]
    return divmod(i, n)


def order_values(
    state: SearchState, cell: tuple[int, int], value_order: str, rng: random.Random
) -> list[int]:
    """Candidate values for ``cell``: ascending, or a seeded random shuffle."""
    values = state.domain_values(*cell)
    if value_order == "random":
        rng.shuffle(values)
    return values


def solve(square: PartialLatinSquare, config: HeuristicConfig) -> SolveResult:
    """Run the complete search; deterministic in (square, config).

    Returns sat with a verified completion, unsat only after exhausting
    the search space, or cutoff with ``backtracks == config.cutoff``.
    """
    violations = validate(square)
    if violations:
        raise ValueError("invalid square: " + "; ".join(violations))
    state = SearchState(square)
    if state.unassigned_count == 0:
        return SolveResult("sat", square, 0, 0)
    if state.has_empty_domain():
        return SolveResult("unsat", None, 0, 0)
    cutoff = config.cutoff
    if cutoff == 0:
        return SolveResult("cutoff", None, 0, 0)
    rng = random.Random(config.seed)
    tie_break = config.tie_break
    value_order = config.value_order
    assign = state.assign
    undo = state.undo
    backtracks = 0
    nodes = 0
    cell = select_variable(state, tie_break, rng)
    frames: list[list] = [[cell, order_values(state, cell, value_order, rng), 0]]
    while frames:
        frame = frames[-1]
        cell, values, idx = frame
        advanced = False
        while idx < len(values):
            v = values[idx]
            idx += 1
            nodes += 1
            if assign(cell[0], cell[1], v):
                undo()
                continue
            frame[2] = idx
            if state.unassigned_count == 0:
                return SolveResult("sat", state.to_square(), backtracks, nodes)
            nxt = select_variable(state, tie_break, rng)
            frames.append([nxt, order_values(state, nxt, value_order, rng), 0])
            advanced = True
            break
        if advanced:
            continue
        frames.pop()
        if frames:
            backtracks += 1
            if cutoff is not None and backtracks >= cutoff:
                return SolveResult("cutoff", None, backtracks, nodes)
            undo()
    return SolveResult("unsat", backtracks=backtracks, nodes=nodes, completion=None)
