"""Parametrized fat Cantor sets on [0, 1] with certified measure queries.

Two removal schedules are supported, both with *absolute* removal lengths:

* ``ternary``: step ``n`` removes an open middle of length ``3**-n`` from each
  of the ``2**(n-1)`` current components. This is the classical Cantor set.
* ``geometric(c, k)``: step ``n`` removes an open middle of length
  ``k * c**n / 4**(n-1)`` from each component, with ``0 < c < 1`` and
  ``0 < k <= 1/4``. The limit set has measure ``1 - k*c / (1 - c/2)``.

The schedule with removed length ``c**n / 4**n`` is the ``k = 1/4`` case of the
geometric schedule, since ``c**n / 4**n == (1/4) * c**n / 4**(n-1)``.

Every component of the depth ``d`` truncation has the same length ``L_d``, and
the construction is self-similar, so nothing here needs to materialize the
``2**d`` components unless a caller asks for them explicitly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple

from .exactnum import (
    Bracket,
    DisjointIntervalSet,
    Interval,
    ScalarLike,
    from_pair,
    scalar,
    to_pair,
)

TERNARY = "ternary"
GEOMETRIC = "geometric"

UNIT = Interval(Fraction(0), Fraction(1))

# 2**22 components is already ~4M Fractions; deeper sets are queried lazily
MAX_MATERIALIZED_DEPTH = 22


class InfeasibleScheduleError(ValueError):
    """A removal step would delete at least a whole component."""


@dataclass(frozen=True)
class FatCantorParams:
    schedule: str
    c: Optional[Fraction] = None
    k: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.schedule == TERNARY:
            if self.c is not None or self.k is not None:
                raise ValueError("ternary schedule takes no c/k parameters")
            return
        if self.schedule != GEOMETRIC:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.c is None or self.k is None:
            raise ValueError("geometric schedule needs both c and k")
        c, k = scalar(self.c), scalar(self.k)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "k", k)
        if not 0 < c < 1:
            raise ValueError(f"need 0 < c < 1, got c = {c}")
        if not 0 < k <= Fraction(1, 4):
            raise ValueError(f"need 0 < k <= 1/4, got k = {k}")

    @classmethod
    def ternary(cls) -> FatCantorParams:
        return cls(TERNARY)

    @classmethod
    def geometric(cls, c: ScalarLike, k: ScalarLike = Fraction(1, 4)) -> FatCantorParams:
        return cls(GEOMETRIC, scalar(c), scalar(k))

    def removed_length(self, n: int) -> Fraction:
        """Length of each open middle removed at step ``n >= 1``."""
        if n < 1:
            raise ValueError("steps are numbered from 1")
        if self.schedule == TERNARY:
            return Fraction(1, 3**n)
        assert self.c is not None and self.k is not None
        return self.k * self.c**n / 4 ** (n - 1)

    def limit_measure(self) -> Fraction:
        """Exact Lebesgue measure of the limit set."""
        if self.schedule == TERNARY:
            return Fraction(0)
        assert self.c is not None and self.k is not None
        return 1 - self.k * self.c / (1 - self.c / 2)

    def tail(self, depth: int) -> Fraction:
        """Measure still to be removed after ``depth`` steps."""
        if depth < 0:
            raise ValueError("depth must be non-negative")
        if self.schedule == TERNARY:
            return Fraction(2, 3) ** depth
        assert self.c is not None and self.k is not None
        ratio = self.c / 2
        return self.k * self.c * ratio**depth / (1 - ratio)

    def depth_for_width(self, width: ScalarLike, min_depth: int = 1) -> int:
        """Smallest depth ``>= min_depth`` whose tail is at most ``width``."""
        width = scalar(width)
        if width <= 0:
            raise ValueError("bracket width target must be positive")
        d = max(1, min_depth)
        while self.tail(d) > width:
            d += 1
        return d

    def to_json(self) -> dict:
        return {
            "schedule": self.schedule,
            "c": to_pair(self.c) if self.c is not None else None,
            "k": to_pair(self.k) if self.k is not None else None,
        }


@dataclass(frozen=True)
class FatCantorSet:
    """Depth ``depth`` truncation ``C_depth`` of a fat Cantor set ``C``.

    ``lengths[n]`` is the common component length after ``n`` steps and
    ``tail == measure(C_depth) - measure(C)``.
    """

    params: FatCantorParams
    depth: int
    lengths: Tuple[Fraction, ...] = field(repr=False)
    tail: Fraction

    @property
    def component_length(self) -> Fraction:
        return self.lengths[-1]

    @property
    def component_count(self) -> int:
        return 2**self.depth

    def truncation_measure(self) -> Fraction:
        return self.component_count * self.component_length

    def limit_measure(self) -> Fraction:
        return self.params.limit_measure()

    def limit_mass_per_component(self, level: int) -> Fraction:
        """Exact measure of ``C`` inside any single level-``level`` component."""
        return self.limit_measure() / 2**level

    @functools.cached_property
    def truncation(self) -> DisjointIntervalSet:
        if self.depth > MAX_MATERIALIZED_DEPTH:
            raise ValueError(
                f"refusing to materialize 2**{self.depth} components "
                f"(limit depth {MAX_MATERIALIZED_DEPTH})"
            )
        lefts = [Fraction(0)]
        for n in range(1, self.depth + 1):
            shift = self.lengths[n - 1] - self.lengths[n]
            lefts = [x for left in lefts for x in (left, left + shift)]
        width = self.component_length
        comps = tuple(Interval(x, x + width) for x in lefts)
        return DisjointIntervalSet._trusted(comps)

    def gap_at_level(self, n: int) -> Interval:
        """The leftmost open middle removed at step ``n``, returned as its closure."""
        if not 1 <= n <= self.depth:
            raise ValueError(f"step {n} outside 1..{self.depth}")
        lo = self.lengths[n]
        return Interval(lo, lo + self.params.removed_length(n))

    def cumulative(self, t: Fraction) -> Fraction:
        """``measure(C_depth ∩ [0, t])`` in ``O(depth)`` exact steps."""
        t = scalar(t)
        if t <= 0:
            return Fraction(0)
        if t >= 1:
            return self.truncation_measure()
        x = Fraction(0)
        acc = Fraction(0)
        leaf = self.component_length
        for n in range(1, self.depth + 1):
            half = self.lengths[n]
            if t <= x + half:
                continue
            child_mass = 2 ** (self.depth - n) * leaf
            right = x + self.lengths[n - 1] - half
            acc += child_mass
            if t < right:
                return acc
            x = right
        return acc + min(t - x, leaf)

    def truncation_measure_in(self, window: Interval) -> Fraction:
        return self.cumulative(window.hi) - self.cumulative(window.lo)

    def measure_in(self, window: Interval) -> Bracket:
        return measure_in(self, window)

    def components_in(self, window: Interval, level: Optional[int] = None) -> Iterator[Tuple[int, Interval]]:
        """Yield ``(index, component)`` for level-``level`` components meeting ``window``.

        ``index`` counts components from the left, so exactly ``index``
        components of that level lie to the left of the yielded one.
        """
        level = self.depth if level is None else level
        if not 0 <= level <= self.depth:
            raise ValueError(f"level {level} outside 0..{self.depth}")
        stack = [(0, Fraction(0), 0)]
        while stack:
            n, x, idx = stack.pop()
            length = self.lengths[n]
            if x > window.hi or x + length < window.lo:
                continue
            if n == level:
                yield idx, Interval(x, x + length)
                continue
            shift = length - self.lengths[n + 1]
            # right child pushed first so the left one pops first
            stack.append((n + 1, x + shift, 2 * idx + 1))
            stack.append((n + 1, x, 2 * idx))

    def to_json(self, include_components: bool = True) -> dict:
        doc = self.params.to_json()
        doc["depth"] = self.depth
        if include_components:
            doc["components"] = [
                [iv.lo.numerator, iv.lo.denominator, iv.hi.numerator, iv.hi.denominator]
                for iv in self.truncation
            ]
        doc["tail"] = to_pair(self.tail)
        return doc


def build(params: FatCantorParams, depth: int) -> FatCantorSet:
    if depth < 1:
        raise ValueError(f"depth must be a positive integer, got {depth}")
    lengths = [Fraction(1)]
    for n in range(1, depth + 1):
        removed = params.removed_length(n)
        current = lengths[-1]
        if not 0 < removed < current:
            raise InfeasibleScheduleError(
                f"step {n}: removing {removed} from components of length {current}"
            )
        lengths.append((current - removed) / 2)
    return FatCantorSet(params, depth, tuple(lengths), params.tail(depth))


def build_for_width(params: FatCantorParams, width: ScalarLike) -> FatCantorSet:
    return build(params, params.depth_for_width(width))


def refine(cset: FatCantorSet, extra_depth: int) -> FatCantorSet:
    if extra_depth < 1:
        raise ValueError("extra_depth must be a positive integer")
    return build(cset.params, cset.depth + extra_depth)


def measure_in(cset: FatCantorSet, window: Interval) -> Bracket:
    """Bracket for ``measure(C ∩ window)``: ``[hi - tail, hi]`` with ``hi`` from ``C_depth``."""
    if not UNIT.contains_interval(window):
        raise ValueError(f"window {window} is not inside [0, 1]")
    hi = cset.truncation_measure_in(window)
    return Bracket(hi - cset.tail, hi)


def from_json(doc: dict) -> FatCantorSet:
    schedule = doc["schedule"]
    if schedule == TERNARY:
        params = FatCantorParams.ternary()
    else:
        params = FatCantorParams.geometric(from_pair(doc["c"]), from_pair(doc["k"]))
    cset = build(params, int(doc["depth"]))
    if "tail" in doc and from_pair(doc["tail"]) != cset.tail:
        raise ValueError("serialized tail disagrees with the closed form")
    if "components" in doc:
        comps = [
            Interval(Fraction(a, b), Fraction(c, d)) for a, b, c, d in doc["components"]
        ]
        if tuple(comps) != cset.truncation.components:
            raise ValueError("serialized components disagree with the construction")
    return cset


# ---------------------------------------------------------------------------
# Lemma campaign: measure(C ∩ [a, b]) > (b - a)/2 whenever b - a >= c
# ---------------------------------------------------------------------------

CERTIFIED = "certified"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LemmaCell:
    a: Fraction
    b: Fraction
    depth: int
    measure: Bracket

    @property
    def margin_lo(self) -> Fraction:
        return self.measure.lo - (self.b - self.a) / 2

    @property
    def status(self) -> str:
        return CERTIFIED if self.margin_lo > 0 else INCONCLUSIVE

    def to_json(self) -> dict:
        return {
            "a": to_pair(self.a),
            "b": to_pair(self.b),
            "depth": self.depth,
            "measure_lo": to_pair(self.measure.lo),
            "measure_hi": to_pair(self.measure.hi),
            "margin_lo": to_pair(self.margin_lo),
            "status": self.status,
        }


@dataclass(frozen=True)
class LemmaReport:
    params: FatCantorParams
    grid_step: Fraction
    depth: int
    cells: Tuple[LemmaCell, ...]

    @property
    def certified(self) -> int:
        return sum(cell.status == CERTIFIED for cell in self.cells)

    @property
    def inconclusive(self) -> int:
        return len(self.cells) - self.certified

    @property
    def ok(self) -> bool:
        return self.inconclusive == 0

    def min_margin(self) -> Optional[Fraction]:
        if not self.cells:
            return None
        return min(cell.margin_lo for cell in self.cells)

    def to_json(self) -> dict:
        doc = {"params": {**self.params.to_json(), "grid_step": to_pair(self.grid_step), "depth": self.depth}}
        doc["cells"] = [cell.to_json() for cell in self.cells]
        doc["summary"] = {
            "total": len(self.cells),
            "certified": self.certified,
            "inconclusive": self.inconclusive,
        }
        return doc


def grid_points(step: Fraction, window: Interval = UNIT) -> list[Fraction]:
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = int((window.hi - window.lo) / step)
    return [window.lo + i * step for i in range(count + 1)]


def grid_windows(step: Fraction, min_length: Fraction) -> list[Tuple[int, int]]:
    """Index pairs ``(i, j)`` of grid windows ``[i*step, j*step] ⊆ [0, 1]`` of length ``>= min_length``."""
    n = len(grid_points(step))
    return [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if (j - i) * step >= min_length
    ]


def lemma_campaign(
    params: FatCantorParams,
    grid_step: Optional[ScalarLike] = None,
    width_target: ScalarLike = Fraction(1, 2**20),
    max_depth: int = 96,
) -> LemmaReport:
    """Certify ``measure(C ∩ [a, b]) > (b - a)/2`` on every grid window with ``b - a >= c``.

    Depth starts at the smallest value with tail ``<= width_target``; cells
    left undecided are retried at doubled depth up to ``max_depth``.
    """
    if params.schedule != GEOMETRIC:
        raise ValueError("the lemma concerns geometric schedules only")
    assert params.c is not None
    c = params.c
    step = scalar(grid_step) if grid_step is not None else c / 64
    points = grid_points(step)
    windows = grid_windows(step, c)

    depth = min(params.depth_for_width(width_target), max_depth)
    cells: dict[Tuple[int, int], LemmaCell] = {}
    pending = windows
    while True:
        cset = build(params, depth)
        cum = [cset.cumulative(t) for t in points]
        retry = []
        for i, j in pending:
            hi = cum[j] - cum[i]
            cell = LemmaCell(points[i], points[j], depth, Bracket(hi - cset.tail, hi))
            cells[(i, j)] = cell
            if cell.status != CERTIFIED:
                retry.append((i, j))
        if not retry or depth >= max_depth:
            break
        pending = retry
        depth = min(2 * depth, max_depth)
    ordered = tuple(cells[w] for w in windows)
    used = max((cell.depth for cell in ordered), default=depth)
    return LemmaReport(params, step, used, ordered)
