"""Affine approximation: fixed-slope minimax fits, the maximal-AAP construction
for real functions of a real variable, and the uniform-AAP falsifier.
"""

from __future__ import annotations

import csv
import functools
import io
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from . import cantor as cantor_mod
from .cantor import CERTIFIED, INCONCLUSIVE, FatCantorParams
from .corpus import aap_instance
from .exactnum import Bracket, Interval, ScalarLike, scalar, to_pair
from .lipfun import (
    CantorIntegralFunction,
    DomainError,
    LipFunction,
    PLFunction,
    TentSequenceFunction,
)

# level of Cantor components sampled by residual_extremes when none is given
DEFAULT_SAMPLE_LEVEL = 12

THREADS_ENV = "MAXAFFINE_THREADS"


class DegenerateInputError(ValueError):
    """The function is constant on the requested interval."""


@dataclass(frozen=True)
class AffineMap:
    slope: Fraction
    intercept: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "slope", scalar(self.slope))
        object.__setattr__(self, "intercept", scalar(self.intercept))

    def __call__(self, t: ScalarLike) -> Fraction:
        return self.slope * scalar(t) + self.intercept

    def lip(self) -> Fraction:
        return abs(self.slope)

    def __str__(self) -> str:
        return f"t -> {self.slope}*t + {self.intercept}"


@dataclass(frozen=True)
class FitReport:
    interval: Interval
    map: AffineMap
    sup_error: Bracket
    lip_gap: Fraction

    def __post_init__(self) -> None:
        if self.sup_error.lo < 0:
            raise ValueError("sup error bracket must be non-negative")


def _require_scalar(f: LipFunction) -> None:
    if isinstance(f, TentSequenceFunction):
        raise TypeError("affine fitting is defined for real-valued functions only")


def _require_window(f: LipFunction, window: Interval) -> None:
    if not f.domain.contains_interval(window):
        raise DomainError(f"window {window} not inside domain {f.domain}")


@functools.lru_cache(maxsize=8192)
def _cantor_samples(
    f: CantorIntegralFunction, window: Interval, level: int
) -> Tuple[Tuple[Tuple[Fraction, Bracket], ...], Tuple[Tuple[int, int], ...]]:
    """Ordered samples ``(t, f(t))`` over ``window`` and the in-component pieces.

    Samples are the window endpoints plus the endpoints of every level
    component meeting the window. Between pieces lie removed middles, where
    ``f`` has slope exactly 1, so only the returned pieces (index pairs into
    the sample list) need Lipschitz widening.
    """
    samples: list[Tuple[Fraction, Bracket]] = []
    pieces: list[Tuple[int, int]] = []

    def push(t: Fraction, value: Bracket) -> int:
        if samples and samples[-1][0] == t:
            return len(samples) - 1
        samples.append((t, value))
        return len(samples) - 1

    push(window.lo, f(window.lo))
    for idx, comp in f.cantor.components_in(window, level):
        if comp.lo >= window.lo:
            u = push(comp.lo, Bracket.exact(f.exact_at_component_endpoint(idx, level)))
        else:
            u = 0
        if comp.hi <= window.hi:
            v = push(comp.hi, Bracket.exact(f.exact_at_component_endpoint(idx, level, right=True)))
        else:
            v = push(window.hi, f(window.hi))
        if v > u:
            pieces.append((u, v))
    push(window.hi, f(window.hi))
    return tuple(samples), tuple(pieces)


def residual_extremes(
    f: LipFunction,
    window: Interval,
    slope: ScalarLike,
    sample_level: Optional[int] = None,
) -> Tuple[Bracket, Bracket]:
    """Enclosures of ``max`` and ``min`` over ``window`` of ``h(t) = f(t) - slope*t``.

    Exact for piecewise-linear ``f``. For a Cantor integral the width of each
    enclosure is at most ``max(|slope|, |1 - slope|) * L/2 + tail`` where ``L``
    is the component length at ``sample_level``.
    """
    _require_scalar(f)
    _require_window(f, window)
    slope = scalar(slope)
    if isinstance(f, PLFunction):
        ts = [window.lo, *(x for x in f.breakpoints if window.lo < x < window.hi), window.hi]
        hs = [f(t) - slope * t for t in ts]
        return Bracket.exact(max(hs)), Bracket.exact(min(hs))

    assert isinstance(f, CantorIntegralFunction)
    depth = f.cantor.depth
    level = min(depth, DEFAULT_SAMPLE_LEVEL if sample_level is None else sample_level)
    samples, pieces = _cantor_samples(f, window, level)
    hs = [value - slope * t for t, value in samples]
    max_lo = max(h.lo for h in hs)
    max_hi = max(h.hi for h in hs)
    min_lo = min(h.lo for h in hs)
    min_hi = min(h.hi for h in hs)
    rate = max(abs(slope), abs(1 - slope))
    for u, v in pieces:
        spread = rate * (samples[v][0] - samples[u][0]) / 2
        max_hi = max(max_hi, max(hs[u].hi, hs[v].hi) + spread)
        min_lo = min(min_lo, min(hs[u].lo, hs[v].lo) - spread)
    return Bracket(max_lo, max_hi), Bracket(min_lo, min_hi)


def best_intercept(
    f: LipFunction,
    window: Interval,
    slope: ScalarLike,
    sample_level: Optional[int] = None,
) -> Tuple[Bracket, Bracket]:
    """Minimax intercept for a fixed slope and its sup error, both bracketed.

    With ``g(t) = slope*t + y0`` the error is ``sup |y0 - h|``, minimized at the
    centre ``y0 = (max h + min h)/2`` with value ``(max h - min h)/2``.
    """
    hmax, hmin = residual_extremes(f, window, slope, sample_level)
    y0 = Bracket((hmax.lo + hmin.lo) / 2, (hmax.hi + hmin.hi) / 2)
    err = Bracket(max(Fraction(0), (hmax.lo - hmin.hi) / 2), (hmax.hi - hmin.lo) / 2)
    return y0, err


def sup_error(
    f: LipFunction, window: Interval, g: AffineMap, sample_level: Optional[int] = None
) -> Bracket:
    """Bracket for ``sup |f - g|`` over ``window``."""
    hmax, hmin = residual_extremes(f, window, g.slope, sample_level)
    hi = max(hmax.hi - g.intercept, g.intercept - hmin.lo)
    lo = max(hmax.lo - g.intercept, g.intercept - hmin.hi, Fraction(0))
    return Bracket(lo, hi)


# ---------------------------------------------------------------------------
# maximal AAP for (R, R)
# ---------------------------------------------------------------------------


def _steep_runs(f: PLFunction, sign: int, threshold: Fraction) -> list[Tuple[int, int]]:
    """Maximal runs ``[i, j)`` of consecutive segments with ``sign*slope > threshold``."""
    runs = []
    start = None
    slopes = f.slopes
    for i, s in enumerate(slopes):
        if sign * s > threshold:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(slopes)))
    return runs


def maximal_aap_construct(f: PLFunction, interval: Interval, eps: ScalarLike) -> FitReport:
    """Find ``I1 ⊆ interval`` and affine ``g`` with a nearly maximal slope fitting ``f`` on ``I1``.

    Guarantees ``Lip(g) > Lip(f|I) - eps`` and
    ``sup_{I1} |g - f| <= eps * diam(I1) * Lip(f)``.

    After scaling ``Lip(f|I)`` to 1 the construction works at
    ``eps' = 2*eps/3``: ``M`` is where ``f' > 1 - eps'`` (or, if that set is
    empty, where ``f' < -(1 - eps')``, handled by negating ``f``), ``I1`` is the
    leftmost longest segment of ``M`` (density one in ``M``) and ``g`` has slope
    ``+-Lip(f|I)`` with the intercept that balances the errors at both ends.
    """
    eps = scalar(eps)
    if not 0 < eps < 1:
        raise ValueError(f"need 0 < eps < 1, got {eps}")
    if interval.length == 0:
        raise DegenerateInputError("interval has zero length")
    local = f.restrict(interval)
    lip = local.lip()
    if lip == 0:
        raise DegenerateInputError(f"f is constant on {interval}")

    eps_work = 2 * eps / 3
    threshold = lip * (1 - eps_work)
    sign = 1
    runs = _steep_runs(local, sign, threshold)
    if not runs:
        sign = -1
        runs = _steep_runs(local, sign, threshold)
    # a segment with |slope| == lip always exists, so one sign has a run
    assert runs

    xs = local.breakpoints

    def run_length(run: Tuple[int, int]) -> Fraction:
        return xs[run[1]] - xs[run[0]]

    best = max(runs, key=lambda r: (run_length(r), -r[0]))
    a, b = xs[best[0]], xs[best[1]]

    slope = sign * lip
    intercept = (local(a) + local(b)) / 2 - slope * (a + b) / 2
    g = AffineMap(slope, intercept)

    ts = xs[best[0] : best[1] + 1]
    err = max(abs(g(t) - local(t)) for t in ts)
    return FitReport(Interval(a, b), g, Bracket.exact(err), lip - g.lip())


# ---------------------------------------------------------------------------
# uniform AAP falsifier
# ---------------------------------------------------------------------------

SLOPE_FLOOR = Fraction(7, 8)


def default_slope_grid(both_signs: bool = True) -> list[Fraction]:
    pos = [SLOPE_FLOOR + Fraction(j, 64) for j in range(1, 17)]
    if not both_signs:
        return pos
    return [s for x in pos for s in (x, -x)]


@dataclass(frozen=True)
class CampaignCell:
    a: Fraction
    b: Fraction
    slope: Fraction
    depth: int
    intercept: Bracket
    sup_error: Bracket
    measure: Bracket

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    @property
    def margin_lo(self) -> Fraction:
        return self.sup_error.lo - self.length / 8

    @property
    def status(self) -> str:
        return CERTIFIED if self.margin_lo > 0 else INCONCLUSIVE

    @property
    def chain_lo(self) -> Optional[Fraction]:
        """Lower bound ``measure/2 - length/16`` of the minimax error (positive slopes only)."""
        if self.slope <= SLOPE_FLOOR:
            return None
        return self.measure.lo / 2 - self.length / 16

    def to_json(self) -> dict:
        chain = self.chain_lo
        return {
            "a": to_pair(self.a),
            "b": to_pair(self.b),
            "slope": to_pair(self.slope),
            "depth": self.depth,
            "sup_error_lo": to_pair(self.sup_error.lo),
            "sup_error_hi": to_pair(self.sup_error.hi),
            "margin_lo": to_pair(self.margin_lo),
            "chain_lo": to_pair(chain) if chain is not None else None,
            "status": self.status,
        }


@dataclass(frozen=True)
class CampaignReport:
    params: FatCantorParams
    grid_step: Fraction
    depth: int
    cells: Tuple[CampaignCell, ...]

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
        return min((cell.margin_lo for cell in self.cells), default=None)

    def to_json(self) -> dict:
        return {
            "params": {
                "c": to_pair(self.params.c),
                "k": to_pair(self.params.k),
                "grid_step": to_pair(self.grid_step),
                "depth": self.depth,
            },
            "cells": [cell.to_json() for cell in self.cells],
            "summary": {
                "total": len(self.cells),
                "certified": self.certified,
                "inconclusive": self.inconclusive,
            },
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["a", "b", "slope", "depth", "sup_error_lo", "margin_lo", "margin_lo_float", "status"]
        )
        for cell in self.cells:
            writer.writerow(
                [
                    cell.a,
                    cell.b,
                    cell.slope,
                    cell.depth,
                    cell.sup_error.lo,
                    cell.margin_lo,
                    f"{float(cell.margin_lo):.12g}",
                    cell.status,
                ]
            )
        return buf.getvalue()


def worker_count(requested: Optional[int] = None) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = requested if requested is not None else 1
    if cap:
        try:
            n = min(n, int(cap)) if requested is not None else int(cap)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}")
    return max(1, n)


def _falsify_windows(
    params: FatCantorParams,
    depth: int,
    sample_level: int,
    windows: Sequence[Tuple[Fraction, Fraction]],
    slopes: Sequence[Fraction],
) -> list[CampaignCell]:
    f = CantorIntegralFunction(cantor_mod.build(params, depth))
    cells = []
    for a, b in windows:
        window = Interval(a, b)
        m = f.cantor.measure_in(window)
        for slope in slopes:
            y0, err = best_intercept(f, window, slope, sample_level)
            cells.append(CampaignCell(a, b, slope, depth, y0, err, m))
    return cells


def _run_cells(
    params: FatCantorParams,
    depth: int,
    sample_level: int,
    windows: Sequence[Tuple[Fraction, Fraction]],
    slopes: Sequence[Fraction],
    workers: int,
) -> list[CampaignCell]:
    if workers <= 1 or len(windows) < 2 * workers:
        return _falsify_windows(params, depth, sample_level, windows, slopes)
    size = -(-len(windows) // workers)
    chunks = [windows[i : i + size] for i in range(0, len(windows), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_falsify_windows, params, depth, sample_level, chunk, slopes)
            for chunk in chunks
        ]
        # merged in chunk order, so output does not depend on scheduling
        return [cell for fut in futures for cell in fut.result()]


def uniform_aap_falsify(
    c: ScalarLike,
    grid_step: ScalarLike,
    slope_grid: Optional[Iterable[ScalarLike]] = None,
    depth_budget: int = 30,
    start_depth: Optional[int] = None,
    sample_level: int = 3,
    workers: Optional[int] = None,
) -> CampaignReport:
    """Certify ``sup |g - f| > (b - a)/8`` for every grid window and slope.

    ``f`` is the Cantor integral over the geometric schedule with ``k = 1/4``.
    Windows are ``[a, b] ⊆ [0, 1]`` with grid endpoints and ``b - a >= c``;
    each cell's certificate is the lower end of the bracketed minimax error
    at that slope. Cells not certified at ``start_depth`` are recomputed at
    ``depth_budget`` and reported inconclusive if they still fail.
    """
    c, step = scalar(c), scalar(grid_step)
    params = FatCantorParams.geometric(c, Fraction(1, 4))
    slopes = [scalar(s) for s in (slope_grid if slope_grid is not None else default_slope_grid())]
    for s in slopes:
        if abs(s) <= SLOPE_FLOOR:
            raise ValueError(f"slope {s} does not satisfy |slope| > 7/8")
    if depth_budget < 1:
        raise ValueError("depth budget must be positive")
    if start_depth is None:
        start_depth = params.depth_for_width(Fraction(1, 2**20))
    depth = min(start_depth, depth_budget)
    sample_level = min(sample_level, depth)

    points = cantor_mod.grid_points(step)
    windows = [(points[i], points[j]) for i, j in cantor_mod.grid_windows(step, c)]
    nworkers = worker_count(workers)

    cells = _run_cells(params, depth, sample_level, windows, slopes, nworkers)
    if depth < depth_budget:
        retry = sorted({(cell.a, cell.b) for cell in cells if cell.status != CERTIFIED})
        if retry:
            redo = _run_cells(params, depth_budget, sample_level, retry, slopes, nworkers)
            fixed = {(cell.a, cell.b, cell.slope): cell for cell in redo}
            cells = [fixed.get((cell.a, cell.b, cell.slope), cell) for cell in cells]
    used = max((cell.depth for cell in cells), default=depth)
    return CampaignReport(params, step, used, tuple(cells))


# ---------------------------------------------------------------------------
# seeded corpus check for the maximal-AAP construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AAPCheck:
    function: PLFunction
    interval: Interval
    eps: Fraction
    report: FitReport

    @property
    def slope_ok(self) -> bool:
        return self.report.map.lip() > self.function.lip_on(self.interval) - self.eps

    @property
    def error_bound(self) -> Fraction:
        return self.eps * self.report.interval.length * self.function.lip()

    @property
    def error_ok(self) -> bool:
        # sup of |PL - affine| is attained at breakpoints or endpoints
        i1 = self.report.interval
        ts = [i1.lo, *(x for x in self.function.breakpoints if i1.lo < x < i1.hi), i1.hi]
        g = self.report.map
        err = max(abs(g(t) - self.function(t)) for t in ts)
        return err <= self.error_bound and self.interval.contains_interval(i1)

    @property
    def ok(self) -> bool:
        return self.slope_ok and self.error_ok

    def to_json(self) -> dict:
        i1, g = self.report.interval, self.report.map
        return {
            "function": self.function.to_json(),
            "interval": [to_pair(self.interval.lo), to_pair(self.interval.hi)],
            "eps": to_pair(self.eps),
            "I1": [to_pair(i1.lo), to_pair(i1.hi)],
            "slope": to_pair(g.slope),
            "intercept": to_pair(g.intercept),
            "sup_error": to_pair(self.report.sup_error.hi),
            "bound": to_pair(self.error_bound),
            "ok": self.ok,
        }


def aap_corpus_check(
    seed: int = 0,
    count: int = 50,
    eps_values: Sequence[ScalarLike] = (Fraction(1, 10), Fraction(1, 100)),
    max_breakpoints: int = 20,
) -> list[AAPCheck]:
    rng = random.Random(seed)
    instances = [aap_instance(rng, max_breakpoints) for _ in range(count)]
    checks = []
    for eps in (scalar(e) for e in eps_values):
        for f, window in instances:
            checks.append(AAPCheck(f, window, eps, maximal_aap_construct(f, window, eps)))
    return checks
