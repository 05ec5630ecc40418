"""Concrete Lipschitz functions with certified evaluation and quotient probes.

Three representations share one functional interface:

* :class:`PLFunction` -- piecewise-linear on rational breakpoints (exact),
* :class:`CantorIntegralFunction` -- ``f(t) = t - measure(C ∩ [0, t])`` on [0, 1],
* :class:`TentSequenceFunction` -- the first ``N`` coordinates of a
  ``c0``-valued map: coordinate 1 is ``clamp(t, 0, 1)`` and coordinate
  ``n >= 2`` is a sawtooth of tents of height ``2**(1-n)`` tiling [0, 1].

Scalar functions evaluate to a :class:`Bracket`; the tent map evaluates to a
tuple of brackets, one per coordinate, and vector norms are sup-norms.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .cantor import FatCantorSet, UNIT
from .cantor import from_json as cantor_from_json
from .exactnum import Bracket, Interval, ScalarLike, from_pair, scalar, to_pair

DEFAULT_TENT_COORDS = 12


class DomainError(ValueError):
    """Evaluation point outside the function's domain."""


def _check_domain(domain: Interval, t: Fraction, extend: bool) -> Fraction:
    if t in domain:
        return t
    if not extend:
        raise DomainError(f"{t} outside domain {domain}")
    return min(max(t, domain.lo), domain.hi)


@dataclass(frozen=True)
class PLFunction:
    """Affine interpolation of ``values`` over strictly increasing ``breakpoints``."""

    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        xs = tuple(scalar(x) for x in self.breakpoints)
        ys = tuple(scalar(y) for y in self.values)
        if len(xs) < 2:
            raise ValueError("a piecewise-linear function needs at least 2 breakpoints")
        if len(xs) != len(ys):
            raise ValueError("breakpoints and values differ in length")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", ys)

    @classmethod
    def from_points(cls, points: Sequence[Tuple[ScalarLike, ScalarLike]]) -> PLFunction:
        return cls(tuple(scalar(x) for x, _ in points), tuple(scalar(y) for _, y in points))

    @property
    def domain(self) -> Interval:
        return Interval(self.breakpoints[0], self.breakpoints[-1])

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        xs, ys = self.breakpoints, self.values
        return tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1))

    def segment_index(self, t: Fraction) -> int:
        """Segment whose slope is the derivative at ``t``.

        Right derivative on ``[first, last)`` and left derivative at ``last``.
        """
        i = bisect.bisect_right(self.breakpoints, t) - 1
        return min(max(i, 0), len(self.breakpoints) - 2)

    def __call__(self, t: ScalarLike, extend: bool = False) -> Fraction:
        t = _check_domain(self.domain, scalar(t), extend)
        i = self.segment_index(t)
        x0, y0 = self.breakpoints[i], self.values[i]
        return y0 + self.slopes[i] * (t - x0)

    def derivative(self, t: ScalarLike) -> Fraction:
        return self.slopes[self.segment_index(_check_domain(self.domain, scalar(t), False))]

    def lip(self) -> Fraction:
        return max(abs(s) for s in self.slopes)

    def restrict(self, window: Interval) -> PLFunction:
        if not self.domain.contains_interval(window) or window.length == 0:
            raise DomainError(f"cannot restrict to {window}")
        inner = [x for x in self.breakpoints if window.lo < x < window.hi]
        xs = [window.lo, *inner, window.hi]
        return PLFunction(tuple(xs), tuple(self(x) for x in xs))

    def lip_on(self, window: Interval) -> Fraction:
        return self.restrict(window).lip()

    def to_json(self) -> dict:
        return {
            "breakpoints": [to_pair(x) for x in self.breakpoints],
            "values": [to_pair(y) for y in self.values],
        }

    @classmethod
    def from_json(cls, doc: dict) -> PLFunction:
        return cls(
            tuple(from_pair(p) for p in doc["breakpoints"]),
            tuple(from_pair(p) for p in doc["values"]),
        )


@dataclass(frozen=True)
class CantorIntegralFunction:
    """``f(t) = t - measure(C ∩ [0, t])``: slope 1 off ``C`` and 0 on it."""

    cantor: FatCantorSet

    @property
    def domain(self) -> Interval:
        return UNIT

    def __call__(self, t: ScalarLike, extend: bool = False) -> Bracket:
        t = _check_domain(self.domain, scalar(t), extend)
        return t - self.cantor.measure_in(Interval(Fraction(0), t))

    def exact_at_component_endpoint(self, index: int, level: int, right: bool = False) -> Fraction:
        """Exact value at an endpoint of the ``index``-th level-``level`` component.

        Every component to its left carries exactly ``measure(C) / 2**level``
        of ``C`` and the removed middles carry none.
        """
        lefts = index + (1 if right else 0)
        mass = lefts * self.cantor.limit_mass_per_component(level)
        comp_len = self.cantor.lengths[level]
        # left endpoint of component ``index`` at this level
        x = Fraction(0)
        for n in range(1, level + 1):
            bit = (index >> (level - n)) & 1
            if bit:
                x += self.cantor.lengths[n - 1] - self.cantor.lengths[n]
        if right:
            x += comp_len
        return x - mass

    def to_json(self) -> dict:
        return {"kind": "cantor-integral", "cantor": self.cantor.to_json(include_components=False)}

    @classmethod
    def from_json(cls, doc: dict) -> CantorIntegralFunction:
        return cls(cantor_from_json(doc["cantor"]))


def tent_coordinate(n: int, t: Fraction) -> Fraction:
    """Coordinate ``n >= 1`` of the tent map at ``t``, exactly."""
    if n < 1:
        raise ValueError("coordinates are numbered from 1")
    if n == 1:
        return min(max(t, Fraction(0)), Fraction(1))
    if t <= 0 or t >= 1:
        return Fraction(0)
    # tents of half-width 2**(1-n) tile [0, 1]: distance to the nearest
    # multiple of the period 2**(2-n)
    period = Fraction(1, 2 ** (n - 2))
    r = t % period
    return min(r, period - r)


@dataclass(frozen=True)
class TentSequenceFunction:
    """First ``coord_count`` coordinates of the ``c0``-valued tent map, defined on all of R."""

    coord_count: int = DEFAULT_TENT_COORDS

    def __post_init__(self) -> None:
        if self.coord_count < 1:
            raise ValueError("need at least one coordinate")

    @property
    def domain(self) -> None:
        return None

    def coordinate(self, n: int, t: ScalarLike) -> Fraction:
        if not 1 <= n <= self.coord_count:
            raise ValueError(f"coordinate {n} outside 1..{self.coord_count}")
        return tent_coordinate(n, scalar(t))

    def values(self, t: ScalarLike) -> Tuple[Fraction, ...]:
        t = scalar(t)
        return tuple(tent_coordinate(n, t) for n in range(1, self.coord_count + 1))

    def __call__(self, t: ScalarLike, extend: bool = False) -> Tuple[Bracket, ...]:
        return tuple(Bracket.exact(v) for v in self.values(t))

    def to_json(self) -> dict:
        return {"kind": "tent-sequence", "N": self.coord_count}

    @classmethod
    def from_json(cls, doc: dict) -> TentSequenceFunction:
        return cls(int(doc["N"]))


LipFunction = Union[PLFunction, CantorIntegralFunction, TentSequenceFunction]
Value = Union[Bracket, Tuple[Bracket, ...]]


def is_vector(f: LipFunction) -> bool:
    return isinstance(f, TentSequenceFunction)


def evaluate(f: LipFunction, t: ScalarLike, extend: bool = False) -> Value:
    """Certified value of ``f`` at ``t`` (exact brackets except for Cantor integrals)."""
    t = scalar(t)
    if isinstance(f, PLFunction):
        return Bracket.exact(f(t, extend=extend))
    return f(t, extend=extend)


def lip_number(f: LipFunction) -> Bracket:
    if isinstance(f, PLFunction):
        return Bracket.exact(f.lip())
    if isinstance(f, TentSequenceFunction):
        # coordinate 1 has slope 1 on [0, 1]; every tent has slopes +-1
        return Bracket.exact(1)
    if isinstance(f, CantorIntegralFunction):
        # f has slope exactly 1 across any removed middle, and never more
        gap = f.cantor.gap_at_level(1)
        q = difference_quotient(f, gap.lo, gap.hi)
        assert isinstance(q, Bracket) and q.lo == 1
        return Bracket.exact(1)
    raise TypeError(f"not a Lipschitz function: {f!r}")


def difference_quotient(f: LipFunction, p: ScalarLike, q: ScalarLike) -> Value:
    """Certified ``(f(p) - f(q)) / (p - q)``, per coordinate for the tent map."""
    p, q = scalar(p), scalar(q)
    if p == q:
        raise ValueError("difference quotient needs p != q")
    if isinstance(f, PLFunction):
        return Bracket.exact((f(p) - f(q)) / (p - q))
    if isinstance(f, TentSequenceFunction):
        fp, fq = f.values(p), f.values(q)
        return tuple(Bracket.exact((a - b) / (p - q)) for a, b in zip(fp, fq))
    if isinstance(f, CantorIntegralFunction):
        lo, hi = min(p, q), max(p, q)
        for t in (lo, hi):
            _check_domain(f.domain, t, False)
        # one measure query: the quotient is 1 - measure(C ∩ [lo, hi]) / (hi - lo)
        m = f.cantor.measure_in(Interval(lo, hi))
        m = Bracket(max(m.lo, Fraction(0)), m.hi)
        return 1 - m.scale(1 / (hi - lo))
    raise TypeError(f"not a Lipschitz function: {f!r}")


def quotient_norm(value: Value) -> Bracket:
    """Absolute value, or sup-norm over coordinates, of a bracketed quotient."""
    if isinstance(value, Bracket):
        return value.abs()
    norms = [b.abs() for b in value]
    return Bracket(max(b.lo for b in norms), max(b.hi for b in norms))


def vector_distance(u: Value, v: Value) -> Bracket:
    """Sup-norm distance between two bracketed values of the same shape."""
    if isinstance(u, Bracket):
        assert isinstance(v, Bracket)
        return (u - v).abs()
    return quotient_norm(tuple(a - b for a, b in zip(u, v)))


class Attainment(enum.Enum):
    ATTAINS = "attains"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


def strong_attainment_check(
    f: LipFunction, p: ScalarLike, q: ScalarLike, tol: ScalarLike = 0
) -> Attainment:
    """Decide whether the quotient at ``(p, q)`` reaches ``Lip(f)`` within ``tol``."""
    tol = scalar(tol)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    quot = quotient_norm(difference_quotient(f, p, q))
    lip = lip_number(f)
    if quot.lo >= lip.hi - tol:
        return Attainment.ATTAINS
    if quot.hi < lip.lo - tol:
        return Attainment.FAILS
    return Attainment.INCONCLUSIVE


@dataclass(frozen=True)
class QuotientProbe:
    """Quotients ``(f(x + h*e) - f(x)) / h`` along ``steps``."""

    x: Fraction
    direction: int = 1
    steps: Tuple[Fraction, ...] = field(default_factory=tuple)
    one_sided: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", scalar(self.x))
        object.__setattr__(self, "steps", tuple(scalar(h) for h in self.steps))
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        if any(h == 0 for h in self.steps):
            raise ValueError("probe steps must be nonzero")
        if self.one_sided and any(h < 0 for h in self.steps):
            raise ValueError("one-sided probes take positive steps along the direction")

    @classmethod
    def dyadic(cls, x: ScalarLike, direction: int = 1, start: int = 1, stop: int = 20,
               one_sided: bool = True) -> QuotientProbe:
        steps = tuple(Fraction(1, 2**m) for m in range(start, stop + 1))
        if not one_sided:
            steps = tuple(s for h in steps for s in (h, -h))
        return cls(scalar(x), direction, steps, one_sided)


def _step_quotient(f: LipFunction, x: Fraction, h: Fraction) -> Value:
    return difference_quotient(f, x + h, x)


def derivative_probe(f: LipFunction, probe: QuotientProbe) -> list[Value]:
    """Quotient brackets of ``f`` at ``probe.x`` in direction ``probe.direction``, one per step."""
    out = []
    for h in probe.steps:
        # (f(x + h e) - f(x)) / h == e * quotient over the pair (x + h e, x)
        q = _step_quotient(f, probe.x, h * probe.direction)
        if probe.direction == -1:
            q = -q if isinstance(q, Bracket) else tuple(-b for b in q)
        out.append(q)
    return out


def dyadic_steps(delta: Fraction, budget: int) -> list[Fraction]:
    """Signed steps ``+-2**-m`` with ``2**-m < delta`` and ``m <= budget``."""
    steps = []
    for m in range(0, budget + 1):
        h = Fraction(1, 2**m)
        if h < delta:
            steps.extend((h, -h))
    return steps


def oscillation_witness(
    f: LipFunction,
    x: ScalarLike,
    delta: ScalarLike,
    lower: ScalarLike,
    budget: Optional[int] = None,
) -> Optional[Tuple[Fraction, Fraction]]:
    """Two steps below ``delta`` whose quotients are certifiably ``lower`` apart.

    The search runs over the dyadic grid ``{+-2**-m : m <= budget}``; the
    first pair found (in grid order) is returned, or ``None``.
    """
    x, delta, lower = scalar(x), scalar(delta), scalar(lower)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if budget is None:
        budget = f.coord_count + 4 if isinstance(f, TentSequenceFunction) else 24
    steps = dyadic_steps(delta, budget)
    if isinstance(f, PLFunction) or isinstance(f, CantorIntegralFunction):
        steps = [h for h in steps if x + h in f.domain]
    quotients = [_step_quotient(f, x, h) for h in steps]
    for i in range(len(steps)):
        for j in range(i + 1, len(steps)):
            if vector_distance(quotients[i], quotients[j]).lo >= lower:
                return steps[i], steps[j]
    return None


def function_from_json(doc: dict) -> LipFunction:
    kind = doc.get("kind", "piecewise-linear")
    if kind == "piecewise-linear":
        return PLFunction.from_json(doc)
    if kind == "tent-sequence":
        return TentSequenceFunction.from_json(doc)
    if kind == "cantor-integral":
        return CantorIntegralFunction.from_json(doc)
    raise ValueError(f"unknown function kind {kind!r}")


# ---------------------------------------------------------------------------
# tent-map example suite
# ---------------------------------------------------------------------------


def symmetric_pair(n: int) -> Tuple[Fraction, Fraction]:
    """``(1/2 + 2**-n, 1/2 - 2**-n)``: every tent coordinate agrees at both points."""
    h = Fraction(1, 2**n)
    return Fraction(1, 2) + h, Fraction(1, 2) - h


@dataclass(frozen=True)
class WitnessResult:
    base: Fraction
    scale: int
    steps: Optional[Tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class TentSuiteResult:
    coord_count: int
    lip: Bracket
    directional: Tuple[Tuple[int, bool], ...]
    witnesses: Tuple[WitnessResult, ...]

    @property
    def lip_ok(self) -> bool:
        return self.lip == Bracket.exact(1)

    @property
    def directional_ok(self) -> bool:
        return all(ok for _, ok in self.directional)

    @property
    def witnesses_ok(self) -> bool:
        return all(w.steps is not None for w in self.witnesses)

    @property
    def ok(self) -> bool:
        return self.lip_ok and self.directional_ok and self.witnesses_ok


def tent_scales(coord_count: int, max_scale: int = 8) -> list[int]:
    """Scales ``m`` (``delta = 2**-m``) at which a witness is guaranteed for ``coord_count`` coordinates."""
    return list(range(0, max(0, min(max_scale, coord_count - 3)) + 1))


def tent_suite(
    coord_count: int,
    bases: Sequence[Fraction],
    scales: Optional[Sequence[int]] = None,
    lower: Fraction = Fraction(1, 2),
) -> TentSuiteResult:
    f = TentSequenceFunction(coord_count)
    first = tuple(Fraction(1 if i == 0 else 0) for i in range(coord_count))
    directional = []
    for n in range(2, coord_count):
        p, q = symmetric_pair(n)
        quot = difference_quotient(f, p, q)
        assert not isinstance(quot, Bracket)
        directional.append((n, all(b.is_exact and b.lo == e for b, e in zip(quot, first))))
    if scales is None:
        scales = tent_scales(coord_count)
    witnesses = []
    for t0 in bases:
        for m in scales:
            pair = oscillation_witness(f, t0, Fraction(1, 2**m), lower)
            witnesses.append(WitnessResult(scalar(t0), m, pair))
    return TentSuiteResult(coord_count, lip_number(f), tuple(directional), tuple(witnesses))
