"""Exact rational scalars, closed intervals, disjoint interval sets and brackets.

Every quantity is a :class:`fractions.Fraction`; nothing in this module rounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Tuple, Union

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def scalar(value: ScalarLike) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Strings must be ``"p"`` or ``"p/q"``. Floats and decimal strings are
    rejected because they would smuggle binary rounding into the result.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise ValueError(f"not an exact rational 'p/q': {value!r}")
        num, den = m.group(1), m.group(2)
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator: {value!r}")
        return Fraction(int(num), int(den) if den is not None else 1)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")


def to_pair(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def from_pair(pair: Iterable[int]) -> Fraction:
    num, den = pair
    if not isinstance(num, int) or not isinstance(den, int) or den <= 0:
        raise ValueError(f"bad rational pair: {pair!r}")
    return Fraction(num, den)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; degenerate point intervals are allowed."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", scalar(self.lo))
        object.__setattr__(self, "hi", scalar(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, t: object) -> bool:
        return self.lo <= t <= self.hi  # type: ignore[operator]

    def contains_interval(self, other: Interval) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: Interval) -> Interval | None:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


class DisjointIntervalSet:
    """Finite union of closed intervals kept sorted with strictly positive gaps.

    Overlapping or touching inputs are merged on construction, so two sets
    describing the same point set compare equal.
    """

    __slots__ = ("_components",)

    def __init__(self, components: Iterable[Interval] = ()) -> None:
        self._components: Tuple[Interval, ...] = _normalize(components)

    @classmethod
    def _trusted(cls, components: Tuple[Interval, ...]) -> DisjointIntervalSet:
        # caller guarantees sorted, strictly separated components
        obj = cls.__new__(cls)
        obj._components = components
        return obj

    @property
    def components(self) -> Tuple[Interval, ...]:
        return self._components

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._components)

    def __len__(self) -> int:
        return len(self._components)

    def __bool__(self) -> bool:
        return bool(self._components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DisjointIntervalSet):
            return NotImplemented
        return self._components == other._components

    def __hash__(self) -> int:
        return hash(self._components)

    def __repr__(self) -> str:
        inner = ", ".join(str(iv) for iv in self._components)
        return f"DisjointIntervalSet({{{inner}}})"

    def __contains__(self, t: object) -> bool:
        return any(t in iv for iv in self._components)

    @property
    def hull(self) -> Interval | None:
        if not self._components:
            return None
        return Interval(self._components[0].lo, self._components[-1].hi)

    def measure(self) -> Fraction:
        return measure(self)

    def intersect(self, window: Interval) -> DisjointIntervalSet:
        return intersect(self, window)

    def gaps(self) -> DisjointIntervalSet:
        """Closures of the bounded gaps between consecutive components."""
        out = [
            Interval(left.hi, right.lo)
            for left, right in zip(self._components, self._components[1:])
        ]
        return DisjointIntervalSet._trusted(tuple(out))

    def is_subset_of(self, other: DisjointIntervalSet) -> bool:
        return all(
            any(big.contains_interval(iv) for big in other._components)
            for iv in self._components
        )


def _normalize(components: Iterable[Interval]) -> Tuple[Interval, ...]:
    ivs = sorted(components, key=lambda iv: (iv.lo, iv.hi))
    merged: list[Interval] = []
    for iv in ivs:
        if merged and iv.lo <= merged[-1].hi:
            last = merged[-1]
            if iv.hi > last.hi:
                merged[-1] = Interval(last.lo, iv.hi)
        else:
            merged.append(iv)
    return tuple(merged)


def intersect(s: DisjointIntervalSet, window: Interval) -> DisjointIntervalSet:
    out = []
    for iv in s.components:
        if iv.hi < window.lo:
            continue
        if iv.lo > window.hi:
            break
        piece = iv.intersect(window)
        if piece is not None:
            out.append(piece)
    # clipping keeps order and cannot close a positive gap
    return DisjointIntervalSet._trusted(tuple(out))


def measure(s: DisjointIntervalSet) -> Fraction:
    return sum((iv.length for iv in s.components), Fraction(0))


def remove_open_middle(iv: Interval, length: Fraction) -> Tuple[Interval, Interval]:
    """Delete the centred open interval of ``length`` and return both closed remainders."""
    length = scalar(length)
    if length <= 0:
        raise ValueError(f"removed length must be positive, got {length}")
    if length >= iv.length:
        raise ValueError(
            f"cannot remove length {length} from interval of length {iv.length}"
        )
    side = (iv.length - length) / 2
    return Interval(iv.lo, iv.lo + side), Interval(iv.hi - side, iv.hi)


@dataclass(frozen=True)
class Bracket:
    """Certified enclosure ``lo <= x <= hi`` of a real quantity ``x``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", scalar(self.lo))
        object.__setattr__(self, "hi", scalar(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"inverted bracket [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x: ScalarLike) -> Bracket:
        x = scalar(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x: object) -> bool:
        return self.lo <= x <= self.hi  # type: ignore[operator]

    def contains_bracket(self, other: Bracket) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other: Bracket | ScalarLike) -> Bracket:
        if isinstance(other, Bracket):
            return Bracket(self.lo + other.lo, self.hi + other.hi)
        x = scalar(other)
        return Bracket(self.lo + x, self.hi + x)

    __radd__ = __add__

    def __neg__(self) -> Bracket:
        return Bracket(-self.hi, -self.lo)

    def __sub__(self, other: Bracket | ScalarLike) -> Bracket:
        if isinstance(other, Bracket):
            return self + (-other)
        return self + (-scalar(other))

    def __rsub__(self, other: ScalarLike) -> Bracket:
        return (-self) + other

    def scale(self, factor: ScalarLike) -> Bracket:
        factor = scalar(factor)
        a, b = self.lo * factor, self.hi * factor
        return Bracket(min(a, b), max(a, b))

    def abs(self) -> Bracket:
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Bracket(Fraction(0), max(-self.lo, self.hi))

    def hull(self, other: Bracket) -> Bracket:
        return Bracket(min(self.lo, other.lo), max(self.hi, other.hi))

    def __str__(self) -> str:
        if self.is_exact:
            return f"[{self.lo}]"
        return f"[{self.lo}, {self.hi}]"


def bracket_max(brackets: Iterable[Bracket]) -> Bracket:
    """Enclosure of the maximum of several bracketed quantities."""
    items = list(brackets)
    if not items:
        raise ValueError("max of no brackets")
    return Bracket(max(b.lo for b in items), max(b.hi for b in items))


def bracket_min(brackets: Iterable[Bracket]) -> Bracket:
    items = list(brackets)
    if not items:
        raise ValueError("min of no brackets")
    return Bracket(min(b.lo for b in items), min(b.hi for b in items))
