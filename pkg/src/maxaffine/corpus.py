"""Seeded random instances: piecewise-linear functions, windows, rationals.

All draws are integer draws from :class:`random.Random`, so a seed
reproduces the same corpus on every platform.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Tuple

from .exactnum import Interval
from .lipfun import PLFunction


def random_rational(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 997) -> Fraction:
    """Rational in ``[lo, hi]`` on a grid of ``den`` steps."""
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


def random_breakpoints(rng: random.Random, count: int, den: int = 256) -> list[Fraction]:
    inner = sorted(rng.sample(range(1, den), count - 2))
    return [Fraction(0), *(Fraction(i, den) for i in inner), Fraction(1)]


def random_pl(rng: random.Random, max_breakpoints: int = 20, den: int = 256) -> PLFunction:
    """Piecewise-linear function on [0, 1] with 2..max_breakpoints breakpoints."""
    count = rng.randint(2, max(2, max_breakpoints))
    xs = random_breakpoints(rng, count, den)
    ys = [Fraction(rng.randint(-64, 64), 64) for _ in xs]
    if all(y == ys[0] for y in ys):
        ys[-1] += 1
    return PLFunction(tuple(xs), tuple(ys))


def random_window(rng: random.Random, domain: Interval, den: int = 512) -> Interval:
    """Subinterval of positive length with endpoints on a ``den`` grid of ``domain``."""
    i, j = sorted(rng.sample(range(den + 1), 2))
    span = domain.length
    return Interval(domain.lo + span * Fraction(i, den), domain.lo + span * Fraction(j, den))


def aap_instance(rng: random.Random, max_breakpoints: int = 20) -> Tuple[PLFunction, Interval]:
    """A PL function and a window on which it is not constant."""
    while True:
        f = random_pl(rng, max_breakpoints)
        window = random_window(rng, f.domain)
        if f.lip_on(window) > 0:
            return f, window


def sna_instance(
    rng: random.Random, max_breakpoints: int = 20
) -> Tuple[PLFunction, Fraction, Fraction]:
    """PL function attaining its Lipschitz number on ``(p, q)``, possibly across breakpoints.

    The steepest slope is laid down on a run of consecutive segments, so
    ``(p, q)`` may straddle interior breakpoints.
    """
    count = rng.randint(3, max(3, max_breakpoints))
    xs = random_breakpoints(rng, count, 256)
    segs = count - 1
    lip = Fraction(rng.randint(1, 32), 8)
    sign = rng.choice((1, -1))
    start = rng.randrange(segs)
    stop = rng.randint(start + 1, min(segs, start + 4))
    slopes = []
    for i in range(segs):
        if start <= i < stop:
            slopes.append(sign * lip)
        else:
            slopes.append(lip * Fraction(rng.randint(-15, 15), 16))
    ys = [Fraction(rng.randint(-64, 64), 64)]
    for i, s in enumerate(slopes):
        ys.append(ys[-1] + s * (xs[i + 1] - xs[i]))
    return PLFunction(tuple(xs), tuple(ys)), xs[start], xs[stop]


def random_lambda(rng: random.Random, den: int = 10007) -> Fraction:
    """Rational strictly inside (0, 1)."""
    return Fraction(rng.randint(1, den - 1), den)
