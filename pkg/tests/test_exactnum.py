from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxaffine.exactnum import (
    Bracket,
    DisjointIntervalSet,
    Interval,
    bracket_max,
    intersect,
    measure,
    remove_open_middle,
    scalar,
)


def S(*pairs):
    return DisjointIntervalSet(Interval(F(a), F(b)) for a, b in pairs)


def test_scalar_parsing():
    assert scalar("1/3") == F(1, 3)
    assert scalar(" -7 / 21 ") == F(-1, 3)
    assert scalar(5) == F(5)
    for bad in ("0.5", "1e3", "1/0", "abc"):
        with pytest.raises(ValueError):
            scalar(bad)
    with pytest.raises(TypeError):
        scalar(0.5)


def test_interval_rejects_inverted():
    with pytest.raises(ValueError):
        Interval(F(1), F(0))
    assert Interval(F(1, 2), F(1, 2)).length == 0


def test_intersect_examples():
    first = S((0, F(1, 3)), (F(2, 3), 1))
    assert intersect(first, Interval(F(1, 4), F(3, 4))) == S((F(1, 4), F(1, 3)), (F(2, 3), F(3, 4)))
    assert intersect(first, Interval(F(0), F(1))) == first
    assert intersect(S((0, 1)), Interval(F(2), F(3))) == DisjointIntervalSet()
    assert not intersect(S((0, 1)), Interval(F(2), F(3)))


def test_measure_examples():
    assert measure(S((0, F(1, 3)), (F(2, 3), 1))) == F(2, 3)
    assert measure(DisjointIntervalSet()) == 0
    c2 = S((0, F(1, 9)), (F(2, 9), F(1, 3)), (F(2, 3), F(7, 9)), (F(8, 9), 1))
    # four intervals of length 1/9 each
    assert measure(c2) == 4 * F(1, 9) == F(4, 9)


def test_touching_components_merge():
    s = S((0, F(1, 2)), (F(1, 2), 1), (F(3), F(4)), (F(7, 2), F(5)))
    assert s.components == (Interval(F(0), F(1)), Interval(F(3), F(5)))


def test_remove_open_middle():
    assert remove_open_middle(Interval(F(0), F(1)), F(1, 3)) == (
        Interval(F(0), F(1, 3)),
        Interval(F(2, 3), F(1)),
    )
    assert remove_open_middle(Interval(F(0), F(1)), F(1, 2)) == (
        Interval(F(0), F(1, 4)),
        Interval(F(3, 4), F(1)),
    )
    # second ternary step removes 3**-2 from [0, 1/3]
    assert remove_open_middle(Interval(F(0), F(1, 3)), F(1, 9)) == (
        Interval(F(0), F(1, 9)),
        Interval(F(2, 9), F(1, 3)),
    )
    for bad in (F(0), F(-1, 5), F(1), F(2)):
        with pytest.raises(ValueError):
            remove_open_middle(Interval(F(0), F(1)), bad)


def test_bracket_arithmetic():
    b = Bracket(F(1), F(2))
    assert (b + 1) == Bracket(F(2), F(3))
    assert (1 - b) == Bracket(F(-1), F(0))
    assert b.scale(-2) == Bracket(F(-4), F(-2))
    assert Bracket(F(-3), F(1)).abs() == Bracket(F(0), F(3))
    assert bracket_max([b, Bracket.exact(F(3, 2))]) == Bracket(F(3, 2), F(2))
    with pytest.raises(ValueError):
        Bracket(F(1), F(0))


rationals = st.fractions(min_value=0, max_value=4, max_denominator=24)


@st.composite
def interval_sets(draw):
    ends = draw(st.lists(rationals, min_size=0, max_size=10))
    ends = sorted(ends)
    pairs = list(zip(ends[::2], ends[1::2]))
    return DisjointIntervalSet(Interval(a, b) for a, b in pairs)


@st.composite
def windows(draw):
    a, b = sorted((draw(rationals), draw(rationals)))
    return Interval(a, b)


@settings(max_examples=200, deadline=None)
@given(interval_sets(), windows())
def test_complement_within_hull_partitions_window(s, w):
    hull = s.hull
    if hull is None:
        return
    clipped = hull.intersect(w)
    inside = measure(intersect(s, w))
    outside = measure(intersect(s.gaps(), w))
    assert inside + outside == (clipped.length if clipped else 0)


@settings(max_examples=200, deadline=None)
@given(interval_sets(), windows())
def test_intersect_never_increases_measure(s, w):
    sub = intersect(s, w)
    assert measure(sub) <= measure(s)
    assert measure(sub) <= w.length
    assert sub.is_subset_of(s)
    comps = sub.components
    assert all(x.hi < y.lo for x, y in zip(comps, comps[1:]))


@settings(max_examples=100, deadline=None)
@given(interval_sets())
def test_measure_additive(s):
    assert measure(s) == sum((measure(DisjointIntervalSet([iv])) for iv in s), F(0))
    assert all(isinstance(iv.lo, F) and isinstance(iv.hi, F) for iv in s)
