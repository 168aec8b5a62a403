"""Core order structure of refinement systems.

A refinement system is an eventually periodic sequence of multiplicities
k_1, k_2, ... (all >= 2).  Points are infinite digit strings x = (x_1,
x_2, ...) with 1 <= x_n <= k_n, ordered lexicographically.  Everything
downstream (cocycles, ideal sets, boundary functions) works on the exact
finite representations defined here: eventually periodic digit strings
whose period length is locked to a multiple of the system's cycle
length, so that shifting a point never leaves the representable class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm
from typing import Iterator, Optional, Sequence


class RefinementError(Exception):
    """Base class for representation errors in this package."""


class MisalignedPeriodError(RefinementError):
    """Period length is not a multiple of the system's cycle length."""


class DigitRangeError(RefinementError):
    """A digit falls outside 1..k_n at its position."""


class EmptyIntervalError(RefinementError):
    pass


def _primitive_root(cycle: tuple[int, ...]) -> tuple[int, ...]:
    # smallest block whose repetition gives the cycle
    n = len(cycle)
    for d in range(1, n):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class RefinementSystem:
    """Multiplicity sequence k_1 k_2 ... given as a prefix and a repeating cycle.

    Instances are canonical: the cycle is primitive, and the prefix never
    ends with the digit the cycle would supply at that position anyway.
    Always build through make() so equal sequences compare equal.
    """

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    @staticmethod
    def make(prefix: Sequence[int] = (), cycle: Sequence[int] = ()) -> "RefinementSystem":
        pre = tuple(int(k) for k in prefix)
        cyc = tuple(int(k) for k in cycle)
        if not cyc:
            raise ValueError("cycle must be nonempty")
        if any(k < 2 for k in pre + cyc):
            raise ValueError("all multiplicities must be >= 2")
        cyc = _primitive_root(cyc)
        work = list(pre)
        while work and work[-1] == cyc[-1]:
            work.pop()
            cyc = (cyc[-1],) + cyc[:-1]
        return RefinementSystem(tuple(work), cyc)

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def cycle_len(self) -> int:
        return len(self.cycle)

    @property
    def k_max(self) -> int:
        return max(self.prefix + self.cycle)

    def k_at(self, n: int) -> int:
        """Multiplicity at position n (1-based)."""
        if n < 1:
            raise ValueError(f"position must be >= 1, got {n}")
        p = len(self.prefix)
        if n <= p:
            return self.prefix[n - 1]
        return self.cycle[(n - p - 1) % len(self.cycle)]

    def prod(self, i: int, j: int) -> int:
        """Product of the multiplicities at positions i+1 through j."""
        out = 1
        for n in range(i + 1, j + 1):
            out *= self.k_at(n)
        return out

    def shift(self, m: int) -> "RefinementSystem":
        """The system whose multiplicity sequence is k_{m+1}, k_{m+2}, ..."""
        if m < 0:
            raise ValueError("shift must be nonnegative")
        p = len(self.prefix)
        if m <= p:
            return RefinementSystem.make(self.prefix[m:], self.cycle)
        r = (m - p) % len(self.cycle)
        return RefinementSystem.make((), self.cycle[r:] + self.cycle[:r])


@dataclass(frozen=True)
class Point:
    """Eventually periodic digit string in canonical form.

    digit(1), digit(2), ... runs through the preamble and then repeats
    the period forever.  Canonical means: the period length is the lcm of
    the minimal eventual period and the system's cycle length, and the
    preamble is as short as possible.  Build through point() which
    canonicalizes; two canonical points are equal iff their digit
    strings are.
    """

    preamble: tuple[int, ...]
    period: tuple[int, ...]

    def digit(self, n: int) -> int:
        if n <= len(self.preamble):
            return self.preamble[n - 1]
        return self.period[(n - len(self.preamble) - 1) % len(self.period)]


def point(sys: RefinementSystem, preamble: Sequence[int], period: Sequence[int]) -> Point:
    """Canonical point with the given digit string.

    The period must be a multiple of the system's cycle length
    (MisalignedPeriodError otherwise) and every digit must lie in
    1..k_n at its position (DigitRangeError).
    """
    pre = tuple(int(d) for d in preamble)
    per = tuple(int(d) for d in period)
    if not per:
        raise ValueError("period must be nonempty")
    big_l = sys.cycle_len
    if len(per) % big_l != 0:
        raise MisalignedPeriodError(
            f"period length {len(per)} is not a multiple of cycle length {big_l}")
    raw = Point(pre, per)
    # one full joint period past the prefix/preamble region covers all residues
    limit = max(sys.prefix_len, len(pre)) + len(per)
    for n in range(1, limit + 1):
        d = raw.digit(n)
        if not 1 <= d <= sys.k_at(n):
            raise DigitRangeError(
                f"digit {d} at position {n} outside 1..{sys.k_at(n)}")
    ln = len(per)
    lstar = next(d for d in range(1, ln + 1)
                 if ln % d == 0
                 and all(per[i] == per[(i + d) % ln] for i in range(ln)))
    lc = lcm(lstar, big_l)
    m = len(pre)
    while m > 0 and raw.digit(m) == raw.digit(m + lc):
        m -= 1
    digits = [raw.digit(n) for n in range(1, m + lc + 1)]
    return Point(tuple(digits[:m]), tuple(digits[m:]))


def prefix_digits(x: Point, n: int) -> tuple[int, ...]:
    return tuple(x.digit(i) for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# order and orbit


def first_difference(x: Point, y: Point) -> Optional[int]:
    """First position where the digit strings differ, or None if equal."""
    w = max(len(x.preamble), len(y.preamble))
    span = w + lcm(len(x.period), len(y.period))
    for n in range(1, span + 1):
        if x.digit(n) != y.digit(n):
            return n
    return None


def order_compare(x: Point, y: Point) -> int:
    n = first_difference(x, y)
    if n is None:
        return 0
    return -1 if x.digit(n) < y.digit(n) else 1


def le(x: Point, y: Point) -> bool:
    return order_compare(x, y) <= 0


def lt(x: Point, y: Point) -> bool:
    return order_compare(x, y) < 0


def orbit_test(x: Point, y: Point) -> bool:
    """Do x and y agree from some position on (lie in the same orbit)?"""
    w = max(len(x.preamble), len(y.preamble))
    span = lcm(len(x.period), len(y.period))
    return all(x.digit(n) == y.digit(n) for n in range(w + 1, w + span + 1))


def p_test(x: Point, y: Point) -> bool:
    """Same orbit and x below y: membership in the canonical order P."""
    return orbit_test(x, y) and le(x, y)


def merge_level(x: Point, y: Point) -> int:
    """Smallest N such that x and y agree at every position beyond N.

    Only defined for points in the same orbit.
    """
    if not orbit_test(x, y):
        raise ValueError("merge_level needs points in the same orbit")
    w = max(len(x.preamble), len(y.preamble))
    last = 0
    for n in range(1, w + 1):
        if x.digit(n) != y.digit(n):
            last = n
    return last


# ---------------------------------------------------------------------------
# extremes and gaps


def p_min(sys: RefinementSystem) -> Point:
    return point(sys, (), (1,) * sys.cycle_len)


def p_max(sys: RefinementSystem) -> Point:
    # digits of the maximum point are the multiplicities themselves
    return point(sys, sys.prefix, sys.cycle)


def _window(sys: RefinementSystem, x: Point) -> int:
    return max(len(x.preamble), sys.prefix_len)


def has_gap_above(sys: RefinementSystem, x: Point) -> bool:
    """True iff x has an immediate successor.

    Happens exactly when the digits are eventually maximal (d_n = k_n
    from some point on) and x is not the maximum point.
    """
    w = _window(sys, x)
    if not all(x.digit(n) == sys.k_at(n) for n in range(w + 1, w + len(x.period) + 1)):
        return False
    return x != p_max(sys)


def has_gap_below(sys: RefinementSystem, x: Point) -> bool:
    """True iff x has an immediate predecessor (digits eventually 1, x not minimal)."""
    if x.period != (1,) * len(x.period):
        return False
    return x != p_min(sys)


@dataclass(frozen=True)
class GapProbe:
    above: bool
    below: bool


def gap_probe(sys: RefinementSystem, x: Point) -> GapProbe:
    return GapProbe(has_gap_above(sys, x), has_gap_below(sys, x))


def suc(sys: RefinementSystem, x: Point) -> Point:
    if not has_gap_above(sys, x):
        raise ValueError("point has no immediate successor")
    w = _window(sys, x)
    j = next(n for n in range(w, 0, -1) if x.digit(n) < sys.k_at(n))
    head = [x.digit(n) for n in range(1, j)] + [x.digit(j) + 1]
    return min_tail_point(sys, head)


def pred(sys: RefinementSystem, x: Point) -> Point:
    if not has_gap_below(sys, x):
        raise ValueError("point has no immediate predecessor")
    w = _window(sys, x)
    j = next(n for n in range(w, 0, -1) if x.digit(n) > 1)
    head = [x.digit(n) for n in range(1, j)] + [x.digit(j) - 1]
    return max_tail_point(sys, head)


def min_tail_point(sys: RefinementSystem, word: Sequence[int]) -> Point:
    """The smallest point whose digits start with word."""
    return point(sys, word, (1,) * sys.cycle_len)


def max_tail_point(sys: RefinementSystem, word: Sequence[int]) -> Point:
    """The largest point whose digits start with word."""
    j = len(word)
    w = max(j, sys.prefix_len)
    pre = list(word) + [sys.k_at(n) for n in range(j + 1, w + 1)]
    per = tuple(sys.k_at(n) for n in range(w + 1, w + sys.cycle_len + 1))
    return point(sys, pre, per)


def cylinder_bounds(sys: RefinementSystem, word: Sequence[int]) -> tuple[Point, Point]:
    return min_tail_point(sys, word), max_tail_point(sys, word)


# ---------------------------------------------------------------------------
# shifting digits in and out


def tail_of(sys: RefinementSystem, x: Point, m: int) -> Point:
    """x with its first m digits removed, as a point of sys.shift(m)."""
    w = max(m, len(x.preamble))
    pre = [x.digit(n) for n in range(m + 1, w + 1)]
    per = [x.digit(n) for n in range(w + 1, w + len(x.period) + 1)]
    return point(sys.shift(m), pre, per)


def prepend(sys: RefinementSystem, word: Sequence[int], y: Point) -> Point:
    """Digits of word followed by the digits of y.

    y must be a point of sys.shift(len(word)); the result is a point of sys.
    """
    return point(sys, tuple(word) + y.preamble, y.period)


def replace_prefix(sys: RefinementSystem, x: Point, word: Sequence[int]) -> Point:
    """Swap the first len(word) digits of x for word (an orbit mate of x)."""
    return prepend(sys, word, tail_of(sys, x, len(word)))


# ---------------------------------------------------------------------------
# order intervals


@dataclass(frozen=True)
class OrderInterval:
    lo: Point
    hi: Point
    lo_open: bool = False
    hi_open: bool = False


def interval(sys: RefinementSystem, lo: Point, hi: Point,
             lo_open: bool = False, hi_open: bool = False) -> OrderInterval:
    """Canonical nonempty order interval.

    An open flag survives only when the endpoint is a genuine limit from
    inside the interval; an open endpoint with a gap is replaced by the
    closed neighbor.  Raises EmptyIntervalError on empty intervals.
    """
    if lo_open and has_gap_above(sys, lo):
        lo, lo_open = suc(sys, lo), False
    if hi_open and has_gap_below(sys, hi):
        hi, hi_open = pred(sys, hi), False
    c = order_compare(lo, hi)
    if c > 0 or (c == 0 and (lo_open or hi_open)):
        raise EmptyIntervalError("interval is empty")
    return OrderInterval(lo, hi, lo_open, hi_open)


def full_interval(sys: RefinementSystem) -> OrderInterval:
    return OrderInterval(p_min(sys), p_max(sys))


def interval_contains(ival: OrderInterval, x: Point) -> bool:
    c = order_compare(ival.lo, x)
    if c > 0 or (c == 0 and ival.lo_open):
        return False
    c = order_compare(x, ival.hi)
    return not (c > 0 or (c == 0 and ival.hi_open))


def interval_intersect(sys: RefinementSystem, a: OrderInterval,
                       b: OrderInterval) -> Optional[OrderInterval]:
    c = order_compare(a.lo, b.lo)
    if c < 0:
        lo, lo_open = b.lo, b.lo_open
    elif c > 0:
        lo, lo_open = a.lo, a.lo_open
    else:
        lo, lo_open = a.lo, a.lo_open or b.lo_open
    c = order_compare(a.hi, b.hi)
    if c < 0:
        hi, hi_open = a.hi, a.hi_open
    elif c > 0:
        hi, hi_open = b.hi, b.hi_open
    else:
        hi, hi_open = a.hi, a.hi_open or b.hi_open
    try:
        return interval(sys, lo, hi, lo_open, hi_open)
    except EmptyIntervalError:
        return None


def interval_sup(sys: RefinementSystem, ival: OrderInterval) -> tuple[Point, bool]:
    """Least upper bound of the interval plus whether it is attained."""
    if not ival.hi_open:
        return ival.hi, True
    if has_gap_below(sys, ival.hi):
        # canonical intervals never reach here, raw ones may
        return pred(sys, ival.hi), True
    return ival.hi, False


def interval_inf(sys: RefinementSystem, ival: OrderInterval) -> tuple[Point, bool]:
    if not ival.lo_open:
        return ival.lo, True
    if has_gap_above(sys, ival.lo):
        return suc(sys, ival.lo), True
    return ival.lo, False


def interval_small_points(sys: RefinementSystem, ival: OrderInterval) -> Optional[list[Point]]:
    """The members of the interval if there are at most two, else None.

    Singletons and gap-adjacent doubletons are the only finite order
    intervals here, because a successor point is never itself succeeded.
    """
    if order_compare(ival.lo, ival.hi) == 0:
        return [ival.lo]
    if ival.lo_open or ival.hi_open:
        return None
    if has_gap_above(sys, ival.lo) and suc(sys, ival.lo) == ival.hi:
        return [ival.lo, ival.hi]
    return None


# ---------------------------------------------------------------------------
# constructing points inside intervals


def construct_between(sys: RefinementSystem, a: Point, b: Point) -> Optional[Point]:
    """Some point strictly between a and b, or None when (a, b) is empty."""
    if order_compare(a, b) >= 0:
        raise ValueError("construct_between needs a strictly below b")
    n = first_difference(a, b)
    assert n is not None
    if a.digit(n) + 1 < b.digit(n):
        head = [a.digit(i) for i in range(1, n)] + [a.digit(n) + 1]
        return min_tail_point(sys, head)
    # b_n = a_n + 1: bump a somewhere past the cut, or lower b there
    wa = max(len(a.preamble), sys.prefix_len, n)
    p = next((i for i in range(n + 1, wa + len(a.period) + 1)
              if a.digit(i) < sys.k_at(i)), None)
    if p is not None:
        head = [a.digit(i) for i in range(1, p)] + [a.digit(p) + 1]
        return min_tail_point(sys, head)
    wb = max(len(b.preamble), sys.prefix_len, n)
    q = next((i for i in range(n + 1, wb + len(b.period) + 1)
              if b.digit(i) > 1), None)
    if q is not None:
        head = [b.digit(i) for i in range(1, q)] + [b.digit(q) - 1]
        return max_tail_point(sys, head)
    return None  # a runs maximal and b minimal after the cut: b = suc(a)


def construct_between_no_gap_below(sys: RefinementSystem, a: Point,
                                   b: Point) -> Optional[Point]:
    """A point strictly between a and b that is a limit from below."""
    c = construct_between(sys, a, b)
    if c is None:
        return None
    if not has_gap_below(sys, c):
        return c
    # c = w 1 1 1 ...; slide an all-2 tail down toward it until below b
    work = list(c.preamble)
    while True:
        cand = point(sys, work, (2,) * sys.cycle_len)
        if lt(cand, b):
            return cand
        work.append(1)


# ---------------------------------------------------------------------------
# finite words


def level_words(sys: RefinementSystem, n: int) -> Iterator[tuple[int, ...]]:
    """All digit words of length n in lexicographic order."""
    return itertools.product(*(range(1, sys.k_at(i) + 1) for i in range(1, n + 1)))


def word_count(sys: RefinementSystem, n: int) -> int:
    return sys.prod(0, n)


def word_rank(sys: RefinementSystem, word: Sequence[int]) -> int:
    """Zero-based lexicographic rank of word among words of its length."""
    r = 0
    for i, d in enumerate(word, start=1):
        r = r * sys.k_at(i) + (d - 1)
    return r


def word_at(sys: RefinementSystem, n: int, rank: int) -> tuple[int, ...]:
    digits = []
    for i in range(n, 0, -1):
        rank, d = divmod(rank, sys.k_at(i))
        digits.append(d + 1)
    return tuple(reversed(digits))


# ---------------------------------------------------------------------------
# literals

# Digit strings use one character per digit when every multiplicity is a
# single digit, and dot-separated digits otherwise.  The parser accepts
# both spellings.


def _format_digits(sys: RefinementSystem, digits: Sequence[int]) -> str:
    sep = "." if sys.k_max > 9 else ""
    return sep.join(str(d) for d in digits)


def parse_digits(sys: RefinementSystem, text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    if "." in text:
        return tuple(int(s) for s in text.split("."))
    if sys.k_max > 9:
        # without dots a wide system literal can only be one digit
        return (int(text),)
    return tuple(int(ch) for ch in text)


def format_point(sys: RefinementSystem, x: Point) -> str:
    return _format_digits(sys, x.preamble) + "|" + _format_digits(sys, x.period)


def parse_point(sys: RefinementSystem, text: str) -> Point:
    head, sep, tail = text.strip().partition("|")
    if not sep:
        raise ValueError(f"point literal needs a '|' between preamble and period: {text!r}")
    return point(sys, parse_digits(sys, head), parse_digits(sys, tail))


def format_system(sys: RefinementSystem) -> str:
    return (",".join(str(k) for k in sys.prefix)
            + ";" + ",".join(str(k) for k in sys.cycle))


def parse_system(text: str) -> RefinementSystem:
    head, sep, tail = text.strip().partition(";")
    if not sep:
        raise ValueError(f"system literal needs a ';' before the cycle: {text!r}")
    def ints(s: str) -> tuple[int, ...]:
        s = s.strip()
        if not s:
            return ()
        return tuple(int(p) for p in s.split(","))
    return RefinementSystem.make(ints(head), ints(tail))
