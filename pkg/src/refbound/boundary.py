"""Piecewise boundary functions and the cylinder linkage tests.

A boundary function assigns to every point y a value phi(y) below it
(order mode) describing where an ideal set's fiber over y tops out.
This module represents them as finite piecewise functions whose pieces
are order intervals carrying one of three leaves: the identity, the
left-limit of the identity, or a constant.  Everything here is exact
and symbolic: evaluation, normalization, extensional equality, the
validity checker, the lattice operations, and the open/closed linkage
tests between matched-tail cylinder pairs.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from math import lcm
from typing import Optional, Sequence, Union

from .order import (
    EmptyIntervalError,
    OrderInterval,
    Point,
    RefinementError,
    RefinementSystem,
    construct_between_no_gap_below,
    cylinder_bounds,
    format_point,
    has_gap_above,
    has_gap_below,
    interval,
    interval_contains,
    interval_inf,
    interval_intersect,
    interval_small_points,
    interval_sup,
    le,
    lt,
    merge_level,
    orbit_test,
    order_compare,
    parse_point,
    p_max,
    p_min,
    p_test,
    prefix_digits,
    pred,
    prepend,
    suc,
    tail_of,
)


class Mode(enum.Enum):
    IDEAL = "ideal"
    MODULE = "module"


class Strictness(enum.Enum):
    NONSTRICT = "nonstrict"
    STRICT = "strict"
    RAISED = "raised"


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class IdentityMinus:
    pass


@dataclass(frozen=True)
class Const:
    value: Point


Leaf = Union[Identity, IdentityMinus, Const]
Piece = tuple[OrderInterval, Leaf]

ID = Identity()
ID_MINUS = IdentityMinus()


def minus_point(sys: RefinementSystem, x: Point) -> Point:
    """Left limit of the identity: the predecessor across a gap, else x."""
    return pred(sys, x) if has_gap_below(sys, x) else x


def plus_point(sys: RefinementSystem, x: Point) -> Point:
    return suc(sys, x) if has_gap_above(sys, x) else x


def leaf_value(sys: RefinementSystem, leaf: Leaf, y: Point) -> Point:
    if isinstance(leaf, Identity):
        return y
    if isinstance(leaf, IdentityMinus):
        return minus_point(sys, y)
    return leaf.value


def leaf_sup(sys: RefinementSystem, ival: OrderInterval, leaf: Leaf) -> tuple[Point, bool]:
    """Sup of the leaf's values over the interval, with attainment."""
    if isinstance(leaf, Const):
        return leaf.value, True
    m, attained = interval_sup(sys, ival)
    if isinstance(leaf, Identity):
        return m, attained
    # left-limit leaf: an unattained sup sits at a point with no gap below,
    # where the left limit changes nothing
    return minus_point(sys, m), attained


def leaf_inf(sys: RefinementSystem, ival: OrderInterval, leaf: Leaf) -> tuple[Point, bool]:
    if isinstance(leaf, Const):
        return leaf.value, True
    m, attained = interval_inf(sys, ival)
    if isinstance(leaf, Identity):
        return m, attained
    if attained:
        return minus_point(sys, m), True
    return m, False


@dataclass(eq=False, frozen=True)
class PiecewiseBF:
    """Piecewise boundary function.

    Equality of these objects is extensional and needs the system, so
    dataclass equality is disabled; compare through bf_eq.
    """

    pieces: tuple[Piece, ...]
    mode: Mode = Mode.IDEAL


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str


class InvalidBoundaryFunctionError(RefinementError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        text = "; ".join(f"{v.code}: {v.detail}" for v in self.violations)
        super().__init__(text or "invalid boundary function")


@dataclass(frozen=True)
class Verdict:
    kind: str  # "yes" | "no" | "unknown"
    level: Optional[int] = None

    @property
    def is_yes(self) -> bool:
        return self.kind == "yes"

    @property
    def is_no(self) -> bool:
        return self.kind == "no"

    @property
    def is_unknown(self) -> bool:
        return self.kind == "unknown"


def verdict_yes(level: int) -> Verdict:
    return Verdict("yes", level)


VERDICT_NO = Verdict("no")


def verdict_unknown(depth: int) -> Verdict:
    return Verdict("unknown", depth)


# ---------------------------------------------------------------------------
# evaluation and partition structure


def eval_bf(sys: RefinementSystem, bf: PiecewiseBF, x: Point) -> Point:
    for ival, leaf in bf.pieces:
        if interval_contains(ival, x):
            return leaf_value(sys, leaf, x)
    raise RefinementError("point not covered by any piece")


def _adjacent(sys: RefinementSystem, left: OrderInterval, right: OrderInterval) -> bool:
    if left.hi == right.lo:
        return left.hi_open != right.lo_open
    if left.hi_open or right.lo_open:
        return False
    return has_gap_above(sys, left.hi) and suc(sys, left.hi) == right.lo


def _partition_violations(sys: RefinementSystem, pieces: Sequence[Piece]) -> list[Violation]:
    out = []
    if not pieces:
        return [Violation("Partition", "no pieces")]
    first, last = pieces[0][0], pieces[-1][0]
    if first.lo != p_min(sys) or first.lo_open:
        out.append(Violation("Partition", "must start closed at the minimum point"))
    if last.hi != p_max(sys) or last.hi_open:
        out.append(Violation("Partition", "must end closed at the maximum point"))
    for (a, _), (b, _) in zip(pieces, pieces[1:]):
        if not _adjacent(sys, a, b):
            out.append(Violation(
                "Partition", "pieces neither touch with one open end nor sit across a gap"))
    return out


# ---------------------------------------------------------------------------
# normalization


_NORMALIZE_ROUNDS = 64


def normalize_bf(sys: RefinementSystem, bf: PiecewiseBF) -> PiecewiseBF:
    """Deterministic normal form: canonical interval flags, no left-limit
    leaf on one- or two-point pieces, no mergeable neighbors.

    Does not fully collapse every extensionally equal pair of
    representations; bf_eq decides that instead.
    """
    pieces = [(interval(sys, i.lo, i.hi, i.lo_open, i.hi_open), lf) for i, lf in bf.pieces]
    for _ in range(_NORMALIZE_ROUNDS):
        changed = False

        out: list[Piece] = []
        for ival, leaf in pieces:
            pts = interval_small_points(sys, ival)
            if pts is not None and len(pts) == 2 and isinstance(leaf, IdentityMinus):
                out.append((interval(sys, pts[0], pts[0]), leaf))
                out.append((interval(sys, pts[1], pts[1]), leaf))
                changed = True
            else:
                out.append((ival, leaf))
        pieces = out

        out = []
        for ival, leaf in pieces:
            if ival.lo == ival.hi:
                y = ival.lo
                val = leaf_value(sys, leaf, y)
                canon: Leaf = ID if val == y else Const(val)
                if canon != leaf:
                    leaf, changed = canon, True
            out.append((ival, leaf))
        pieces = out

        # absorb singleton pieces into a neighbor computing the same value
        out = []
        i = 0
        while i < len(pieces):
            ival, leaf = pieces[i]
            if ival.lo == ival.hi:
                y = ival.lo
                val = leaf_value(sys, leaf, y)
                if out and _adjacent(sys, out[-1][0], ival) \
                        and leaf_value(sys, out[-1][1], y) == val:
                    prev_i, prev_leaf = out.pop()
                    out.append((interval(sys, prev_i.lo, y, prev_i.lo_open, False), prev_leaf))
                    changed = True
                    i += 1
                    continue
                if i + 1 < len(pieces):
                    nxt_i, nxt_leaf = pieces[i + 1]
                    if _adjacent(sys, ival, nxt_i) and leaf_value(sys, nxt_leaf, y) == val:
                        out.append((interval(sys, y, nxt_i.hi, False, nxt_i.hi_open), nxt_leaf))
                        changed = True
                        i += 2
                        continue
            out.append((ival, leaf))
            i += 1
        pieces = out

        out = []
        for ival, leaf in pieces:
            if out and out[-1][1] == leaf and _adjacent(sys, out[-1][0], ival):
                prev_i, _ = out.pop()
                out.append((interval(sys, prev_i.lo, ival.hi, prev_i.lo_open, ival.hi_open), leaf))
                changed = True
            else:
                out.append((ival, leaf))
        pieces = out

        if not changed:
            return PiecewiseBF(tuple(pieces), bf.mode)
    raise RefinementError("normalization did not stabilize")


# ---------------------------------------------------------------------------
# overlay and extensional comparisons


def _end_order(a: OrderInterval, b: OrderInterval) -> int:
    c = order_compare(a.hi, b.hi)
    if c != 0:
        return c
    if a.hi_open == b.hi_open:
        return 0
    return -1 if a.hi_open else 1


def overlay(sys: RefinementSystem, f: PiecewiseBF,
            g: PiecewiseBF) -> list[tuple[OrderInterval, Leaf, Leaf]]:
    """Common refinement of two partitions with both leaves per cell."""
    cells = []
    i = j = 0
    while i < len(f.pieces) and j < len(g.pieces):
        fi, fl = f.pieces[i]
        gi, gl = g.pieces[j]
        cell = interval_intersect(sys, fi, gi)
        if cell is not None:
            cells.append((cell, fl, gl))
        c = _end_order(fi, gi)
        if c <= 0:
            i += 1
        if c >= 0:
            j += 1
    return cells


def _cell_equal(sys: RefinementSystem, cell: OrderInterval, lf: Leaf, lg: Leaf) -> bool:
    if type(lf) is type(lg):
        if isinstance(lf, Const):
            return lf.value == lg.value
        return True
    pts = interval_small_points(sys, cell)
    if pts is None:
        return False
    return all(leaf_value(sys, lf, y) == leaf_value(sys, lg, y) for y in pts)


def bf_eq(sys: RefinementSystem, f: PiecewiseBF, g: PiecewiseBF) -> bool:
    """Extensional equality: the same value at every point."""
    return all(_cell_equal(sys, cell, lf, lg) for cell, lf, lg in overlay(sys, f, g))


def _cell_le(sys: RefinementSystem, cell: OrderInterval, lf: Leaf, lg: Leaf) -> bool:
    if isinstance(lf, Const) and isinstance(lg, Const):
        return le(lf.value, lg.value)
    if isinstance(lg, Const):
        v, _ = leaf_sup(sys, cell, lf)
        return le(v, lg.value)
    if isinstance(lf, Const):
        v, _ = leaf_inf(sys, cell, lg)
        return le(lf.value, v)
    if isinstance(lf, IdentityMinus):
        return True
    if isinstance(lg, IdentityMinus):
        pts = interval_small_points(sys, cell)
        if pts is None:
            return False
        return all(not has_gap_below(sys, y) for y in pts)
    return True


def pointwise_le(sys: RefinementSystem, f: PiecewiseBF, g: PiecewiseBF) -> bool:
    return all(_cell_le(sys, cell, lf, lg) for cell, lf, lg in overlay(sys, f, g))


# ---------------------------------------------------------------------------
# one-sided companions


def bf_minus(sys: RefinementSystem, f: PiecewiseBF) -> PiecewiseBF:
    """Left-limit companion: the value's predecessor across value gaps."""
    pieces = []
    for ival, leaf in f.pieces:
        if isinstance(leaf, Identity):
            pieces.append((ival, ID_MINUS))
        elif isinstance(leaf, IdentityMinus):
            pieces.append((ival, leaf))
        else:
            pieces.append((ival, Const(minus_point(sys, leaf.value))))
    return normalize_bf(sys, PiecewiseBF(tuple(pieces), f.mode))


# ---------------------------------------------------------------------------
# cylinder linkage against a boundary function
#
# For level-N words u, v the matched-tail cylinder pair is
# {(u w, v w) : w a tail}.  The tests below decide, per strictness,
# whether every matched pair lies weakly below phi, strictly below phi,
# or weakly below the gap-raised phi.  Each overlay cell of the v-side
# cylinder reduces to a word comparison or an endpoint comparison.


def _cylinder_interval(sys: RefinementSystem, word: Sequence[int]) -> OrderInterval:
    lo, hi = cylinder_bounds(sys, word)
    return interval(sys, lo, hi)


def _cell_tail_interval(sys: RefinementSystem, n: int, cell: OrderInterval) -> OrderInterval:
    shifted = sys.shift(n)
    return interval(shifted,
                    tail_of(sys, cell.lo, n), tail_of(sys, cell.hi, n),
                    cell.lo_open, cell.hi_open)


def cylinder_within_eta(sys: RefinementSystem, bf: PiecewiseBF,
                        u: Sequence[int], v: Sequence[int],
                        strictness: Strictness = Strictness.NONSTRICT) -> bool:
    """Does every matched-tail pair (u w, v w) sit below the function?

    Nonstrict compares against phi(v w), strict demands strict order,
    and raised compares against phi(v w) pushed through its gap above.
    """
    u, v = tuple(u), tuple(v)
    if len(u) != len(v):
        raise ValueError("cylinder words must have one length")
    n = len(v)
    cyl = _cylinder_interval(sys, v)
    for ival, leaf in bf.pieces:
        cell = interval_intersect(sys, ival, cyl)
        if cell is None:
            continue
        if isinstance(leaf, Identity):
            if strictness is Strictness.STRICT:
                if not u < v:
                    return False
            elif not u <= v:
                return False
        elif isinstance(leaf, IdentityMinus):
            if u > v:
                return False
            if u == v:
                if strictness is Strictness.STRICT:
                    return False
                if strictness is Strictness.NONSTRICT:
                    pts = interval_small_points(sys, cell)
                    if pts is None or any(has_gap_below(sys, z) for z in pts):
                        return False
        else:
            target = leaf.value
            if strictness is Strictness.RAISED:
                target = plus_point(sys, target)
            w_sup, attained = interval_sup(sys, _cell_tail_interval(sys, n, cell))
            high = prepend(sys, u, w_sup)
            if strictness is Strictness.STRICT and attained:
                if not lt(high, target):
                    return False
            elif not le(high, target):
                return False
    return True


def _scan_bound(sys: RefinementSystem, bf: PiecewiseBF, x: Point, y: Point) -> int:
    pre = [len(x.preamble), len(y.preamble), sys.prefix_len]
    per = [len(x.period), len(y.period), sys.cycle_len]
    for ival, leaf in bf.pieces:
        for pt in (ival.lo, ival.hi) + ((leaf.value,) if isinstance(leaf, Const) else ()):
            pre.append(len(pt.preamble))
            per.append(len(pt.period))
    return max(pre) + 2 * lcm(*per)


def sigma_member(sys: RefinementSystem, bf: PiecewiseBF, x: Point, y: Point,
                 depth_cap: Optional[int] = None) -> Verdict:
    """Membership of the pair (x, y) in the open set carved out by bf.

    The pair belongs iff some matched-tail cylinder around it sits
    entirely below the function.  The search over cylinder levels is
    complete: beyond the preamble data everything repeats, so levels up
    to the computed bound decide.  A depth cap below that bound can
    leave the answer unknown.
    """
    if bf.mode is Mode.IDEAL:
        if not p_test(x, y):
            return VERDICT_NO
    else:
        if not orbit_test(x, y):
            return VERDICT_NO
    start = merge_level(x, y)
    bound = max(start, _scan_bound(sys, bf, x, y))
    stop = bound if depth_cap is None else min(depth_cap, bound)
    for m in range(start, stop + 1):
        if cylinder_within_eta(sys, bf, prefix_digits(x, m), prefix_digits(y, m)):
            return verdict_yes(m)
    if stop < bound:
        return verdict_unknown(stop)
    return VERDICT_NO


def eta_member(sys: RefinementSystem, bf: PiecewiseBF, x: Point, y: Point) -> bool:
    """Membership of (x, y) in the closed companion: x weakly below phi(y)."""
    if bf.mode is Mode.IDEAL:
        if not p_test(x, y):
            return False
    elif not orbit_test(x, y):
        return False
    return le(x, eval_bf(sys, bf, y))


# ---------------------------------------------------------------------------
# the gap-raised companion


def level_set_max(sys: RefinementSystem, bf: PiecewiseBF,
                  c: Point) -> Optional[tuple[Point, bool]]:
    """Largest solution of phi(y) = c, with attainment, scanning from the top."""
    for ival, leaf in reversed(bf.pieces):
        if isinstance(leaf, Const):
            if leaf.value == c:
                return interval_sup(sys, ival)
            continue
        if isinstance(leaf, IdentityMinus):
            if has_gap_above(sys, c):
                cand = suc(sys, c)
                if interval_contains(ival, cand):
                    return cand, True
            if not has_gap_below(sys, c) and interval_contains(ival, c):
                return c, True
            continue
        if interval_contains(ival, c):
            return c, True
    return None


@dataclass(frozen=True)
class ModificationCertificate:
    """Matched-tail cylinder witnessing the raised linkage at y."""

    y: Point
    u: tuple[int, ...]
    v: tuple[int, ...]


def modification_certificate(sys: RefinementSystem, bf: PiecewiseBF,
                             y: Point) -> tuple[Verdict, Optional[ModificationCertificate]]:
    """Can the value at y be raised through its gap without leaving the class?

    Needs a gap below y, a gap above phi(y), and the raised linkage of
    (suc phi(y), y) through some matched-tail cylinder; a Yes comes
    with the first witnessing cylinder.
    """
    if not has_gap_below(sys, y):
        return VERDICT_NO, None
    fy = eval_bf(sys, bf, y)
    if not has_gap_above(sys, fy):
        return VERDICT_NO, None
    target = suc(sys, fy)
    if not orbit_test(target, y):
        return VERDICT_NO, None
    start = merge_level(target, y)
    bound = max(start, _scan_bound(sys, bf, target, y))
    for m in range(start, bound + 1):
        u, v = prefix_digits(target, m), prefix_digits(y, m)
        if cylinder_within_eta(sys, bf, u, v, Strictness.RAISED):
            return verdict_yes(m), ModificationCertificate(y, u, v)
    return VERDICT_NO, None


def is_point_of_modification(sys: RefinementSystem, bf: PiecewiseBF, y: Point) -> bool:
    return modification_certificate(sys, bf, y)[0].is_yes


def bf_plus(sys: RefinementSystem, f: PiecewiseBF) -> PiecewiseBF:
    """Right companion: raise the value through its gap at every point
    of modification.

    Identity pieces have no such points.  On a left-limit piece every
    point with a gap below is one, except possibly a closed right
    endpoint, which gets checked individually.  On a constant piece
    only the top of the value's level set qualifies, and only when
    attained here.
    """
    out: list[Piece] = []
    for ival, leaf in f.pieces:
        if isinstance(leaf, Identity):
            out.append((ival, leaf))
            continue
        if isinstance(leaf, IdentityMinus):
            top_stays = not ival.hi_open and has_gap_below(sys, ival.hi) \
                and not is_point_of_modification(sys, f, ival.hi)
            if not top_stays:
                out.append((ival, ID))
                continue
            try:
                head = interval(sys, ival.lo, ival.hi, ival.lo_open, True)
            except EmptyIntervalError:
                head = None
            if head is not None:
                out.append((head, ID))
            out.append((interval(sys, ival.hi, ival.hi), Const(pred(sys, ival.hi))))
            continue
        c = leaf.value
        split = False
        if has_gap_above(sys, c) and not ival.hi_open:
            top = level_set_max(sys, f, c)
            if top == (ival.hi, True) and has_gap_below(sys, ival.hi) \
                    and is_point_of_modification(sys, f, ival.hi):
                split = True
        if split:
            try:
                head = interval(sys, ival.lo, ival.hi, ival.lo_open, True)
            except EmptyIntervalError:
                head = None
            if head is not None:
                out.append((head, leaf))
            out.append((interval(sys, ival.hi, ival.hi), Const(suc(sys, c))))
        else:
            out.append((ival, leaf))
    return normalize_bf(sys, PiecewiseBF(tuple(out), f.mode))


def bf_equiv(sys: RefinementSystem, f: PiecewiseBF, g: PiecewiseBF) -> bool:
    """Same left limits everywhere: the two carve out the same open set."""
    return bf_eq(sys, bf_minus(sys, f), bf_minus(sys, g))


def bf_between(sys: RefinementSystem, f: PiecewiseBF, g: PiecewiseBF) -> bool:
    """Does g lie between the left and right companions of f?"""
    return pointwise_le(sys, bf_minus(sys, f), g) \
        and pointwise_le(sys, g, bf_plus(sys, f))


# ---------------------------------------------------------------------------
# validity


def _attained_top_gap_value(sys: RefinementSystem, ival: OrderInterval,
                            leaf: Leaf) -> Optional[Point]:
    """Value attained at the top of the piece, if it has a gap below."""
    if ival.hi_open:
        return None
    val = leaf_value(sys, leaf, ival.hi)
    if has_gap_below(sys, val):
        return val
    return None


def validate_bf(sys: RefinementSystem, bf: PiecewiseBF) -> list[Violation]:
    """All violations of the boundary function laws, empty when valid.

    Checks the partition, the below-the-identity law (order mode), the
    two laws about values with a gap below (their pair linkage and the
    climb just above them), monotonicity between pieces, and left
    continuity at piece starts.
    """
    out = _partition_violations(sys, bf.pieces)
    if out:
        return out
    pieces = bf.pieces

    def fmt(p: Point) -> str:
        return format_point(sys, p)

    if bf.mode is Mode.IDEAL:
        for ival, leaf in pieces:
            if isinstance(leaf, Const):
                m, _ = interval_inf(sys, ival)
                if not le(leaf.value, m):
                    out.append(Violation(
                        "Property1", f"constant value {fmt(leaf.value)} above points of its piece"))

    for ival, leaf in pieces:
        if not isinstance(leaf, Const) or not has_gap_below(sys, leaf.value):
            continue
        c = leaf.value
        pts = interval_small_points(sys, ival)
        if pts is None:
            # an infinite piece always holds a point with no gap below
            pts = [construct_between_no_gap_below(sys, ival.lo, ival.hi) or ival.hi]
        for y in pts:
            if not has_gap_below(sys, y):
                out.append(Violation(
                    "Property2b",
                    f"value {fmt(c)} with a gap below is taken at {fmt(y)} "
                    "which has no gap below"))
            linked = p_test(c, y) if bf.mode is Mode.IDEAL else orbit_test(c, y)
            if not linked:
                out.append(Violation(
                    "Property2a",
                    f"value {fmt(c)} with a gap below is not orbit-linked below {fmt(y)}"))

    for i, (ival, leaf) in enumerate(pieces):
        gap_val = _attained_top_gap_value(sys, ival, leaf)
        if gap_val is None or i + 1 >= len(pieces):
            continue
        nxt_i, nxt_leaf = pieces[i + 1]
        m, attained = leaf_inf(sys, nxt_i, nxt_leaf)
        ok = lt(gap_val, m) if attained else le(gap_val, m)
        if not ok:
            out.append(Violation(
                "Property2c",
                f"values just above {fmt(ival.hi)} do not climb past {fmt(gap_val)}"))

    for i, (ival, leaf) in enumerate(pieces):
        gap_val = _attained_top_gap_value(sys, ival, leaf)
        if gap_val is None:
            continue
        if isinstance(leaf, Identity):
            if i + 1 >= len(pieces):
                continue
            nxt_leaf = pieces[i + 1][1]
            if isinstance(nxt_leaf, IdentityMinus):
                out.append(Violation(
                    "Property2d",
                    f"left limits right after {fmt(ival.hi)} fall back onto it"))
            elif isinstance(nxt_leaf, Const) and not lt(ival.hi, nxt_leaf.value):
                out.append(Violation(
                    "Property2d",
                    f"the pair at {fmt(ival.hi)} has no matched-tail cylinder below the function"))
        elif isinstance(leaf, Const):
            if not sigma_member(sys, bf, gap_val, ival.hi).is_yes:
                out.append(Violation(
                    "Property2d",
                    f"the pair ({fmt(gap_val)}, {fmt(ival.hi)}) has no matched-tail "
                    "cylinder below the function"))

    for (a_i, a_l), (b_i, b_l) in zip(pieces, pieces[1:]):
        s, _ = leaf_sup(sys, a_i, a_l)
        m, _ = leaf_inf(sys, b_i, b_l)
        if not le(s, m):
            out.append(Violation(
                "Property3", f"values drop from {fmt(s)} to {fmt(m)} across pieces"))

    for i in range(1, len(pieces)):
        ival, leaf = pieces[i]
        if ival.lo_open:
            continue
        y = ival.lo
        if has_gap_below(sys, y):
            continue
        if bf.mode is Mode.MODULE and y == p_min(sys):
            continue
        s, _ = leaf_sup(sys, pieces[i - 1][0], pieces[i - 1][1])
        if leaf_value(sys, leaf, y) != s:
            out.append(Violation(
                "Property4",
                f"value at {fmt(y)} is not the limit {fmt(s)} from below"))

    return out


def make_bf(sys: RefinementSystem, pieces: Sequence[Piece],
            mode: Mode = Mode.IDEAL) -> PiecewiseBF:
    """Validating constructor: normalize, then reject any law violation."""
    raw = PiecewiseBF(tuple(pieces), mode)
    structural = _partition_violations(sys, raw.pieces)
    if structural:
        raise InvalidBoundaryFunctionError(structural)
    bf = normalize_bf(sys, raw)
    violations = validate_bf(sys, bf)
    if violations:
        raise InvalidBoundaryFunctionError(violations)
    return bf


def identity_bf(sys: RefinementSystem, mode: Mode = Mode.IDEAL) -> PiecewiseBF:
    return PiecewiseBF(((interval(sys, p_min(sys), p_max(sys)), ID),), mode)


def const_bf(sys: RefinementSystem, c: Point, mode: Mode = Mode.IDEAL) -> PiecewiseBF:
    return make_bf(sys, ((interval(sys, p_min(sys), p_max(sys)), Const(c)),), mode)


def _format_leaf(sys: RefinementSystem, leaf: Leaf) -> str:
    if isinstance(leaf, Identity):
        return "id"
    if isinstance(leaf, IdentityMinus):
        return "id-"
    return f"const({format_point(sys, leaf.value)})"


def format_bf(sys: RefinementSystem, bf: PiecewiseBF) -> str:
    """Literal form: `[lo, hi] -> leaf` pieces joined by `;`.

    The normalized pieces are printed so that parse_bf(format_bf(f))
    is extensionally equal to f.
    """
    bf = normalize_bf(sys, bf)
    bits = []
    for ival, leaf in bf.pieces:
        lo_br = "(" if ival.lo_open else "["
        hi_br = ")" if ival.hi_open else "]"
        bits.append(f"{lo_br}{format_point(sys, ival.lo)}, "
                    f"{format_point(sys, ival.hi)}{hi_br}"
                    f" -> {_format_leaf(sys, leaf)}")
    text = "; ".join(bits)
    return f"module {text}" if bf.mode is Mode.MODULE else text


_PIECE_RE = re.compile(
    r"^\s*([\[(])\s*([^,\s]+)\s*,\s*([^\s\])]+)\s*([\])])\s*->\s*"
    r"(id-|id|const\(\s*([^)\s]+)\s*\))\s*$")


def parse_bf(sys: RefinementSystem, text: str) -> PiecewiseBF:
    """Parse the piece-list literal emitted by format_bf.

    Raises ValueError on grammar problems and
    InvalidBoundaryFunctionError when the pieces break the laws.
    """
    body = text.strip()
    mode = Mode.IDEAL
    if body.startswith("module"):
        mode = Mode.MODULE
        body = body[len("module"):].strip()
    if not body:
        raise ValueError("empty boundary function literal")
    pieces = []
    for chunk in body.split(";"):
        m = _PIECE_RE.match(chunk)
        if not m:
            raise ValueError(f"bad piece {chunk.strip()!r}; "
                             "expected '[lo, hi] -> id | id- | const(point)'")
        lo = parse_point(sys, m.group(2))
        hi = parse_point(sys, m.group(3))
        ival = interval(sys, lo, hi, m.group(1) == "(", m.group(4) == ")")
        if m.group(5) == "id":
            leaf: Leaf = ID
        elif m.group(5) == "id-":
            leaf = ID_MINUS
        else:
            leaf = Const(parse_point(sys, m.group(6)))
        pieces.append((ival, leaf))
    return make_bf(sys, pieces, mode)


# ---------------------------------------------------------------------------
# lattice operations


def _split_cell(sys: RefinementSystem, cell: OrderInterval, idish: Leaf,
                c: Point, const_low: bool) -> list[Piece]:
    """Pieces of the join/meet of an identity-like leaf with a constant."""
    lo_part = interval_intersect(sys, cell, interval(sys, p_min(sys), c))
    hi_part = None
    try:
        above = interval(sys, c, p_max(sys), lo_open=True)
    except EmptyIntervalError:
        above = None
    if above is not None:
        hi_part = interval_intersect(sys, cell, above)
    out: list[Piece] = []
    if lo_part is not None:
        out.append((lo_part, Const(c) if const_low else idish))
    if hi_part is not None:
        out.append((hi_part, idish if const_low else Const(c)))
    return out


def _cell_lattice(sys: RefinementSystem, cell: OrderInterval, lf: Leaf, lg: Leaf,
                  join: bool) -> list[Piece]:
    if isinstance(lf, Const) and isinstance(lg, Const):
        if join:
            v = lf.value if le(lg.value, lf.value) else lg.value
        else:
            v = lf.value if le(lf.value, lg.value) else lg.value
        return [(cell, Const(v))]
    if isinstance(lf, Const) or isinstance(lg, Const):
        const = lf if isinstance(lf, Const) else lg
        idish = lg if isinstance(lf, Const) else lf
        return _split_cell(sys, cell, idish, const.value, const_low=join)
    if type(lf) is type(lg):
        return [(cell, lf)]
    # identity against its left limit
    return [(cell, ID if join else ID_MINUS)]


def _lattice(sys: RefinementSystem, f: PiecewiseBF, g: PiecewiseBF,
             join: bool) -> PiecewiseBF:
    if f.mode is not g.mode:
        raise ValueError("cannot combine functions across modes")
    pieces: list[Piece] = []
    for cell, lf, lg in overlay(sys, f, g):
        pieces.extend(_cell_lattice(sys, cell, lf, lg, join))
    out = normalize_bf(sys, PiecewiseBF(tuple(pieces), f.mode))
    violations = validate_bf(sys, out)
    if violations:
        raise RefinementError(
            f"lattice result failed validation, which should be impossible: {violations}")
    return out


def bf_join(sys: RefinementSystem, f: PiecewiseBF, g: PiecewiseBF) -> PiecewiseBF:
    """Pointwise maximum; stays inside the class."""
    return _lattice(sys, f, g, join=True)


def bf_lattice(op: str, sys: RefinementSystem, f: PiecewiseBF,
               g: PiecewiseBF) -> PiecewiseBF:
    if op == "join":
        return bf_join(sys, f, g)
    if op == "meet":
        return bf_meet(sys, f, g)
    raise ValueError(f"unknown lattice op: {op!r}")


def bf_meet(sys: RefinementSystem, f: PiecewiseBF, g: PiecewiseBF) -> PiecewiseBF:
    """Pointwise minimum; stays inside the class."""
    return _lattice(sys, f, g, join=False)
