"""Lattice irreducibility for boundary functions and ideal sets.

A boundary function is meet (join) irreducible when it cannot be
written as a pointwise min (max) of two other boundary functions
different from it.  The classifiers here return normal-form tags for
the irreducible shapes and, in every reducible case, a witness pair
that is verified exactly before it is returned.

The ideal-set classifiers cover the strip / strip-plus catalog for
meets and the corner catalog for joins; anything else comes back
not-in-catalog rather than guessed at.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

from .boundary import (
    Const,
    ID,
    IdentityMinus,
    Mode,
    PiecewiseBF,
    bf_eq,
    bf_join,
    bf_meet,
    const_bf,
    eval_bf,
    level_set_max,
    make_bf,
    minus_point,
    normalize_bf,
    plus_point,
)
from .idealsets import (
    Corner,
    Empty,
    Full,
    Strip,
    StripPlus,
    boundary_of,
    member,
    _sample_pairs,
)
from .order import (
    EmptyIntervalError,
    OrderInterval,
    Point,
    RefinementError,
    RefinementSystem,
    construct_between_no_gap_below,
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
    min_tail_point,
    order_compare,
    p_max,
    p_min,
    p_test,
    pred,
    prefix_digits,
    suc,
    word_at,
    word_rank,
)

_KEY = functools.cmp_to_key(order_compare)


# ---------------------------------------------------------------------------
# symbolic subsets of X

# a part filters the members of one order interval; an infinite order
# interval contains infinitely many points of every kind, so deciding
# cardinality only ever needs the small-interval enumeration
_KINDS = ("all", "no_gap_below", "gap_below_only", "gap_above_only")


@dataclass(frozen=True)
class IntervalPart:
    ival: OrderInterval
    kind: str = "all"


@dataclass(frozen=True)
class SymbolicSet:
    """Finite union of filtered order intervals and isolated points."""

    parts: tuple = ()
    points: tuple = ()


def _kind_ok(sys: RefinementSystem, kind: str, x: Point) -> bool:
    if kind == "all":
        return True
    if kind == "no_gap_below":
        return not has_gap_below(sys, x)
    if kind == "gap_below_only":
        return has_gap_below(sys, x)
    if kind == "gap_above_only":
        return has_gap_above(sys, x)
    raise ValueError(f"unknown part kind: {kind!r}")


def set_contains(sys: RefinementSystem, s: SymbolicSet, x: Point) -> bool:
    if any(x == p for p in s.points):
        return True
    return any(interval_contains(part.ival, x) and _kind_ok(sys, part.kind, x)
               for part in s.parts)


def set_values(sys: RefinementSystem, s: SymbolicSet) -> Optional[list[Point]]:
    """Sorted distinct members when the set is finite, else None."""
    out = list(s.points)
    for part in s.parts:
        small = interval_small_points(sys, part.ival)
        if small is None:
            return None
        out.extend(p for p in small if _kind_ok(sys, part.kind, p))
    dedup: list[Point] = []
    for p in sorted(out, key=_KEY):
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    return dedup


@dataclass(frozen=True)
class DropDescriptor:
    """Where the function falls below the identity, and to what values."""

    ed: SymbolicSet
    rd: SymbolicSet


def _part(sys, lo, hi, lo_open, hi_open, kind) -> Optional[IntervalPart]:
    try:
        return IntervalPart(interval(sys, lo, hi, lo_open, hi_open), kind)
    except EmptyIntervalError:
        return None


def range_and_drop(sys: RefinementSystem,
                   bf: PiecewiseBF) -> tuple[SymbolicSet, DropDescriptor]:
    """Exact image of the function, plus its drop sets."""
    bf = normalize_bf(sys, bf)
    ran_parts, ran_points = [], []
    ed_parts, rd_parts, rd_points = [], [], []
    for ival, leaf in bf.pieces:
        if isinstance(leaf, Const):
            ran_points.append(leaf.value)
            above = _part(sys, leaf.value, ival.hi, True, ival.hi_open, "all")
            if above is not None:
                inter = interval_intersect(sys, above.ival, ival)
                if inter is not None:
                    ed_parts.append(IntervalPart(inter))
                    rd_points.append(leaf.value)
            continue
        if isinstance(leaf, IdentityMinus):
            img_lo, img_lo_open = ((ival.lo, True) if ival.lo_open
                                   else (minus_point(sys, ival.lo), False))
            img_hi, img_hi_open = ((ival.hi, True) if ival.hi_open
                                   else (minus_point(sys, ival.hi), False))
            p = _part(sys, img_lo, img_hi, img_lo_open, img_hi_open,
                      "no_gap_below")
            if p is not None:
                ran_parts.append(p)
            ed_parts.append(IntervalPart(ival, "gap_below_only"))
            # dropped-to values: predecessors of the gap-below points
            rd_hi, rd_hi_open = ((ival.hi, True) if ival.hi_open
                                 else (minus_point(sys, ival.hi),
                                       not has_gap_below(sys, ival.hi)))
            p = _part(sys, img_lo, rd_hi, img_lo_open, rd_hi_open,
                      "gap_above_only")
            if p is not None:
                rd_parts.append(p)
            continue
        ran_parts.append(IntervalPart(ival))
    ran = SymbolicSet(tuple(ran_parts), tuple(ran_points))
    drop = DropDescriptor(SymbolicSet(tuple(ed_parts)),
                          SymbolicSet(tuple(rd_parts), tuple(rd_points)))
    return ran, drop


# ---------------------------------------------------------------------------
# normal-form recognition


@dataclass(frozen=True)
class BFForm:
    """Pattern tag for the named families, with their parameters."""

    tag: str  # identity | minimal | phi_ab | psi_paab | phi_at | general
    params: tuple = ()
    canonical: Optional[PiecewiseBF] = None


def _const_starts_at(sys, piece_lo: Point, value: Point) -> bool:
    # the constant stretch may be written from its value or from the
    # successor of its value; both spell the same function
    if piece_lo == value:
        return True
    return has_gap_above(sys, value) and suc(sys, value) == piece_lo


def bf_form(sys: RefinementSystem, bf: PiecewiseBF) -> BFForm:
    phi = normalize_bf(sys, bf)
    pieces = phi.pieces
    shape = "".join("I" if leaf == ID else
                    "C" if isinstance(leaf, Const) else "M"
                    for _, leaf in pieces)
    bottom = p_min(sys)
    if shape == "I":
        return BFForm("identity", (), phi)
    if shape == "C":
        if pieces[0][1].value == bottom:
            return BFForm("minimal", (), phi)
        return BFForm("general", (), phi)
    if shape in ("IC", "CI", "ICI"):
        ival, leaf = pieces[shape.index("C")]
        a = leaf.value
        if le(a, ival.lo) and _const_starts_at(sys, ival.lo, a):
            return BFForm("phi_ab", (a, ival.hi), phi)
        return BFForm("general", (), phi)
    if shape == "CC":
        (iv1, c1), (_, c2) = pieces
        if c1.value == bottom and lt(bottom, c2.value):
            return BFForm("phi_at", (c2.value, iv1.hi), phi)
        return BFForm("general", (), phi)
    if shape in ("ICC", "ICCI"):
        (iv1, c1), (iv2, c2) = pieces[1], pieces[2]
        v1, v2 = c1.value, c2.value
        if (has_gap_above(sys, v1) and suc(sys, v1) == v2
                and iv2.lo == iv2.hi
                and _const_starts_at(sys, iv1.lo, v1)):
            return BFForm("psi_paab", (v1, v2, iv2.lo), phi)
        return BFForm("general", (), phi)
    return BFForm("general", (), phi)


# ---------------------------------------------------------------------------
# classification verdicts


@dataclass(frozen=True)
class MeetClass:
    kind: str  # identity_form | phi_ab | psi_paab | reducible
    params: tuple = ()
    witnesses: Optional[tuple] = None

    @property
    def irreducible(self) -> bool:
        return self.kind != "reducible"


@dataclass(frozen=True)
class JoinClass:
    kind: str  # minimal_form | phi_at | reducible
    params: tuple = ()
    witnesses: Optional[tuple] = None

    @property
    def irreducible(self) -> bool:
        return self.kind != "reducible"


def _require_ideal(bf: PiecewiseBF) -> None:
    if bf.mode is not Mode.IDEAL:
        raise RefinementError("classification covers ideal-mode functions only")


def _internal(msg: str) -> RefinementError:
    return RefinementError(f"classification self-check failed: {msg}")


def _gap_below_points_inside(sys: RefinementSystem, ival: OrderInterval,
                             count: int) -> list[Point]:
    """Strictly increasing eventually-low points interior to the interval.

    Only meaningful for infinite intervals, where enough interior
    cylinders exist at some finite level.
    """
    bottom = p_min(sys)
    for n in range(1, 200):
        ra = word_rank(sys, prefix_digits(ival.lo, n))
        rb = word_rank(sys, prefix_digits(ival.hi, n))
        if rb - ra <= count:
            continue
        out = []
        for r in range(ra + 1, rb):
            cand = min_tail_point(sys, word_at(sys, n, r))
            if lt(ival.lo, cand) and lt(cand, ival.hi) and cand != bottom:
                out.append(cand)
        if len(out) >= count:
            return out[:count]
    raise _internal(f"could not find {count} interior points")


def _sup_leq(sys: RefinementSystem, bf: PiecewiseBF, c: Point) -> Point:
    """Largest y with phi(y) <= c (the split point of that level set)."""
    for ival, leaf in reversed(bf.pieces):
        if isinstance(leaf, Const):
            if le(leaf.value, c):
                return interval_sup(sys, ival)[0]
            continue
        bound = plus_point(sys, c) if isinstance(leaf, IdentityMinus) else c
        lo_pt, lo_att = interval_inf(sys, ival)
        if lt(bound, lo_pt) or (bound == lo_pt and not lo_att):
            continue
        hi_pt, _ = interval_sup(sys, ival)
        return hi_pt if le(hi_pt, bound) else bound
    raise _internal("no point maps at or below the target")


def _split_bf(sys, bf: PiecewiseBF, t: Point, left, right) -> PiecewiseBF:
    """Reassemble a function from [p_min, t] and (t, p_max] halves.

    Each side is either "keep" (copy the pieces of bf over that side)
    or a leaf to apply to the whole side.
    """
    pieces = []
    for side_ival, spec in ((interval(sys, p_min(sys), t), left),
                            (interval(sys, t, p_max(sys), lo_open=True),
                             right)):
        if spec == "keep":
            for ival, leaf in bf.pieces:
                inter = interval_intersect(sys, ival, side_ival)
                if inter is not None:
                    pieces.append((inter, leaf))
        else:
            pieces.append((side_ival, spec))
    return make_bf(sys, pieces, bf.mode)


def _check_witnesses(sys, phi, w1, w2, combine, what: str) -> None:
    if bf_eq(sys, w1, phi) or bf_eq(sys, w2, phi):
        raise _internal(f"{what} witness equals the function")
    if not bf_eq(sys, combine(sys, w1, w2), phi):
        raise _internal(f"{what} witnesses do not recompose the function")


def classify_meet_bf(sys: RefinementSystem, bf: PiecewiseBF) -> MeetClass:
    """Meet irreducibility, decided by the set of dropped-to values."""
    _require_ideal(bf)
    phi = normalize_bf(sys, bf)
    _, drop = range_and_drop(sys, phi)
    vals = set_values(sys, drop.rd)

    if vals is not None and not vals:
        if bf_form(sys, phi).tag != "identity":
            raise _internal("empty drop set off the identity")
        return MeetClass("identity_form")

    if vals is None:
        # a stretch drops densely; harvest two well-separated dropped-to
        # values from inside it
        ival = next(iv for iv, leaf in phi.pieces
                    if isinstance(leaf, IdentityMinus)
                    and interval_small_points(sys, iv) is None)
        ys = _gap_below_points_inside(sys, ival, 4)
        return _reduce_meet(sys, phi, pred(sys, ys[0]), pred(sys, ys[3]))

    if len(vals) == 1:
        a = vals[0]
        if has_gap_below(sys, a):
            raise _internal("single dropped-to value sits above a gap")
        b = _drop_sup(sys, phi)
        if not bf_eq(sys, phi, construct_family(sys, "phi_ab", a=a, b=b)):
            raise _internal("single-value drop is not the plateau form")
        return MeetClass("phi_ab", (a, b))

    if (len(vals) == 2 and has_gap_above(sys, vals[0])
            and suc(sys, vals[0]) == vals[1]):
        pa, a = vals
        got = level_set_max(sys, phi, a)
        if got is None or not got[1]:
            raise _internal("upper gap value never attained")
        b = got[0]
        if not bf_eq(sys, phi, construct_family(sys, "psi_paab", a=a, b=b)):
            raise _internal("gap-pair drop is not the stepped form")
        return MeetClass("psi_paab", (pa, a, b))

    u, w = _spread_pair(sys, vals)
    return _reduce_meet(sys, phi, u, w)


def _drop_sup(sys, phi: PiecewiseBF) -> Point:
    for ival, leaf in reversed(phi.pieces):
        if isinstance(leaf, Const):
            hi_pt = interval_sup(sys, ival)[0]
            if lt(leaf.value, hi_pt):
                return hi_pt
    raise _internal("no dropping stretch found")


def _spread_pair(sys, vals: list[Point]) -> tuple[Point, Point]:
    """First consecutive listed values with more points strictly between."""
    for u, w in zip(vals, vals[1:]):
        if not (has_gap_above(sys, u) and suc(sys, u) == w):
            return u, w
    raise _internal("value list is a single gap chain")


def _reduce_meet(sys, phi, a: Point, c: Point) -> MeetClass:
    b = construct_between_no_gap_below(sys, a, c)
    if b is None:
        raise _internal("no room between the chosen dropped-to values")
    eta = make_bf(sys, [
        (interval(sys, p_min(sys), b), ID),
        (interval(sys, b, p_max(sys), lo_open=True), Const(b)),
    ])
    w1 = bf_join(sys, phi, eta)
    w2 = _split_bf(sys, phi, _sup_leq(sys, phi, b), "keep", ID)
    _check_witnesses(sys, phi, w1, w2, bf_meet, "meet")
    return MeetClass("reducible", (), (w1, w2))


def classify_join_bf(sys: RefinementSystem, bf: PiecewiseBF) -> JoinClass:
    """Join irreducibility, decided by the size of the image."""
    _require_ideal(bf)
    phi = normalize_bf(sys, bf)
    ran, _ = range_and_drop(sys, phi)
    vals = set_values(sys, ran)
    bottom = p_min(sys)

    if vals is None:
        ival = next(p.ival for p in ran.parts
                    if interval_small_points(sys, p.ival) is None)
        ys = _gap_below_points_inside(sys, ival, 4)
        a, b = pred(sys, ys[1]), pred(sys, ys[3])
        c = construct_between_no_gap_below(sys, a, b)
        if c is None:
            raise _internal("no room between the chosen image values")
        return _reduce_join(sys, phi, c)

    if len(vals) == 1:
        if vals[0] != bottom:
            raise _internal("constant function misses the bottom")
        return JoinClass("minimal_form")

    if len(vals) == 2:
        a = vals[1]
        s = _sup_leq(sys, phi, bottom)
        t = s if eval_bf(sys, phi, s) == bottom else pred(sys, s)
        if not bf_eq(sys, phi, construct_family(sys, "phi_at", a=a, t=t)):
            raise _internal("two-valued function is not the step form")
        return JoinClass("phi_at", (a, t))

    u, w = _spread_pair(sys, vals[1:])
    c = construct_between_no_gap_below(sys, u, w)
    if c is None:
        raise _internal("no room between the chosen image values")
    return _reduce_join(sys, phi, c)


def _reduce_join(sys, phi, c: Point) -> JoinClass:
    t = _sup_leq(sys, phi, c)
    w1 = _split_bf(sys, phi, t, "keep", Const(c))
    w2 = _split_bf(sys, phi, t, Const(p_min(sys)), "keep")
    _check_witnesses(sys, phi, w1, w2, bf_join, "join")
    return JoinClass("reducible", (), (w1, w2))


# ---------------------------------------------------------------------------
# ideal-set catalogs


@dataclass(frozen=True)
class IdealVerdict:
    """Catalog verdict for one ideal-set expression.

    irreducible is None when the expression falls outside the catalog
    handled here.  Reducible verdicts carry expression witnesses when
    a valid decomposition exists; the boundary function and its own
    classification ride along.
    """

    kind: str
    irreducible: Optional[bool]
    params: tuple = ()
    witnesses: Optional[tuple] = None
    boundary: Optional[PiecewiseBF] = None
    boundary_class: object = None
    note: str = ""


def _verify_members_equal(sys, lhs, parts, op: str) -> None:
    for x, y in _sample_pairs(sys, lhs):
        got = member(sys, lhs, x, y).is_yes
        ins = [member(sys, p, x, y).is_yes for p in parts]
        want = all(ins) if op == "intersection" else any(ins)
        if got != want:
            raise _internal(
                f"decomposition disagrees at ({format_point(sys, x)}, "
                f"{format_point(sys, y)})")


def classify_meet_ideal(sys: RefinementSystem, expr) -> IdealVerdict:
    """Meet irreducibility for strips and strips with an adjoined pair."""
    note = ""
    if isinstance(expr, Empty):
        kind, a, b = "strip", p_min(sys), p_max(sys)
    elif isinstance(expr, Full):
        kind, a, b = "strip", p_max(sys), p_min(sys)
    elif isinstance(expr, Strip):
        kind, a, b = "strip", expr.a, expr.b
        if lt(b, a):
            # nothing is squeezed out; same set as the full relation
            a, b = p_max(sys), p_min(sys)
            note = "degenerate bounds denote the full relation"
    elif isinstance(expr, StripPlus):
        kind, a, b = "strip_plus", expr.a, expr.b
    else:
        return IdealVerdict("not_in_catalog", None)
    linked = p_test(a, b)
    relieved = not has_gap_above(sys, a) or not has_gap_below(sys, b)
    boundary = boundary_of(sys, expr)
    bclass = classify_meet_bf(sys, boundary)
    if kind == "strip":
        irr = linked or relieved
        witnesses = None
        if not irr:
            w1, w2 = Strip(suc(sys, a), b), Strip(a, pred(sys, b))
            _verify_members_equal(sys, expr, (w1, w2), "intersection")
            for w, probe in ((w1, (a, a)), (w2, (b, b))):
                if member(sys, w, *probe).is_yes == \
                        member(sys, expr, *probe).is_yes:
                    raise _internal("strip witness does not differ")
            witnesses = (w1, w2)
        return IdealVerdict(kind, irr, (a, b), witnesses, boundary, bclass,
                            note)
    irr = linked and relieved
    if not irr:
        if linked:
            note = "catalog rule fired on a pair no valid constructor produces"
        else:
            note = "the adjoined pair is not linked"
    return IdealVerdict(kind, irr, (a, b), None, boundary, bclass, note)


def classify_join_ideal(sys: RefinementSystem, expr) -> IdealVerdict:
    """Join irreducibility for corners and the empty set."""
    if isinstance(expr, Empty):
        boundary = boundary_of(sys, expr)
        return IdealVerdict("empty", True, (), None, boundary,
                            classify_join_bf(sys, boundary))
    if not isinstance(expr, Corner):
        return IdealVerdict("not_in_catalog", None)
    a, t = expr.a, expr.t
    boundary = boundary_of(sys, expr)
    bclass = classify_join_bf(sys, boundary)
    if not (has_gap_below(sys, a) and has_gap_above(sys, t)):
        return IdealVerdict("corner", True, (a, t), None, boundary, bclass)
    pa, st = pred(sys, a), suc(sys, t)
    if p_test(pa, st):
        return IdealVerdict("corner", True, (a, t), None, boundary, bclass)
    w1, w2 = Corner(a, st), Corner(pa, t)
    _verify_members_equal(sys, expr, (w1, w2), "union")
    for w, probe in ((w1, (p_min(sys), st)), (w2, (pa, p_max(sys)))):
        if member(sys, w, *probe).is_yes == member(sys, expr, *probe).is_yes:
            raise _internal("corner witness does not differ")
    return IdealVerdict("corner", False, (a, t), (w1, w2), boundary, bclass)


# ---------------------------------------------------------------------------
# the named families


def _family_error(clause: str) -> RefinementError:
    return RefinementError(f"family constraint violated: {clause}")


def construct_family(sys: RefinementSystem, kind: str, *,
                     a: Optional[Point] = None, b: Optional[Point] = None,
                     t: Optional[Point] = None):
    """Build one of the named ideal sets or boundary functions.

    Parameter constraints are enforced here with the violated clause
    named; the function families additionally pass full validation on
    construction.
    """
    lo, hi = p_min(sys), p_max(sys)
    if kind == "strip":
        return Strip(a, b)
    if kind == "strip_plus":
        if not p_test(a, b):
            raise _family_error("the adjoined pair must be linked")
        return StripPlus(a, b)
    if kind == "corner":
        if not (lt(lo, a) and le(a, t) and lt(t, hi)):
            raise _family_error("corner needs p_min < a <= t < p_max")
        return Corner(a, t)
    if kind == "phi_ab":
        if not lt(a, b):
            raise _family_error("plateau needs a < b")
        if has_gap_below(sys, a):
            raise _family_error("Property2b: the plateau value has a gap below")
        pieces = []
        if a != lo:
            pieces.append((interval(sys, lo, a, hi_open=True), ID))
        pieces.append((interval(sys, a, b), Const(a)))
        if b != hi:
            pieces.append((interval(sys, b, hi, lo_open=True), ID))
        return make_bf(sys, pieces)
    if kind == "psi_paab":
        if not has_gap_below(sys, a):
            raise _family_error("the step form needs a gap below a")
        if not lt(a, b):
            raise _family_error("the step form needs a < b")
        if not p_test(a, b):
            raise _family_error("Property2a: (a, b) must be linked")
        if not has_gap_below(sys, b):
            raise _family_error("Property2b: b must have a gap below")
        pieces = [(interval(sys, lo, a, hi_open=True), ID),
                  (interval(sys, a, b, hi_open=True), Const(pred(sys, a))),
                  (interval(sys, b, b), Const(a))]
        if b != hi:
            pieces.append((interval(sys, b, hi, lo_open=True), ID))
        return make_bf(sys, pieces)
    if kind == "phi_at":
        if not (le(a, t) and lt(t, hi)):
            raise _family_error("the step needs a <= t < p_max")
        if has_gap_below(sys, a):
            raise _family_error("Property2b: the upper value has a gap below")
        if a == lo:
            return const_bf(sys, lo)
        pieces = [(interval(sys, lo, t), Const(lo)),
                  (interval(sys, t, hi, lo_open=True), Const(a))]
        return make_bf(sys, pieces)
    raise ValueError(f"unknown family: {kind!r}")
