"""Top-level acceptance gates.

Each test prints one summary line (ACCEPT-k: PASS/FAIL) straight to the
terminal and then asserts, so a full run always shows the scoreboard.
"""

import random
import time
from fractions import Fraction

from refbound.boundary import (
    bf_between,
    bf_eq,
    bf_equiv,
    bf_join,
    bf_meet,
    bf_minus,
    bf_plus,
    eval_bf,
    validate_bf,
)
from refbound.cli import main
from refbound.cocycle import btilde, ctilde, gap_point, order_by_cocycle
from refbound.fixtures import FIXTURE_NAMES, emit_fixture
from refbound.idealsets import (
    Corner,
    FiniteLevel,
    OfBFClosed,
    OfBFOpen,
    boundary_of,
    intersection,
    member,
    sandwich_check,
    union,
)
from refbound.irreducibility import (
    bf_form,
    classify_join_bf,
    classify_join_ideal,
    classify_meet_bf,
    classify_meet_ideal,
)
from refbound.oracle import (
    SUITE_NAMES,
    _random_linked_pair,
    _random_mate,
    _random_point,
    brute_boundary,
    build_finite_model,
    enumerate_closed_sets,
    random_bf,
    random_ideal_expr,
    run_suite,
    sample_points,
)
from refbound.idealsets import Strip
from refbound.order import (
    format_system,
    le,
    lt,
    max_tail_point,
    order_compare,
    p_min,
    p_test,
    parse_point,
    parse_system,
)
from refbound.scenario import run_scenario_text

BIN = parse_system(";2")
ALT = parse_system(";2,3")
SYSTEMS = (BIN, ALT)


def _emit(capsys, k, ok, desc):
    line = f"ACCEPT-{k}: {'PASS' if ok else 'FAIL'} — {desc}"
    with capsys.disabled():
        print(line)
    assert ok, line


def _rng(tag):
    return random.Random(f"accept|{tag}")


def _pair_pool(sys, tag, n_linked, n_plain):
    rng = _rng(f"pairs|{tag}|{format_system(sys)}")
    pairs = [_random_linked_pair(sys, rng) for _ in range(n_linked)]
    pts = sample_points(sys, 5, max(2, n_plain // 10))
    while len(pairs) < n_linked + n_plain:
        pairs.append((rng.choice(pts), rng.choice(pts)))
    return pairs


def test_accept_1_exhaustive_finite_oracle(capsys):
    start = time.perf_counter()
    bad = 0
    sets = 0
    for level in (1, 2):
        model = build_finite_model(BIN, level)
        for units in enumerate_closed_sets(BIN, model):
            sets += 1
            bf = boundary_of(BIN, FiniteLevel(units))
            for v in model.words:
                u = brute_boundary(model, units, v)
                want = max_tail_point(BIN, u) if u else p_min(BIN)
                if eval_bf(BIN, bf, max_tail_point(BIN, v)) != want:
                    bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and sets > 5 and elapsed < 10
    _emit(capsys, 1, ok,
          f"exhaustive brute-force agreement on {sets} closed unit sets "
          f"at levels 1-2, {bad} mismatches, {elapsed:.2f}s")


def test_accept_2_boundaries_always_lawful(capsys):
    start = time.perf_counter()
    bad = 0
    for sys in SYSTEMS:
        rng = _rng(f"laws|{format_system(sys)}")
        pts = sample_points(sys, 2, 500)[:500]
        for _ in range(100):
            expr = random_ideal_expr(sys, rng)
            bf = boundary_of(sys, expr)
            if validate_bf(sys, bf):
                bad += 1
                continue
            for x in pts:
                if not le(eval_bf(sys, bf, x), x):
                    bad += 1
                    break
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    _emit(capsys, 2, ok,
          f"200 random set expressions produce lawful boundaries, checked "
          f"at 500 points each, {bad} violations, {elapsed:.2f}s")


def test_accept_3_sandwich_identities(capsys):
    bad = 0
    checked_pairs = 0
    for sys in SYSTEMS:
        rng = _rng(f"sandwich|{format_system(sys)}")
        pool = _pair_pool(sys, "sandwich", 500, 500)
        for _ in range(25):
            f = random_bf(sys, rng)
            hull, inside = OfBFClosed(f), OfBFOpen(f)
            if not bf_eq(sys, boundary_of(sys, hull), f):
                bad += 1
            if not bf_eq(sys, boundary_of(sys, inside), bf_minus(sys, f)):
                bad += 1
            if not sandwich_check(sys, hull, f).is_yes:
                bad += 1
            if not sandwich_check(sys, inside, bf_minus(sys, f)).is_yes:
                bad += 1
            for x, y in pool:
                checked_pairs += 1
                if member(sys, inside, x, y).is_yes:
                    if not member(sys, hull, x, y).is_yes:
                        bad += 1
                if p_test(x, y) and lt(x, eval_bf(sys, f, y)):
                    if not member(sys, hull, x, y).is_yes:
                        bad += 1
    ok = bad == 0 and checked_pairs >= 50 * 1000
    _emit(capsys, 3, ok,
          f"hull and open-set boundaries recover each function exactly "
          f"for 50 functions; inclusions held on {checked_pairs} pairs, "
          f"{bad} failures")


def test_accept_4_companion_projections(capsys):
    bad = 0
    pairs = 0
    for sys in SYSTEMS:
        rng = _rng(f"companions|{format_system(sys)}")
        fs = [random_bf(sys, rng) for _ in range(25)]
        for f in fs:
            fm, fp = bf_minus(sys, f), bf_plus(sys, f)
            if not bf_eq(sys, bf_minus(sys, fp), fm):
                bad += 1
            if not bf_eq(sys, bf_plus(sys, fm), fp):
                bad += 1
        for i in range(50):
            f = fs[i % len(fs)]
            g = random_bf(sys, rng)
            if i % 3 == 0:
                g = bf_minus(sys, f)
            elif i % 3 == 1:
                g = bf_join(sys, bf_minus(sys, f), bf_meet(sys, bf_plus(sys, f), g))
            pairs += 1
            if bf_equiv(sys, f, g) != bf_between(sys, f, g):
                bad += 1
    ok = bad == 0 and pairs == 100
    _emit(capsys, 4, ok,
          f"companion maps project correctly for 50 functions; equivalence "
          f"matched the companion bracket on {pairs} pairs, {bad} failures")


def test_accept_5_lattice_boundary_identities(capsys):
    bad = 0
    for sys in SYSTEMS:
        rng = _rng(f"lattice|{format_system(sys)}")
        for _ in range(50):
            e1 = random_ideal_expr(sys, rng, depth=1)
            e2 = random_ideal_expr(sys, rng, depth=1)
            b1, b2 = boundary_of(sys, e1), boundary_of(sys, e2)
            if not bf_eq(sys, boundary_of(sys, union(e1, e2)),
                         bf_join(sys, b1, b2)):
                bad += 1
            if not bf_eq(sys, boundary_of(sys, intersection(e1, e2)),
                         bf_meet(sys, b1, b2)):
                bad += 1
    ok = bad == 0
    _emit(capsys, 5, ok,
          f"union and intersection boundaries equal join and meet exactly "
          f"on 100 random pairs, {bad} failures")


_MEET_FORMS = {"identity_form": {"identity"},
               "phi_ab": {"phi_ab", "minimal"},
               "psi_paab": {"psi_paab"}}
_JOIN_FORMS = {"minimal_form": {"minimal"}, "phi_at": {"phi_at"}}


def _certify(sys, f, verdict, forms, recombine):
    if verdict.kind == "reducible":
        ws = verdict.witnesses
        if not ws or len(ws) < 2:
            return False
        acc = ws[0]
        for w in ws[1:]:
            if validate_bf(sys, w):
                return False
            if bf_eq(sys, w, f):
                return False
            acc = recombine(sys, acc, w)
        if validate_bf(sys, ws[0]):
            return False
        if bf_eq(sys, ws[0], f):
            return False
        return bf_eq(sys, acc, f)
    return bf_form(sys, f).tag in forms.get(verdict.kind, set())


def test_accept_6_classifications_certified(capsys):
    bad = 0
    verdicts = 0
    for sys in SYSTEMS:
        rng = _rng(f"classify|{format_system(sys)}")
        for _ in range(100):
            f = random_bf(sys, rng)
            verdicts += 2
            if not _certify(sys, f, classify_meet_bf(sys, f), _MEET_FORMS,
                            bf_meet):
                bad += 1
            if not _certify(sys, f, classify_join_bf(sys, f), _JOIN_FORMS,
                            bf_join):
                bad += 1
    # the one catalog corner in the binary system that genuinely splits
    a, t = parse_point(BIN, "2|1"), parse_point(BIN, "21|2")
    expr = Corner(a, t)
    got = classify_join_ideal(BIN, expr)
    split_ok = (got.irreducible is False and got.witnesses is not None
                and got.witnesses[0] == Corner(parse_point(BIN, "2|1"),
                                               parse_point(BIN, "22|1"))
                and got.witnesses[1] == Corner(parse_point(BIN, "1|2"),
                                               parse_point(BIN, "21|2")))
    samples = 0
    if split_ok:
        w1, w2 = got.witnesses
        pool = _pair_pool(BIN, "corner", 300, 200)
        for x, y in pool:
            samples += 1
            whole = member(BIN, expr, x, y).is_yes
            parts = member(BIN, w1, x, y).is_yes or member(BIN, w2, x, y).is_yes
            if whole != parts:
                split_ok = False
                break
    strip = Strip(parse_point(BIN, "|12"), parse_point(BIN, "2|21"))
    meet_side = classify_meet_ideal(BIN, strip)
    ideal_ok = (meet_side.irreducible is True
                and classify_join_ideal(BIN, Corner(parse_point(BIN, "|21"),
                                                    t)).irreducible is True)
    ok = bad == 0 and split_ok and ideal_ok and samples >= 500 and verdicts == 400
    _emit(capsys, 6, ok,
          f"{verdicts} classification verdicts certified ({bad} bad); the "
          f"splitting corner decomposes correctly on {samples} samples")


def test_accept_7_cocycle_order_correspondence(capsys):
    bad = 0
    rng = _rng("cocycle")
    orbit_pairs = []
    while len(orbit_pairs) < 1000:
        sys = SYSTEMS[len(orbit_pairs) % 2]
        x = _random_point(sys, rng, 3, 2)
        orbit_pairs.append((sys, x, _random_mate(sys, rng, x)))
    for sys, x, y in orbit_pairs:
        if le(x, y) and not btilde(sys, x) <= btilde(sys, y):
            bad += 1
        if (ctilde(sys, x, y) >= 0) != p_test(x, y):
            bad += 1
    triples = 0
    for sys, x, y in orbit_pairs[:500]:
        z = _random_mate(sys, rng, y)
        triples += 1
        if ctilde(sys, x, z) != ctilde(sys, x, y) + ctilde(sys, y, z):
            bad += 1
    depth_pairs = 0
    for sys, x, y in orbit_pairs:
        if not p_test(x, y):
            continue
        depth_pairs += 1
        for n in range(1, 21):
            g = gap_point(sys, n)
            if lt(g, x) and not lt(g, y):
                bad += 1
        if depth_pairs == 500:
            break
    order_pairs = 0
    while order_pairs < 500:
        sys = SYSTEMS[order_pairs % 2]
        x = _random_point(sys, rng, 3, 2)
        y = _random_point(sys, rng, 3, 2)
        if x == y:
            continue
        order_pairs += 1
        if order_by_cocycle(sys, x, y) != order_compare(x, y):
            bad += 1
    frozen = (btilde(BIN, parse_point(BIN, "|2")) == 1
              and btilde(BIN, parse_point(BIN, "|12")) == Fraction(1, 3))
    ok = bad == 0 and frozen and depth_pairs >= 500 and triples == 500
    _emit(capsys, 7, ok,
          f"cocycle matches the order on 1000 orbit pairs, additive on "
          f"{triples} triples, gap sets nested to depth 20 on {depth_pairs} "
          f"pairs; frozen rational values exact; {bad} failures")


def test_accept_8_worked_example_scenarios(capsys):
    bad = []
    for name in FIXTURE_NAMES:
        out = run_scenario_text(emit_fixture(name))
        if out.exit_code != 0:
            bad.append(name)
    strip_text = emit_fixture("strip-pair")
    prime_text = emit_fixture("prime-variant")
    probes = ("boundary T expect phi" in strip_text
              and "member Sp a b expect no" in prime_text
              and "member Tp a b expect yes" in prime_text)
    cli_code = main(["paper-examples", "all"])
    capsys.readouterr()
    ok = not bad and probes and cli_code == 0
    _emit(capsys, 8, ok,
          f"all {len(FIXTURE_NAMES)} built-in scenarios exit 0 "
          f"(failures: {bad or 'none'}), coincidence and membership probes "
          f"included")


def test_accept_9_suite_reports_are_reproducible(capsys):
    diffs = []
    for name in SUITE_NAMES:
        for sys in (None, ";2,3"):
            first = run_suite(name, sys, seed=23, budget=1).to_json()
            second = run_suite(name, sys, seed=23, budget=1).to_json()
            if first.encode() != second.encode():
                diffs.append(name)
    ok = not diffs
    _emit(capsys, 9, ok,
          f"byte-identical reports for {len(SUITE_NAMES)} suites on two "
          f"systems under seed replay (diffs: {diffs or 'none'})")
