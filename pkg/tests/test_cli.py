"""Scenario engine, boundary-function literals, fixtures, and the CLI."""

import json
import random

import pytest

from refbound.boundary import bf_eq, format_bf, parse_bf, identity_bf, Mode
from refbound.boundary import InvalidBoundaryFunctionError
from refbound.cli import main
from refbound.fixtures import (
    FIXTURE_GROUPS,
    FIXTURE_NAMES,
    emit_fixture,
    fixture_group,
)
from refbound.oracle import random_bf
from refbound.order import parse_system
from refbound.scenario import ScenarioError, run_scenario, run_scenario_text

BIN = parse_system(";2")
ALT = parse_system(";2,3")


class TestBFLiterals:
    def test_identity_literal(self):
        assert format_bf(BIN, identity_bf(BIN)) == "[|1, |2] -> id"

    def test_module_prefix(self):
        text = format_bf(BIN, identity_bf(BIN, Mode.MODULE))
        assert text.startswith("module ")
        assert parse_bf(BIN, text).mode is Mode.MODULE

    @pytest.mark.parametrize("sys", [BIN, ALT], ids=[";2", ";2,3"])
    def test_round_trip_random(self, sys):
        rng = random.Random(41)
        for _ in range(40):
            f = random_bf(sys, rng)
            text = format_bf(sys, f)
            g = parse_bf(sys, text)
            assert bf_eq(sys, f, g)
            # printing is a fixpoint on parsed output
            assert format_bf(sys, g) == text

    @pytest.mark.parametrize("bad", [
        "", "garbage", "[|1, |2] -> wat", "[|1 |2] -> id",
        "[|1, |2] -> const()", "{|1, |2} -> id",
    ])
    def test_grammar_errors(self, bad):
        with pytest.raises(ValueError):
            parse_bf(BIN, bad)

    def test_law_violation_raises(self):
        with pytest.raises(InvalidBoundaryFunctionError):
            parse_bf(BIN, "[|1, |2] -> const(|2)")


class TestScenarioGrammar:
    def test_comments_and_blanks_skipped(self):
        out = run_scenario_text("# nothing\n\nsystem ;2\n  # indented\n")
        assert out.exit_code == 0
        assert out.results == []

    def test_declarations_recorded(self):
        out = run_scenario_text(
            "system ;2\npoint a = 2|1\nideal S = strip a a\n"
            "bf phi = boundary S\n")
        assert [r.status for r in out.results] == ["ok", "ok"]
        assert "strip" in out.results[0].detail
        assert "const" in out.results[1].detail

    def test_inline_point_literals(self):
        out = run_scenario_text(
            "system ;2\nbf f = identity\neval f 2|1 expect 2|1\n")
        assert out.exit_code == 0

    @pytest.mark.parametrize("text,line,col", [
        ("system ;2\nsystem ;3", 2, 8),
        ("bogus stuff", 1, 1),
        ("point a = |1", 1, 11),
        ("system ;2\neval f |1 expect |1", 2, 6),
        ("system ;2\nmember S |1 |1 expect yes", 2, 8),
        ("system ;2\npoint a = zz", 2, 11),
        ("system ;2\nbf f = identity\neval f |1", 3, 10),
        ("system ;2\nbf f = identity\neval f |1 expect |1 junk", 3, 21),
        ("system ;2\nbf f = wat", 2, 8),
        ("system ;2\nideal S = wat", 2, 11),
        ("system ;2\nideal S = union", 2, 11),
        ("system ;2\nsuite nope expect ok", 2, 7),
        ("system ;2\nbf f = identity\nbf f = identity", 3, 4),
        ("system ;2\nbf f = identity\nequiv f f expect maybe", 3, 18),
        ("paper-examples nowhere expect ok", 1, 16),
    ])
    def test_errors_carry_position(self, text, line, col):
        with pytest.raises(ScenarioError) as err:
            run_scenario_text(text)
        assert err.value.line == line
        assert err.value.column == col

    def test_missing_system_points_at_command(self):
        with pytest.raises(ScenarioError) as err:
            run_scenario_text("bf f = identity")
        assert err.value.line == 1

    def test_failed_expectation_continues(self):
        out = run_scenario_text(
            "system ;2\nbf f = identity\n"
            "eval f |1 expect |2\neval f |2 expect |2\n")
        assert out.exit_code == 1
        assert [r.status for r in out.results] == ["ok", "fail", "ok"]
        assert out.results[1].detail == "|1"

    def test_every_verb_runs(self):
        out = run_scenario_text("""
            system ;2
            point a = |12
            point b = 2|21
            ideal S = strip a b
            ideal T = strip_plus a b
            ideal U = union S T
            ideal I = intersection S T
            ideal M = module S
            ideal F = finite 2 (12,21)
            bf phi = boundary S
            bf psi = family phi_ab a b
            ideal O = open phi
            ideal H = hull phi
            bf low = const |1
            bf idf = identity
            bf m = minus phi
            bf p = plus m
            bf j = join phi low
            bf k = meet phi idf
            eval phi b expect a
            member S a b expect no
            member U a b expect yes
            boundary T expect phi
            minus phi expect m
            plus m expect p
            lattice join phi low expect phi
            lattice meet phi idf expect phi
            classify meet phi expect phi_ab
            classify join low expect minimal_form
            classify meet-set S expect irreducible
            classify join-set S expect none
            equiv phi m expect yes
            equiv phi low expect no
            sandwich S phi expect yes
            suite lemma10 expect ok
            paper-examples section2 expect ok
        """)
        assert out.exit_code == 0
        assert all(r.status == "ok" for r in out.results)
        # one suite ran directly and two fixtures ran suites of their own
        assert len(out.reports) >= 1

    def test_suite_verb_collects_report(self):
        out = run_scenario_text("system ;2,3\nsuite cocycle expect ok\n")
        assert out.exit_code == 0
        assert len(out.reports) == 1
        assert out.reports[0].system == ";2,3"

    def test_system_flag_fills_in(self):
        out = run_scenario_text("bf f = identity\neval f |1 expect |1\n",
                                system=";2")
        assert out.exit_code == 0

    def test_declared_system_beats_nothing(self):
        with pytest.raises(ScenarioError):
            run_scenario_text("system ;2\nsystem ;2")

    def test_json_shape(self):
        out = run_scenario_text("system ;2\nsuite prop1 expect ok\n")
        data = json.loads(out.to_json())
        assert data["exit"] == 0
        assert data["commands"][0]["status"] == "ok"
        assert data["suites"][0]["suite"] == "prop1"
        assert "elapsed" not in data["suites"][0]

    def test_run_scenario_reads_file(self, tmp_path):
        path = tmp_path / "a.scn"
        path.write_text("system ;2\nbf f = identity\neval f |2 expect |2\n")
        assert run_scenario(path).exit_code == 0


class TestFixtures:
    def test_names_fixed(self):
        assert FIXTURE_NAMES == ("trivial", "full", "maximal-gap",
                                 "maximal-nogap", "strip-pair",
                                 "prime-variant")

    def test_groups(self):
        assert fixture_group("section2") == ("trivial", "full")
        assert len(fixture_group("section3")) == 4
        assert fixture_group("all") == FIXTURE_NAMES
        with pytest.raises(ValueError):
            fixture_group("nowhere")

    def test_unknown_fixture(self):
        with pytest.raises(ValueError):
            emit_fixture("nope")

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_fixture_text_passes(self, name):
        out = run_scenario_text(emit_fixture(name))
        assert out.exit_code == 0
        assert all(r.status == "ok" for r in out.results)

    def test_fixtures_declare_own_system(self):
        for name in FIXTURE_NAMES:
            assert "system ;2" in emit_fixture(name)


class TestCLI:
    def test_run_ok(self, tmp_path, capsys):
        path = tmp_path / "ok.scn"
        path.write_text("system ;2\nbf f = identity\neval f |2 expect |2\n")
        assert main(["run", str(path)]) == 0
        assert "0 failed" in capsys.readouterr().out

    def test_run_assert_failure(self, tmp_path, capsys):
        path = tmp_path / "bad.scn"
        path.write_text("system ;2\nbf f = identity\neval f |1 expect |2\n")
        assert main(["run", str(path)]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_run_input_error(self, tmp_path, capsys):
        path = tmp_path / "err.scn"
        path.write_text("system ;2\nbf f = wat\n")
        assert main(["run", str(path)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_run_missing_file(self, capsys):
        assert main(["run", "/definitely/not/here.scn"]) == 2
        assert "error" in capsys.readouterr().err

    def test_fixture_prints_text(self, capsys):
        assert main(["fixture", "trivial"]) == 0
        printed = capsys.readouterr().out
        assert printed.strip() == emit_fixture("trivial").strip()
        # printed text re-runs clean
        assert run_scenario_text(printed).exit_code == 0

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_fixture_run_exits_zero(self, name, capsys):
        assert main(["fixture", name, "--run"]) == 0
        assert "0 failed" in capsys.readouterr().out

    def test_unknown_fixture_rejected(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["fixture", "nope"])
        assert err.value.code == 2

    def test_suite_single(self, capsys):
        assert main(["suite", "lemma8", "--system", ";2,3"]) == 0
        out = capsys.readouterr().out
        assert "lemma8" in out and "0 failed" in out

    def test_suite_all_with_json(self, tmp_path, capsys):
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        assert main(["suite", "all", "--seed", "7", "--json", str(p1)]) == 0
        assert main(["suite", "all", "--seed", "7", "--json", str(p2)]) == 0
        capsys.readouterr()
        assert p1.read_bytes() == p2.read_bytes()
        data = json.loads(p1.read_text())
        assert data["exit"] == 0
        assert len(data["reports"]) == 16

    def test_paper_examples_groups(self, capsys):
        for group in sorted(FIXTURE_GROUPS):
            assert main(["paper-examples", group]) == 0
        assert "prime-variant" in capsys.readouterr().out

    def test_paper_examples_json(self, tmp_path, capsys):
        path = tmp_path / "pe.json"
        assert main(["paper-examples", "section3", "--json", str(path)]) == 0
        capsys.readouterr()
        data = json.loads(path.read_text())
        assert data["exit"] == 0
        assert len(data["commands"]) > 20
